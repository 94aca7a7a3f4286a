#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace meltsim {

/// Temperature-indexed property, piecewise linear between breakpoints and
/// clamped to the end values outside the tabulated range.
class PropertyTable {
public:
    struct Breakpoint {
        double temperature; // K
        double value;
    };

    PropertyTable() = default;
    explicit PropertyTable(std::vector<Breakpoint> breakpoints);

    /// Constant table (two breakpoints with equal value).
    static PropertyTable constant(double value);

    double operator()(double temperature) const;

    const std::vector<Breakpoint>& breakpoints() const noexcept { return breakpoints_; }
    double min_value() const;
    double max_value() const;

private:
    std::vector<Breakpoint> breakpoints_;
};

struct Material {
    std::string name;
    double density = 0.0;            // kg/m^3
    double latent_heat_fusion = 0.0; // J/kg
    double t_solidus = 0.0;          // K
    double t_liquidus = 0.0;         // K
    double t_melt = 0.0;             // K
    double absorptivity = 1.0;
    PropertyTable conductivity;      // W/(m K)
    PropertyTable specific_heat;     // J/(kg K)

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;
};

/// Properties resolved at one temperature.
struct PropertyState {
    double conductivity = 0.0;  // W/(m K)
    double heat_capacity = 0.0; // modified, J/(kg K)
    double diffusivity = 0.0;   // m^2/s
};

double conductivity(const Material& mat, double temperature);
double specific_heat(const Material& mat, double temperature);
double liquid_fraction(const Material& mat, double temperature);
/// d(liquid_fraction)/dT: 1/(T_L - T_s) on the closed mushy interval, 0 elsewhere.
double liquid_fraction_slope(const Material& mat, double temperature);
double modified_heat_capacity(const Material& mat, double temperature);
double thermal_diffusivity(const Material& mat, double temperature);
PropertyState properties_at(const Material& mat, double temperature);

inline constexpr int material_schema_version = 1;

/// Parses a material document. T_melt defaults to the mushy-zone midpoint.
Material material_from_json(const nlohmann::json& doc);
nlohmann::json material_to_json(const Material& mat);
Material load_material(const std::filesystem::path& path);

} // namespace meltsim
