#include "meltsim/material.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "meltsim/errors.hpp"

namespace meltsim {

namespace {

void require_temperature(double temperature)
{
    if (!std::isfinite(temperature))
        throw std::domain_error("temperature must be finite");
    if (temperature <= 0.0)
        throw std::domain_error("temperature must be positive (K)");
}

} // namespace

PropertyTable::PropertyTable(std::vector<Breakpoint> breakpoints) : breakpoints_(std::move(breakpoints))
{
    if (breakpoints_.size() < 2)
        throw std::invalid_argument("property table needs at least 2 breakpoints");
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        const auto& bp = breakpoints_[i];
        if (!std::isfinite(bp.temperature) || !std::isfinite(bp.value))
            throw std::invalid_argument("property table entries must be finite");
        if (bp.value <= 0.0)
            throw std::invalid_argument("property table values must be positive");
        if (i > 0 && bp.temperature <= breakpoints_[i - 1].temperature)
            throw std::invalid_argument("property table temperatures must be strictly increasing");
    }
}

PropertyTable PropertyTable::constant(double value)
{
    return PropertyTable({{1.0, value}, {1.0e5, value}});
}

double PropertyTable::operator()(double temperature) const
{
    require_temperature(temperature);
    if (temperature <= breakpoints_.front().temperature)
        return breakpoints_.front().value;
    if (temperature >= breakpoints_.back().temperature)
        return breakpoints_.back().value;
    auto hi = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), temperature,
                               [](double t, const Breakpoint& bp) { return t < bp.temperature; });
    auto lo = hi - 1;
    const double w = (temperature - lo->temperature) / (hi->temperature - lo->temperature);
    return lo->value + w * (hi->value - lo->value);
}

double PropertyTable::min_value() const
{
    return std::min_element(breakpoints_.begin(), breakpoints_.end(),
                            [](const auto& l, const auto& r) { return l.value < r.value; })
        ->value;
}

double PropertyTable::max_value() const
{
    return std::max_element(breakpoints_.begin(), breakpoints_.end(),
                            [](const auto& l, const auto& r) { return l.value < r.value; })
        ->value;
}

void Material::validate() const
{
    if (!(density > 0.0))
        throw std::invalid_argument("material density must be positive");
    if (!(latent_heat_fusion >= 0.0))
        throw std::invalid_argument("latent heat of fusion must be non-negative");
    if (!(absorptivity > 0.0 && absorptivity <= 1.0))
        throw std::invalid_argument("absorptivity must lie in (0, 1]");
    if (!(t_solidus > 0.0 && t_solidus < t_liquidus))
        throw std::invalid_argument("solidus must be positive and below liquidus");
    if (!(t_melt >= t_solidus && t_melt <= t_liquidus))
        throw std::invalid_argument("melting temperature must lie within [solidus, liquidus]");
    if (conductivity.breakpoints().size() < 2 || specific_heat.breakpoints().size() < 2)
        throw std::invalid_argument("material needs conductivity and specific heat tables");
}

double conductivity(const Material& mat, double temperature) { return mat.conductivity(temperature); }

double specific_heat(const Material& mat, double temperature) { return mat.specific_heat(temperature); }

double liquid_fraction(const Material& mat, double temperature)
{
    require_temperature(temperature);
    if (temperature <= mat.t_solidus)
        return 0.0;
    if (temperature >= mat.t_liquidus)
        return 1.0;
    return (temperature - mat.t_solidus) / (mat.t_liquidus - mat.t_solidus);
}

double liquid_fraction_slope(const Material& mat, double temperature)
{
    require_temperature(temperature);
    if (temperature < mat.t_solidus || temperature > mat.t_liquidus)
        return 0.0;
    return 1.0 / (mat.t_liquidus - mat.t_solidus);
}

double modified_heat_capacity(const Material& mat, double temperature)
{
    return specific_heat(mat, temperature) + mat.latent_heat_fusion * liquid_fraction_slope(mat, temperature);
}

double thermal_diffusivity(const Material& mat, double temperature)
{
    return conductivity(mat, temperature) / (mat.density * modified_heat_capacity(mat, temperature));
}

PropertyState properties_at(const Material& mat, double temperature)
{
    PropertyState s;
    s.conductivity = conductivity(mat, temperature);
    s.heat_capacity = modified_heat_capacity(mat, temperature);
    s.diffusivity = s.conductivity / (mat.density * s.heat_capacity);
    return s;
}

namespace {

PropertyTable table_from_json(const nlohmann::json& arr, const char* key)
{
    if (!arr.is_array())
        throw ConfigError(std::string("material field '") + key + "' must be an array of [temperature, value] pairs");
    std::vector<PropertyTable::Breakpoint> bps;
    for (const auto& pair : arr) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw ConfigError(std::string("material field '") + key + "' entries must be [temperature, value]");
        bps.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    try {
        return PropertyTable(std::move(bps));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("material field '") + key + "': " + e.what());
    }
}

double number_field(const nlohmann::json& doc, const char* key)
{
    if (!doc.contains(key) || !doc.at(key).is_number())
        throw ConfigError(std::string("material field '") + key + "' is missing or not a number");
    return doc.at(key).get<double>();
}

} // namespace

Material material_from_json(const nlohmann::json& doc)
{
    if (!doc.is_object())
        throw ConfigError("material document must be an object");
    if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer())
        throw ConfigError("material document lacks an integer schema_version");
    if (doc.at("schema_version").get<int>() != material_schema_version)
        throw ConfigError("unsupported material schema_version " + doc.at("schema_version").dump());
    if (!doc.contains("name") || !doc.at("name").is_string())
        throw ConfigError("material field 'name' is missing");

    Material m;
    m.name = doc.at("name").get<std::string>();
    m.density = number_field(doc, "density");
    m.latent_heat_fusion = number_field(doc, "latent_heat_fusion");
    m.t_solidus = number_field(doc, "t_solidus");
    m.t_liquidus = number_field(doc, "t_liquidus");
    m.t_melt = doc.contains("t_melt") ? number_field(doc, "t_melt") : 0.5 * (m.t_solidus + m.t_liquidus);
    m.absorptivity = number_field(doc, "absorptivity");
    m.conductivity = table_from_json(doc.value("conductivity", nlohmann::json()), "conductivity");
    m.specific_heat = table_from_json(doc.value("specific_heat", nlohmann::json()), "specific_heat");
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("material '") + m.name + "': " + e.what());
    }
    return m;
}

nlohmann::json material_to_json(const Material& mat)
{
    auto table = [](const PropertyTable& t) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& bp : t.breakpoints())
            arr.push_back({bp.temperature, bp.value});
        return arr;
    };
    return {
        {"schema_version", material_schema_version},
        {"name", mat.name},
        {"density", mat.density},
        {"latent_heat_fusion", mat.latent_heat_fusion},
        {"t_solidus", mat.t_solidus},
        {"t_liquidus", mat.t_liquidus},
        {"t_melt", mat.t_melt},
        {"absorptivity", mat.absorptivity},
        {"conductivity", table(mat.conductivity)},
        {"specific_heat", table(mat.specific_heat)},
    };
}

Material load_material(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open material file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("material file " + path.string() + " is not valid JSON: " + e.what());
    }
    return material_from_json(doc);
}

} // namespace meltsim
