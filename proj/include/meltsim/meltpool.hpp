#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "meltsim/heat_source.hpp"
#include "meltsim/vec3.hpp"

namespace meltsim {

/// Temperature (K) at a point and time. Must be safe to call concurrently.
using TemperatureField = std::function<double(const Vec3& point, double t)>;

/// Axis-aligned box; the part above z = 0 is ignored.
struct SearchBox {
    Vec3 lo;
    Vec3 hi;
};

struct MeltPoolDimensions {
    double length = 0.0; // m, along x
    double width = 0.0;  // m, along y
    double depth = 0.0;  // m, along z
    bool melted = false;
    double peak_temperature = 0.0; // K
    Vec3 peak_position;
};

struct ExtractionOptions {
    int samples_per_axis = 64;
    double bisection_tolerance = 1e-9; // m
    int max_box_doublings = 3;
};

/// Coordinate-wise extents of the superlevel set {T >= melt_temperature}.
/// The top plane (z = 0) gives length and width, the vertical plane through
/// the peak gives depth; each extreme is bisected on T - T_m between the
/// outermost melted coarse sample and its unmelted neighbour.
/// Throws SearchBoxClipped if the isotherm reaches the box edge.
MeltPoolDimensions melt_pool_dimensions(const TemperatureField& field, double t, double melt_temperature,
                                        const SearchBox& box, const ExtractionOptions& opt = {});

/// 6a x 6b x 6c box centred on the source (cut at the surface).
SearchBox default_search_box(const HeatSourceGeometry& geom, const Vec3& source_position);

/// As melt_pool_dimensions on the default box, doubling it on clipping up to
/// opt.max_box_doublings times.
MeltPoolDimensions measure_melt_pool(const TemperatureField& field, double t, double melt_temperature,
                                     const HeatSourceGeometry& geom, const Vec3& source_position,
                                     const ExtractionOptions& opt = {});

enum class Plane { top, side };

Plane plane_from_string(const std::string& name);
std::string to_string(Plane plane);

struct GridAxis {
    double min = 0.0;
    double max = 0.0;
    int count = 2;

    double step() const { return (max - min) / (count - 1); }
    double at(int i) const { return min + step() * i; }
};

/// Regular samples of the field on a plane: top is (u, v) = (x, y) at
/// z = fixed, side is (u, v) = (x, z) at y = fixed. Row-major in v.
struct ContourGrid {
    Plane plane = Plane::top;
    GridAxis u;
    GridAxis v;
    double fixed = 0.0;
    double probe_time = 0.0;
    std::vector<double> temperatures;

    double value(int i, int j) const { return temperatures[static_cast<std::size_t>(j) * u.count + i]; }
    Vec3 point(int i, int j) const;
    double max_temperature() const;
    double min_temperature() const;
};

ContourGrid contour_grid(const TemperatureField& field, double t, Plane plane, const GridAxis& u, const GridAxis& v,
                         double fixed = 0.0);

struct Point2 {
    double u = 0.0;
    double v = 0.0;
};

struct Isoline {
    std::vector<Point2> points;
    bool closed = false;
};

/// Marching-squares level set. Lines are closed loops or end on the grid edge.
std::vector<Isoline> isotherm_polyline(const ContourGrid& grid, double level);

/// Absolute shoelace area of a closed isoline (m^2); 0 for open lines.
double enclosed_area(const Isoline& line);

// Export: lengths in mm, temperatures in degC.

struct ExportMetadata {
    std::string config_hash;
    double probe_time = 0.0; // s
};

void write_contour_csv(std::ostream& out, const ContourGrid& grid, const ExportMetadata& meta);
nlohmann::json contour_to_json(const ContourGrid& grid, const ExportMetadata& meta);
nlohmann::json isolines_to_json(const std::vector<Isoline>& lines, Plane plane, double level);

} // namespace meltsim
