#include <iomanip>
#include <ostream>

#include "meltsim/meltpool.hpp"
#include "meltsim/units.hpp"

namespace meltsim {

namespace {

const char* v_column(Plane plane) { return plane == Plane::top ? "y_mm" : "z_mm"; }

} // namespace

void write_contour_csv(std::ostream& out, const ContourGrid& grid, const ExportMetadata& meta)
{
    out << "# plane=" << to_string(grid.plane) << "\n";
    out << "# config_hash=" << meta.config_hash << "\n";
    out << "# probe_time_s=" << std::setprecision(12) << meta.probe_time << "\n";
    out << "# units=mm,degC\n";
    out << "x_mm," << v_column(grid.plane) << ",T_c\n";
    out << std::setprecision(10);
    for (int j = 0; j < grid.v.count; ++j)
        for (int i = 0; i < grid.u.count; ++i)
            out << units::m_to_mm(grid.u.at(i)) << ',' << units::m_to_mm(grid.v.at(j)) << ','
                << units::kelvin_to_celsius(grid.value(i, j)) << '\n';
}

nlohmann::json contour_to_json(const ContourGrid& grid, const ExportMetadata& meta)
{
    nlohmann::json u = nlohmann::json::array();
    nlohmann::json v = nlohmann::json::array();
    for (int i = 0; i < grid.u.count; ++i)
        u.push_back(units::m_to_mm(grid.u.at(i)));
    for (int j = 0; j < grid.v.count; ++j)
        v.push_back(units::m_to_mm(grid.v.at(j)));
    nlohmann::json rows = nlohmann::json::array();
    for (int j = 0; j < grid.v.count; ++j) {
        nlohmann::json row = nlohmann::json::array();
        for (int i = 0; i < grid.u.count; ++i)
            row.push_back(units::kelvin_to_celsius(grid.value(i, j)));
        rows.push_back(std::move(row));
    }
    return {
        {"metadata",
         {{"plane", to_string(grid.plane)},
          {"config_hash", meta.config_hash},
          {"probe_time_s", meta.probe_time},
          {"fixed_coordinate_mm", units::m_to_mm(grid.fixed)},
          {"units", {{"length", "mm"}, {"temperature", "degC"}}}}},
        {"x_mm", std::move(u)},
        {v_column(grid.plane), std::move(v)},
        {"T_c", std::move(rows)},
    };
}

nlohmann::json isolines_to_json(const std::vector<Isoline>& lines, Plane plane, double level)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& line : lines) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : line.points)
            pts.push_back({units::m_to_mm(p.u), units::m_to_mm(p.v)});
        arr.push_back({{"closed", line.closed}, {"points_mm", std::move(pts)}});
    }
    return {{"plane", to_string(plane)}, {"level_c", units::kelvin_to_celsius(level)}, {"polylines", std::move(arr)}};
}

} // namespace meltsim
