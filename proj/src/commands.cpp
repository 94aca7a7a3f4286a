#include "meltsim/commands.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <tbb/parallel_for.h>

#include "meltsim/dataset.hpp"
#include "meltsim/errors.hpp"
#include "meltsim/units.hpp"

namespace meltsim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <class F>
int guarded(std::ostream& err, F&& body)
{
    try {
        body();
        return exit_ok;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return exit_io;
    } catch (const SimulationError& e) {
        err << "simulation error: " << e.what() << '\n';
        return exit_simulation;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        err << "simulation error: " << e.what() << '\n';
        return exit_simulation;
    }
}

fs::path output_dir(const SimulationConfig& config, const std::optional<fs::path>& override_dir)
{
    return override_dir ? *override_dir : fs::path(config.output_dir);
}

void make_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot write " + path.string());
    f << text;
    f.close();
    if (!f)
        throw IoError("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& doc)
{
    write_text(path, doc.dump(2) + "\n");
}

json mm_vec(const Vec3& p)
{
    return json::array({units::m_to_mm(p.x), units::m_to_mm(p.y), units::m_to_mm(p.z)});
}

std::string fixed(double x, int digits)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << x;
    return s.str();
}

MeltPoolRun run_config(const SimulationConfig& config, const SimulationSetup& setup)
{
    return simulate_melt_pool(setup, config.power_w, units::mm_per_s_to_m_per_s(config.speed_mm_s));
}

void export_contour(const fs::path& dir, const SimulationConfig& config, Plane plane, std::array<int, 2> res)
{
    const ContourGrid grid = config_contour(config, plane, res);
    const ExportMetadata meta{config.hash(), grid.probe_time};
    const std::string stem = "contour_" + to_string(plane);
    std::ostringstream csv;
    write_contour_csv(csv, grid, meta);
    write_text(dir / (stem + ".csv"), csv.str());
    write_json(dir / (stem + ".json"), contour_to_json(grid, meta));
    const double level = config.material.t_melt;
    json iso = isolines_to_json(isotherm_polyline(grid, level), plane, level);
    iso["config_hash"] = meta.config_hash;
    iso["probe_time_s"] = meta.probe_time;
    write_json(dir / (stem + "_isolines.json"), iso);
}

} // namespace

json simulation_summary(const SimulationConfig& config, const MeltPoolRun& run)
{
    const MeltPoolDimensions& d = run.dims;
    json summary = {
        {"config_hash", config.hash()},
        {"material", config.material.name},
        {"power_w", config.power_w},
        {"speed_mm_s", config.speed_mm_s},
        {"geometry_mm", config.geometry_mm},
        {"segments", config.segments},
        {"probe_time_s", run.probe_time},
        {"source_position_mm", mm_vec(run.source_position)},
        {"melt_temperature_c", units::kelvin_to_celsius(config.material.t_melt)},
        {"melted", d.melted},
        {"length_mm", units::m_to_mm(d.length)},
        {"width_mm", units::m_to_mm(d.width)},
        {"depth_mm", units::m_to_mm(d.depth)},
        {"peak_temperature_c", units::kelvin_to_celsius(d.peak_temperature)},
        {"peak_position_mm", mm_vec(d.peak_position)},
        {"field_samples", run.samples},
        {"nonconverged_samples", run.nonconverged},
        {"properties_converged", run.nonconverged == 0},
    };
    return summary;
}

ContourGrid config_contour(const SimulationConfig& config, Plane plane, std::array<int, 2> resolution)
{
    const SimulationSetup setup = config.to_setup();
    const ScanPattern pattern =
        pattern_for(setup, config.power_w, units::mm_per_s_to_m_per_s(config.speed_mm_s));
    const double t = probe_time_for(setup, pattern);
    const Vec3 source = pattern.source_position(t);
    const SearchBox box = default_search_box(setup.geometry, source);

    GridAxis u{box.lo.x, box.hi.x, resolution[0]};
    GridAxis v = plane == Plane::top ? GridAxis{box.lo.y, box.hi.y, resolution[1]}
                                     : GridAxis{box.lo.z, 0.0, resolution[1]};
    if (config.contour_u_mm)
        u = {units::mm_to_m((*config.contour_u_mm)[0]), units::mm_to_m((*config.contour_u_mm)[1]), resolution[0]};
    if (config.contour_v_mm)
        v = {units::mm_to_m((*config.contour_v_mm)[0]), units::mm_to_m((*config.contour_v_mm)[1]), resolution[1]};
    if (plane == Plane::side && v.max > 0.0)
        throw ConfigError("side-view contour range must stay at or below the surface (z <= 0)");
    const double fixed_coord = plane == Plane::top ? 0.0 : source.y;
    return contour_grid(make_field(setup, pattern), t, plane, u, v, fixed_coord);
}

void write_sweep_csv(std::ostream& out, const SimulationConfig& config, const SweepSpec& spec)
{
    struct Cell {
        double power_w, speed_mm_s;
        std::array<double, 3> geometry_mm;
        std::optional<MeltPoolDimensions> dims;
        std::string error;
    };
    std::vector<Cell> cells;
    for (const auto& g : spec.geometries_mm)
        for (double p : spec.powers_w)
            for (double v : spec.speeds_mm_s)
                cells.push_back({p, v, g, std::nullopt, {}});

    tbb::parallel_for(std::size_t{0}, cells.size(), [&](std::size_t i) {
        Cell& c = cells[i];
        SimulationConfig cfg = config;
        cfg.geometry_mm = c.geometry_mm;
        try {
            c.dims = simulate_melt_pool(cfg.to_setup(), c.power_w, units::mm_per_s_to_m_per_s(c.speed_mm_s)).dims;
        } catch (const std::exception& e) {
            c.error = e.what();
        }
    });

    out << "# config_hash=" << config.hash() << "\n";
    out << "# units=W,mm/s,mm,degC\n";
    out << "power_w,speed_mm_s,a_mm,b_mm,c_mm,length_mm,width_mm,depth_mm,peak_temperature_c,status\n";
    for (const auto& c : cells) {
        out << fixed(c.power_w, 2) << ',' << fixed(c.speed_mm_s, 2) << ',' << fixed(c.geometry_mm[0], 4) << ','
            << fixed(c.geometry_mm[1], 4) << ',' << fixed(c.geometry_mm[2], 4) << ',';
        if (!c.dims) {
            std::string msg = c.error;
            for (char& ch : msg)
                if (ch == ',' || ch == '\n' || ch == '"')
                    ch = ' ';
            out << ",,,,error: " << msg << '\n';
        } else if (!c.dims->melted) {
            out << "no-melt,no-melt,no-melt," << fixed(units::kelvin_to_celsius(c.dims->peak_temperature), 2)
                << ",no-melt\n";
        } else {
            out << fixed(units::m_to_mm(c.dims->length), 8) << ',' << fixed(units::m_to_mm(c.dims->width), 8) << ','
                << fixed(units::m_to_mm(c.dims->depth), 8) << ','
                << fixed(units::kelvin_to_celsius(c.dims->peak_temperature), 2) << ",ok\n";
        }
    }
}

int run_simulate(const fs::path& config_path, std::optional<Plane> contour, const std::optional<fs::path>& out_dir,
                 CommandStreams io)
{
    return guarded(io.err, [&] {
        const SimulationConfig config = load_config(config_path);
        const MeltPoolRun run = run_config(config, config.to_setup());
        const json summary = simulation_summary(config, run);

        const fs::path dir = output_dir(config, out_dir);
        make_dir(dir);
        write_json(dir / "summary.json", summary);
        if (contour)
            export_contour(dir, config, *contour, config.contour_resolution);

        const auto& d = run.dims;
        io.out << "material      " << config.material.name << "\n"
               << "power         " << fixed(config.power_w, 2) << " W\n"
               << "speed         " << fixed(config.speed_mm_s, 2) << " mm/s\n"
               << "geometry      a=" << config.geometry_mm[0] << " b=" << config.geometry_mm[1]
               << " c=" << config.geometry_mm[2] << " mm\n"
               << "probe time    " << run.probe_time << " s\n"
               << "peak          " << fixed(units::kelvin_to_celsius(d.peak_temperature), 1) << " degC\n";
        if (d.melted)
            io.out << "melt pool     L=" << fixed(units::m_to_mm(d.length), 6)
                   << " W=" << fixed(units::m_to_mm(d.width), 6) << " D=" << fixed(units::m_to_mm(d.depth), 6)
                   << " mm\n";
        else
            io.out << "melt pool     no-melt\n";
        io.out << "properties    " << (run.nonconverged == 0 ? "converged" : "not converged at ")
               << (run.nonconverged == 0 ? "" : std::to_string(run.nonconverged) + " samples") << "\n"
               << "written       " << (dir / "summary.json").string() << "\n";
    });
}

int run_sweep(const fs::path& config_path, const fs::path& spec_path, const std::optional<fs::path>& out_dir,
              CommandStreams io)
{
    return guarded(io.err, [&] {
        const SimulationConfig config = load_config(config_path);
        const SweepSpec spec = load_sweep_spec(spec_path);
        std::ostringstream csv;
        write_sweep_csv(csv, config, spec);
        const fs::path dir = output_dir(config, out_dir);
        make_dir(dir);
        write_text(dir / "sweep.csv", csv.str());
        io.out << csv.str();
    });
}

int run_contour(const fs::path& config_path, Plane plane, const std::optional<std::string>& resolution,
                const std::optional<fs::path>& out_dir, CommandStreams io)
{
    return guarded(io.err, [&] {
        const SimulationConfig config = load_config(config_path);
        const std::array<int, 2> res = resolution ? parse_resolution(*resolution) : config.contour_resolution;
        const fs::path dir = output_dir(config, out_dir);
        make_dir(dir);
        export_contour(dir, config, plane, res);
        io.out << "written " << (dir / ("contour_" + to_string(plane) + ".csv")).string() << "\n";
    });
}

int run_validate(const fs::path& config_path, const fs::path& data_path, const std::optional<fs::path>& out_dir,
                 CommandStreams io)
{
    return guarded(io.err, [&] {
        const SimulationConfig config = load_config(config_path);
        const DatasetLoadResult data = load_dataset_file(data_path.string());
        const ValidationReport report = validate(data.records, config.to_setup());

        json doc = report.to_json();
        doc["config_hash"] = config.hash();
        doc["dataset"] = data_path.filename().string();
        json rejected = json::array();
        for (const auto& r : data.rejected)
            rejected.push_back({{"line", r.line}, {"message", r.message}});
        doc["rejected_rows"] = rejected;

        std::ostringstream table;
        for (const auto& r : data.rejected)
            table << "rejected line " << r.line << ": " << r.message << '\n';
        report.write_table(table);

        const fs::path dir = output_dir(config, out_dir);
        make_dir(dir);
        write_json(dir / "report.json", doc);
        write_text(dir / "report.txt", table.str());
        io.out << table.str();
    });
}

int run_calibrate(const fs::path& config_path, const fs::path& data_path, const fs::path& bounds_path,
                  const std::optional<fs::path>& out_dir, CommandStreams io)
{
    return guarded(io.err, [&] {
        const SimulationConfig config = load_config(config_path);
        const DatasetLoadResult data = load_dataset_file(data_path.string());
        const GeometryBounds bounds = load_bounds(bounds_path);
        std::vector<ExperimentRecord> records;
        for (const auto& r : data.records)
            if (same_material(r.material, config.material.name))
                records.push_back(r);
        if (records.size() < 3)
            throw ConfigError("calibration needs at least 3 records of material " + config.material.name);

        const CalibrationResult result = calibrate_geometry(records, config.to_setup(), bounds);
        const json doc = {
            {"config_hash", config.hash()},
            {"dataset", data_path.filename().string()},
            {"records", records.size()},
            {"geometry_mm",
             {{"a_mm", units::m_to_mm(result.geometry.a)},
              {"b_mm", units::m_to_mm(result.geometry.b)},
              {"c_mm", units::m_to_mm(result.geometry.c)}}},
            {"bounds_mm",
             {{"a_mm", {units::m_to_mm(bounds.a[0]), units::m_to_mm(bounds.a[1])}},
              {"b_mm", {units::m_to_mm(bounds.b[0]), units::m_to_mm(bounds.b[1])}},
              {"c_mm", {units::m_to_mm(bounds.c[0]), units::m_to_mm(bounds.c[1])}}}},
            {"residual", result.residual},
            {"evaluations", result.evaluations},
            {"converged", result.converged},
        };
        const fs::path dir = output_dir(config, out_dir);
        make_dir(dir);
        write_json(dir / "calibration.json", doc);
        io.out << "geometry  a=" << fixed(units::m_to_mm(result.geometry.a), 5)
               << " b=" << fixed(units::m_to_mm(result.geometry.b), 5)
               << " c=" << fixed(units::m_to_mm(result.geometry.c), 5) << " mm\n"
               << "residual  " << result.residual << " after " << result.evaluations << " evaluations"
               << (result.converged ? "" : " (evaluation budget reached)") << "\n";
    });
}

} // namespace meltsim
