#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "meltsim/commands.hpp"

namespace fs = std::filesystem;
using namespace meltsim;

int main(int argc, char** argv)
{
    CLI::App app{"Analytical melt-pool thermal simulator"};
    app.require_subcommand(1);

    std::string config, spec, data, bounds, plane_name = "top", res, out;
    std::string sim_contour;

    auto* simulate = app.add_subcommand("simulate", "Melt-pool dimensions for one configuration");
    simulate->add_option("--config", config, "Run configuration (JSON)")->required();
    simulate->add_option("--contour", sim_contour, "Also export a contour grid")->check(CLI::IsMember({"top", "side"}));
    simulate->add_option("--out", out, "Output directory (overrides output.dir)");

    auto* sweep = app.add_subcommand("sweep", "Power x speed x geometry table");
    sweep->add_option("--config", config, "Run configuration (JSON)")->required();
    sweep->add_option("--spec", spec, "Sweep definition: powers, speeds, geometries (JSON)")->required();
    sweep->add_option("--out", out, "Output directory (overrides output.dir)");

    auto* contour = app.add_subcommand("contour", "Export a temperature grid");
    contour->add_option("--config", config, "Run configuration (JSON)")->required();
    contour->add_option("--plane", plane_name, "top or side")->check(CLI::IsMember({"top", "side"}));
    contour->add_option("--res", res, "Grid resolution NxM");
    contour->add_option("--out", out, "Output directory (overrides output.dir)");

    auto* validate = app.add_subcommand("validate", "Score the model against measured melt pools");
    validate->add_option("--config", config, "Run configuration (JSON)")->required();
    validate->add_option("--data", data, "Dataset (CSV or TSV)")->required();
    validate->add_option("--out", out, "Output directory (overrides output.dir)");

    auto* calibrate = app.add_subcommand("calibrate", "Fit heat-source semi-axes to measured melt pools");
    calibrate->add_option("--config", config, "Run configuration (JSON)")->required();
    calibrate->add_option("--data", data, "Dataset (CSV or TSV)")->required();
    calibrate->add_option("--bounds", bounds, "Semi-axis bounds (JSON)")->required();
    calibrate->add_option("--out", out, "Output directory (overrides output.dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    const std::optional<fs::path> out_dir = out.empty() ? std::nullopt : std::optional<fs::path>(out);
    const CommandStreams io{std::cout, std::cerr};

    if (simulate->parsed()) {
        std::optional<Plane> plane;
        if (!sim_contour.empty())
            plane = plane_from_string(sim_contour);
        return run_simulate(config, plane, out_dir, io);
    }
    if (sweep->parsed())
        return run_sweep(config, spec, out_dir, io);
    if (contour->parsed())
        return run_contour(config, plane_from_string(plane_name), res.empty() ? std::nullopt : std::optional(res),
                           out_dir, io);
    if (validate->parsed())
        return run_validate(config, data, out_dir, io);
    return run_calibrate(config, data, bounds, out_dir, io);
}
