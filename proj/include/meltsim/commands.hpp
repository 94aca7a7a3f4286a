#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include <json.hpp>

#include "meltsim/config.hpp"
#include "meltsim/meltpool.hpp"

namespace meltsim {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_config = 2,
    exit_simulation = 3,
    exit_io = 4,
};

struct CommandStreams {
    std::ostream& out;
    std::ostream& err;
};

/// Summary of one simulate run, in presentation units.
nlohmann::json simulation_summary(const SimulationConfig& config, const MeltPoolRun& run);

/// Contour grid for the config's run at its probe time. Axis ranges come from
/// the config when given, otherwise from the search box around the source.
ContourGrid config_contour(const SimulationConfig& config, Plane plane, std::array<int, 2> resolution);

/// One CSV row per (geometry, power, speed) in that nesting order.
void write_sweep_csv(std::ostream& out, const SimulationConfig& config, const SweepSpec& spec);

// Each command returns an ExitCode; `out_dir` overrides output.dir.
int run_simulate(const std::filesystem::path& config_path, std::optional<Plane> contour,
                 const std::optional<std::filesystem::path>& out_dir, CommandStreams io);
int run_sweep(const std::filesystem::path& config_path, const std::filesystem::path& spec_path,
              const std::optional<std::filesystem::path>& out_dir, CommandStreams io);
int run_contour(const std::filesystem::path& config_path, Plane plane, const std::optional<std::string>& resolution,
                const std::optional<std::filesystem::path>& out_dir, CommandStreams io);
int run_validate(const std::filesystem::path& config_path, const std::filesystem::path& data_path,
                 const std::optional<std::filesystem::path>& out_dir, CommandStreams io);
int run_calibrate(const std::filesystem::path& config_path, const std::filesystem::path& data_path,
                  const std::filesystem::path& bounds_path, const std::optional<std::filesystem::path>& out_dir,
                  CommandStreams io);

} // namespace meltsim
