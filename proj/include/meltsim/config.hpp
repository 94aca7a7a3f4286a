#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "meltsim/calibration.hpp"
#include "meltsim/simulation.hpp"

namespace meltsim {

inline constexpr int config_schema_version = 1;

/// A run description in presentation units (mm, mm/s, um, degC, W, s).
struct SimulationConfig {
    std::string material_file; // as written; relative paths resolve against the config directory
    Material material;
    std::optional<double> absorptivity; // overrides the material's value

    std::array<double, 3> geometry_mm{};

    double power_w = 0.0;
    double speed_mm_s = 0.0;
    double ambient_c = 25.0;
    std::optional<double> spot_diameter_mm; // metadata only

    int segments = 1;
    double segment_length_mm = 2.0;
    double hatch_um = 100.0;
    double time_spacing_s = 0.0;
    double layer_thickness_um = 0.0;
    int tracks_per_layer = 0; // 0: all tracks in one layer

    std::optional<double> probe_time_s; // empty: end of the last track

    double rel_tol = 1e-6;
    double abs_tol_k = 1e-8;
    int max_panels = 4000;
    double property_tolerance_k = 0.1;
    int max_property_iterations = 50;
    double relaxation = 0.5;
    int grid_samples = 64;
    double bisection_tolerance_um = 1e-3;
    int max_box_doublings = 3;

    std::array<int, 2> contour_resolution{128, 128};
    std::optional<std::array<double, 2>> contour_u_mm; // default: search box around the source
    std::optional<std::array<double, 2>> contour_v_mm;
    std::string output_dir = "out";

    /// Throws ConfigError describing the first offending field.
    void validate() const;

    SimulationSetup to_setup() const;

    /// Canonical form: every field explicit, material embedded.
    nlohmann::json to_json() const;

    /// 16 hex digits of FNV-1a over the canonical JSON dump.
    std::string hash() const;
};

/// Parses a config document; `base_dir` anchors a relative material path.
SimulationConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// IoError when the file cannot be read, ConfigError when it is invalid.
SimulationConfig load_config(const std::filesystem::path& path);

struct SweepSpec {
    std::vector<double> powers_w;
    std::vector<double> speeds_mm_s;
    std::vector<std::array<double, 3>> geometries_mm;

    void validate() const;
};

SweepSpec sweep_spec_from_json(const nlohmann::json& doc);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

/// Bounds document {"a_mm": [lo, hi], "b_mm": [...], "c_mm": [...]}, returned in metres.
GeometryBounds bounds_from_json(const nlohmann::json& doc);
GeometryBounds load_bounds(const std::filesystem::path& path);

/// Parses "NxM" into {N, M}; both at least 2.
std::array<int, 2> parse_resolution(const std::string& text);

nlohmann::json read_json_file(const std::filesystem::path& path);

std::string fnv1a_hex(const std::string& bytes);

} // namespace meltsim
