#pragma once

#include <array>
#include <vector>

#include "meltsim/dataset.hpp"
#include "meltsim/heat_source.hpp"
#include "meltsim/simulation.hpp"

namespace meltsim {

/// Inclusive [lo, hi] ranges for each semi-axis (m).
struct GeometryBounds {
    std::array<double, 2> a{};
    std::array<double, 2> b{};
    std::array<double, 2> c{};

    void validate() const;
};

struct CalibrationOptions {
    int max_evaluations = 240;
    double simplex_size_tolerance = 2e-3;
    double initial_step = 0.5;
};

struct CalibrationResult {
    HeatSourceGeometry geometry;
    double residual = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Sum over records of squared relative errors in L, W and D. A failed or
/// non-melting prediction counts as zero-sized.
double calibration_residual(const std::vector<ExperimentRecord>& records, const SimulationSetup& setup,
                            const HeatSourceGeometry& geometry, bool* any_success = nullptr);

/// Nelder-Mead over (a, b, c) in log space, mapped into the bounds by a sine
/// transform and started from the logarithmic centre of the box.
CalibrationResult calibrate_geometry(const std::vector<ExperimentRecord>& records, const SimulationSetup& setup,
                                     const GeometryBounds& bounds, const CalibrationOptions& opt = {});

} // namespace meltsim
