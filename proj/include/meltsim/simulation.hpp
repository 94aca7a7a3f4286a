#pragma once

#include <atomic>
#include <optional>

#include "meltsim/heat_source.hpp"
#include "meltsim/material.hpp"
#include "meltsim/meltpool.hpp"
#include "meltsim/thermal_field.hpp"

namespace meltsim {

/// Everything needed to turn a (power, speed) pair into melt-pool
/// dimensions. The raster's power and speed are replaced per run.
struct SimulationSetup {
    Material material;
    HeatSourceGeometry geometry;
    double absorptivity = 1.0;
    double ambient = 298.15; // K
    RasterSpec raster;
    std::optional<double> probe_time; // s; default: end of the last track
    FieldOptions field;
    ExtractionOptions extraction;
};

/// Thread-safe evaluation counters.
struct FieldCounters {
    std::atomic<long> samples{0};
    std::atomic<long> nonconverged{0};
};

struct MeltPoolRun {
    MeltPoolDimensions dims;
    double probe_time = 0.0;
    Vec3 source_position;
    long samples = 0;
    long nonconverged = 0;
};

ScanPattern pattern_for(const SimulationSetup& setup, double power, double speed);
double probe_time_for(const SimulationSetup& setup, const ScanPattern& pattern);

/// Temperature field of the pattern; counts samples into `counters` when given.
TemperatureField make_field(const SimulationSetup& setup, const ScanPattern& pattern,
                            FieldCounters* counters = nullptr);

MeltPoolRun simulate_melt_pool(const SimulationSetup& setup, double power, double speed);

} // namespace meltsim
