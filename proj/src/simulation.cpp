#include "meltsim/simulation.hpp"

namespace meltsim {

ScanPattern pattern_for(const SimulationSetup& setup, double power, double speed)
{
    RasterSpec spec = setup.raster;
    spec.power = power;
    spec.speed = speed;
    ScanPattern pattern = ScanPattern::raster(spec);
    pattern.validate();
    return pattern;
}

double probe_time_for(const SimulationSetup& setup, const ScanPattern& pattern)
{
    return setup.probe_time.value_or(pattern.end_time());
}

TemperatureField make_field(const SimulationSetup& setup, const ScanPattern& pattern, FieldCounters* counters)
{
    const ProcessParameters proc{0.0, 0.0, setup.ambient};
    return [&setup, pattern, proc, counters](const Vec3& p, double t) {
        const ThermalSample s =
            multi_track_temperature(p, t, pattern, setup.geometry, proc, setup.material, setup.absorptivity, setup.field);
        if (counters) {
            counters->samples.fetch_add(1, std::memory_order_relaxed);
            if (!s.converged)
                counters->nonconverged.fetch_add(1, std::memory_order_relaxed);
        }
        return s.temperature;
    };
}

MeltPoolRun simulate_melt_pool(const SimulationSetup& setup, double power, double speed)
{
    const ScanPattern pattern = pattern_for(setup, power, speed);
    FieldCounters counters;
    const TemperatureField field = make_field(setup, pattern, &counters);

    MeltPoolRun run;
    run.probe_time = probe_time_for(setup, pattern);
    run.source_position = pattern.source_position(run.probe_time);
    run.dims = measure_melt_pool(field, run.probe_time, setup.material.t_melt, setup.geometry, run.source_position,
                                 setup.extraction);
    run.samples = counters.samples.load();
    run.nonconverged = counters.nonconverged.load();
    return run;
}

} // namespace meltsim
