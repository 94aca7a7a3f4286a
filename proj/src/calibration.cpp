#include "meltsim/calibration.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include "meltsim/errors.hpp"
#include "meltsim/units.hpp"

namespace meltsim {

void GeometryBounds::validate() const
{
    for (const auto& r : {a, b, c})
        if (!(r[0] > 0.0 && r[1] >= r[0]) || !std::isfinite(r[1]))
            throw std::invalid_argument("geometry bounds must be positive and ordered (lo <= hi)");
}

double calibration_residual(const std::vector<ExperimentRecord>& records, const SimulationSetup& setup,
                            const HeatSourceGeometry& geometry, bool* any_success)
{
    SimulationSetup trial = setup;
    trial.geometry = geometry;
    const ValidationReport rep = score_predictions(records, [&](double power_w, double speed_mm_s) {
        return simulate_melt_pool(trial, power_w, units::mm_per_s_to_m_per_s(speed_mm_s)).dims;
    });
    double sum = 0.0;
    for (const auto& row : rep.rows) {
        if (row.scored())
            sum += row.rel_length * row.rel_length + row.rel_width * row.rel_width + row.rel_depth * row.rel_depth;
        else
            sum += 3.0; // zero-sized prediction: relative error -1 per dimension
    }
    if (any_success)
        *any_success = rep.failures < static_cast<int>(rep.rows.size());
    return sum;
}

namespace {

struct Problem {
    const std::vector<ExperimentRecord>* records;
    const SimulationSetup* setup;
    std::array<double, 3> log_lo{};
    std::array<double, 3> log_hi{};
    std::vector<int> free_axes;
    int evaluations = 0;
    bool any_success = false;
    std::map<std::array<double, 3>, double> cache;

    HeatSourceGeometry geometry(const gsl_vector* u) const
    {
        std::array<double, 3> g{};
        for (int k = 0; k < 3; ++k)
            g[k] = std::exp(log_lo[k]);
        for (std::size_t i = 0; i < free_axes.size(); ++i) {
            const int k = free_axes[i];
            const double w = 0.5 * (1.0 + std::sin(gsl_vector_get(u, i)));
            g[k] = std::exp(log_lo[k] + w * (log_hi[k] - log_lo[k]));
        }
        return {g[0], g[1], g[2]};
    }

    double residual(const HeatSourceGeometry& g)
    {
        const std::array<double, 3> key{g.a, g.b, g.c};
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
        bool ok = false;
        const double r = calibration_residual(*records, *setup, g, &ok);
        any_success = any_success || ok;
        ++evaluations;
        cache.emplace(key, r);
        return r;
    }
};

double objective(const gsl_vector* u, void* params)
{
    auto* p = static_cast<Problem*>(params);
    return p->residual(p->geometry(u));
}

} // namespace

CalibrationResult calibrate_geometry(const std::vector<ExperimentRecord>& records, const SimulationSetup& setup,
                                     const GeometryBounds& bounds, const CalibrationOptions& opt)
{
    if (records.size() < 3)
        throw std::invalid_argument("calibration needs at least 3 records");
    bounds.validate();

    Problem prob{&records, &setup, {}, {}, {}, 0, false, {}};
    const std::array<std::array<double, 2>, 3> ranges{bounds.a, bounds.b, bounds.c};
    for (int k = 0; k < 3; ++k) {
        prob.log_lo[k] = std::log(ranges[k][0]);
        prob.log_hi[k] = std::log(ranges[k][1]);
        if (ranges[k][1] > ranges[k][0])
            prob.free_axes.push_back(k);
    }

    CalibrationResult result;
    const std::size_t dim = prob.free_axes.size();
    if (dim == 0) {
        result.geometry = {ranges[0][0], ranges[1][0], ranges[2][0]};
        result.residual = prob.residual(result.geometry);
        result.evaluations = prob.evaluations;
        result.converged = true;
        if (!prob.any_success)
            throw SimulationError("calibration: every simulation failed");
        return result;
    }

    gsl_set_error_handler_off();
    gsl_vector* x = gsl_vector_calloc(dim); // u = 0: logarithmic centre of the box
    gsl_vector* step = gsl_vector_alloc(dim);
    gsl_vector_set_all(step, opt.initial_step);
    gsl_multimin_function fn{&objective, dim, &prob};
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
    gsl_multimin_fminimizer_set(s, &fn, x, step);

    int status = GSL_CONTINUE;
    while (status == GSL_CONTINUE && prob.evaluations < opt.max_evaluations) {
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS)
            break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), opt.simplex_size_tolerance);
    }

    result.geometry = prob.geometry(gsl_multimin_fminimizer_x(s));
    result.residual = gsl_multimin_fminimizer_minimum(s);
    result.evaluations = prob.evaluations;
    result.converged = status == GSL_SUCCESS;

    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(x);

    if (!prob.any_success)
        throw SimulationError("calibration: every simulation failed");
    return result;
}

} // namespace meltsim
