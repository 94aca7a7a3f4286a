#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "meltsim/errors.hpp"

namespace meltsim {

struct QuadratureOptions {
    double rel_tol = 1e-6;
    double abs_tol = 0.0; // in integral units
    int max_panels = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
};

/// Globally adaptive Gauss-Kronrod (15-point) integration over the
/// partition given by `breakpoints` (sorted, at least two entries).
/// The panel with the largest error estimate is bisected until the summed
/// error meets max(abs_tol, rel_tol * |I|). Throws QuadratureError with the
/// best estimate if the panel budget runs out.
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints, const QuadratureOptions& opt = {})
{
    using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    struct Panel {
        double lo, hi, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };

    auto eval = [&](double lo, double hi) {
        double err = 0.0;
        const double v = Rule::integrate(f, lo, hi, 0, 0.0, &err);
        // With max_depth = 0 the estimate refers to the reference interval [-1, 1].
        return Panel{lo, hi, v, err * 0.5 * (hi - lo)};
    };

    std::priority_queue<Panel> heap;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i]))
            continue;
        Panel p = eval(breakpoints[i], breakpoints[i + 1]);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }
    int panels = static_cast<int>(heap.size());

    auto satisfied = [&] { return total_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
    while (!heap.empty() && !satisfied()) {
        if (panels >= opt.max_panels)
            throw QuadratureError("adaptive quadrature exceeded " + std::to_string(opt.max_panels) +
                                      " panels (error " + std::to_string(total_err) + ")",
                                  total, total_err);
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            // Interval at floating-point resolution; accept its estimate.
            total_err -= worst.error;
            continue;
        }
        Panel left = eval(worst.lo, mid);
        Panel right = eval(mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    if (!std::isfinite(total))
        throw QuadratureError("adaptive quadrature produced a non-finite value", total, total_err);
    return {total, std::max(total_err, 0.0), panels};
}

template <class F>
QuadratureResult integrate_adaptive(F&& f, double lo, double hi, const QuadratureOptions& opt = {})
{
    const double bp[2] = {lo, hi};
    return integrate_adaptive(std::forward<F>(f), std::span<const double>(bp, 2), opt);
}

} // namespace meltsim
