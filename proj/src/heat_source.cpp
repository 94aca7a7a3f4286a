#include "meltsim/heat_source.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace meltsim {

void HeatSourceGeometry::validate() const
{
    if (!(a > 0.0 && b > 0.0 && c > 0.0) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
        throw std::invalid_argument("heat source semi-axes must be positive and finite");
}

void ProcessParameters::validate() const
{
    if (!(power >= 0.0) || !std::isfinite(power))
        throw std::invalid_argument("laser power must be non-negative");
    if (!(speed >= 0.0) || !std::isfinite(speed))
        throw std::invalid_argument("scan speed must be non-negative");
    if (!(ambient > 0.0) || !std::isfinite(ambient))
        throw std::invalid_argument("ambient temperature must be positive (K)");
}

double flux(const HeatSourceGeometry& geom, const ProcessParameters& proc, double absorptivity, const Vec3& point)
{
    if (point.z > 0.0)
        return 0.0;
    constexpr double pi = std::numbers::pi;
    const double peak = 6.0 * std::sqrt(3.0) * absorptivity * proc.power / (geom.a * geom.b * geom.c * pi * std::sqrt(pi));
    const double e = 3.0 * (point.x * point.x / (geom.a * geom.a) + point.y * point.y / (geom.b * geom.b) +
                            point.z * point.z / (geom.c * geom.c));
    return peak * std::exp(-e);
}

double total_deposited_power(const HeatSourceGeometry& geom, const ProcessParameters& proc, double absorptivity,
                             const QuadratureOptions& opt)
{
    // exp(-3 * 7^2) ~ 1e-64: the Gaussian tails beyond 7 semi-axes are negligible.
    constexpr double reach = 7.0;
    const double bx[3] = {-reach * geom.a, 0.0, reach * geom.a};
    const double by[3] = {-reach * geom.b, 0.0, reach * geom.b};
    const double bz[2] = {-reach * geom.c, 0.0};

    auto over_x = [&](double y, double z) {
        return integrate_adaptive([&](double x) { return flux(geom, proc, absorptivity, {x, y, z}); },
                                  std::span<const double>(bx), opt)
            .value;
    };
    auto over_xy = [&](double z) {
        return integrate_adaptive([&](double y) { return over_x(y, z); }, std::span<const double>(by), opt).value;
    };
    return integrate_adaptive(over_xy, std::span<const double>(bz), opt).value;
}

DimensionlessGroups dimensionless_groups(const HeatSourceGeometry& geom, const ProcessParameters& proc, double alpha,
                                         const Material& mat, double t_elapsed, double t_source)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::domain_error("thermal diffusivity must be positive");
    if (!(mat.t_melt > proc.ambient))
        throw std::domain_error("melting temperature must exceed ambient");

    const double scale = proc.speed / (2.0 * std::sqrt(6.0) * alpha);
    DimensionlessGroups g;
    g.u_a = scale * geom.a;
    g.u_b = scale * geom.b;
    g.u_c = scale * geom.c;
    g.tau = proc.speed * proc.speed * (t_source - t_elapsed) / (2.0 * alpha);
    const double heat_capacity = modified_heat_capacity(mat, proc.ambient);
    g.n = mat.absorptivity * proc.power * proc.speed /
          (4.0 * std::numbers::pi * alpha * alpha * mat.density * heat_capacity * (mat.t_melt - proc.ambient));
    return g;
}

} // namespace meltsim
