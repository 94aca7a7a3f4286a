#include "meltsim/thermal_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace meltsim {

namespace {

constexpr double pi = std::numbers::pi;

bool is_unit_in_plane(const Vec3& d)
{
    return std::abs(d.z) < 1e-12 && std::abs(norm(d) - 1.0) < 1e-9;
}

void require_probe(const Vec3& point, double t)
{
    if (!std::isfinite(point.x) || !std::isfinite(point.y) || !std::isfinite(point.z) || !std::isfinite(t))
        throw std::domain_error("probe point and time must be finite");
    if (point.z > 0.0)
        throw std::domain_error("probe point must lie in the body (z <= 0)");
    if (t < 0.0)
        throw std::domain_error("probe time must be non-negative");
}

} // namespace

void TrackSegment::validate() const
{
    if (!(duration > 0.0))
        throw std::invalid_argument("segment duration must be positive");
    if (!(speed >= 0.0) || !std::isfinite(speed))
        throw std::invalid_argument("segment speed must be non-negative");
    if (!(power >= 0.0) || !std::isfinite(power))
        throw std::invalid_argument("segment power must be non-negative");
    if (!is_unit_in_plane(direction))
        throw std::invalid_argument("segment direction must be an in-plane unit vector");
    if (start_position.z > 0.0)
        throw std::invalid_argument("segment must start on or below the surface");
    if (!std::isfinite(start_time))
        throw std::invalid_argument("segment start time must be finite");
}

Vec3 TrackSegment::position_at(double t) const
{
    const double elapsed = std::clamp(t - start_time, 0.0, duration);
    return start_position + (speed * elapsed) * direction;
}

void ScanPattern::validate() const
{
    if (segments.empty())
        throw std::invalid_argument("scan pattern has no segments");
    if (!(hatch_spacing >= 0.0) || !(time_spacing >= 0.0) || !(layer_thickness >= 0.0))
        throw std::invalid_argument("hatch spacing, time spacing and layer thickness must be non-negative");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        segments[i].validate();
        if (i > 0 && segments[i].start_time < segments[i - 1].start_time)
            throw std::invalid_argument("segment start times must be non-decreasing");
    }
}

double ScanPattern::end_time() const
{
    double end = 0.0;
    for (const auto& s : segments)
        end = std::max(end, s.end_time());
    return end;
}

Vec3 ScanPattern::source_position(double t) const
{
    const TrackSegment* active = &segments.front();
    for (const auto& s : segments)
        if (s.start_time <= t)
            active = &s;
    return active->position_at(t);
}

ScanPattern ScanPattern::raster(const RasterSpec& spec)
{
    if (spec.tracks < 1)
        throw std::invalid_argument("raster needs at least one track");
    if (!(spec.track_length > 0.0) || !(spec.speed > 0.0))
        throw std::invalid_argument("raster track length and speed must be positive");

    ScanPattern p;
    p.hatch_spacing = spec.hatch_spacing;
    p.time_spacing = spec.time_spacing;
    p.layer_thickness = spec.layer_thickness;
    const double duration = spec.track_length / spec.speed;
    const int per_layer = spec.tracks_per_layer > 0 ? spec.tracks_per_layer : spec.tracks;
    const int last_layer = (spec.tracks - 1) / per_layer;
    double start = 0.0;
    for (int i = 0; i < spec.tracks; ++i) {
        TrackSegment s;
        s.start_time = start;
        const int layer = i / per_layer;
        const int lane = i % per_layer;
        s.start_position = {0.0, lane * spec.hatch_spacing, -(last_layer - layer) * spec.layer_thickness};
        s.direction = {1.0, 0.0, 0.0};
        s.speed = spec.speed;
        s.power = spec.power;
        s.duration = duration;
        p.segments.push_back(s);
        start += duration + spec.time_spacing;
    }
    return p;
}

double point_source_temperature_rise(double energy, const Vec3& source, double source_time, const Vec3& field,
                                     double t, double alpha, double rho_c)
{
    const double s = t - source_time;
    if (!(s > 0.0))
        throw std::domain_error("field time must follow the source release time");
    const double four_alpha_s = 4.0 * alpha * s;
    const Vec3 image{source.x, source.y, -source.z};
    const Vec3 d = field - source;
    const Vec3 di = field - image;
    const double kernel = std::exp(-dot(d, d) / four_alpha_s) + std::exp(-dot(di, di) / four_alpha_s);
    return energy / (rho_c * std::pow(pi * four_alpha_s, 1.5)) * kernel;
}

double segment_temperature_rise(const TrackSegment& seg, const Vec3& point, double t, const HeatSourceGeometry& geom,
                                double absorptivity, double alpha, double rho_c, const FieldOptions& opt)
{
    if (t <= seg.start_time || seg.power == 0.0)
        return 0.0;

    // Integrate over the age s = t - t' of each release.
    const double s_hi = t - seg.start_time;
    const double s_lo = std::max(0.0, t - seg.end_time());

    const Vec3 rel = point - seg.start_position;
    const Vec3 perp{-seg.direction.y, seg.direction.x, 0.0};
    const double along = rel.x * seg.direction.x + rel.y * seg.direction.y;
    const double cross = rel.x * perp.x + rel.y * perp.y;
    const double z = point.z;
    const double zs = seg.start_position.z;
    const double v = seg.speed;
    const double a2 = geom.a * geom.a;
    const double b2 = geom.b * geom.b;
    const double c2 = geom.c * geom.c;
    const double twelve_alpha = 12.0 * alpha;

    auto integrand = [&](double s) {
        const double ga = twelve_alpha * s + a2;
        const double gb = twelve_alpha * s + b2;
        const double gc = twelve_alpha * s + c2;
        const double dx = along - v * (s_hi - s);
        const double lateral = std::exp(-3.0 * (dx * dx / ga + cross * cross / gb));
        const double dz1 = z - zs;
        const double dz2 = z + zs;
        const double vertical = std::exp(-3.0 * dz1 * dz1 / gc) + std::exp(-3.0 * dz2 * dz2 / gc);
        return lateral * vertical / std::sqrt(ga * gb * gc);
    };

    // Panels: geometric in age (the kernel sharpens as s -> 0), plus the
    // instant the source passes the probe.
    std::vector<double> bp{s_lo, s_hi};
    const double s0 = std::min({a2, b2, c2}) / (4.0 * twelve_alpha);
    for (double k = s0; s_lo + k < s_hi; k *= 2.0)
        bp.push_back(s_lo + k);
    if (v > 0.0) {
        const double s_pass = s_hi - along / v;
        if (s_pass > s_lo && s_pass < s_hi) {
            const double width = std::sqrt((twelve_alpha * s_pass + a2) / 6.0) / v;
            for (double off : {-2.0 * width, 0.0, 2.0 * width}) {
                const double s = s_pass + off;
                if (s > s_lo && s < s_hi)
                    bp.push_back(s);
            }
        }
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

    const double prefactor = 3.0 * std::sqrt(3.0) * absorptivity * seg.power / (rho_c * pi * std::sqrt(pi));
    QuadratureOptions q = opt.quadrature;
    q.abs_tol = std::max(q.abs_tol, opt.abs_tol_kelvin / prefactor);
    return prefactor * integrate_adaptive(integrand, std::span<const double>(bp), q).value;
}

ThermalSample resolve_properties_selfconsistent(double initial_temperature,
                                                const std::function<double(const PropertyState&)>& rise_evaluator,
                                                const Material& mat, const FieldOptions& opt)
{
    auto g = [&](double temperature) { return rise_evaluator(properties_at(mat, temperature)); };

    double T = initial_temperature;
    for (int k = 1; k <= opt.max_property_iterations; ++k) {
        const PropertyState props = properties_at(mat, T);
        const double next = rise_evaluator(props);
        if (!std::isfinite(next))
            throw SimulationError("temperature evaluator returned a non-finite value");
        if (std::abs(next - T) < opt.property_tolerance)
            return {next, k, true, props};
        T = (k == 1) ? next : (1.0 - opt.relaxation) * T + opt.relaxation * next;
    }

    // No fixed point was reached. The latent-heat boxcar makes g jump at the
    // solidus and liquidus; if g steps across one of them the sample is held
    // there (partially molten material). Otherwise report the last iterate.
    for (double jump : {mat.t_solidus, mat.t_liquidus}) {
        const double delta = 1e-9 * jump;
        if (mat.latent_heat_fusion > 0.0 && g(jump - delta) >= jump && g(jump + delta) <= jump)
            return {jump, opt.max_property_iterations, false, properties_at(mat, jump)};
    }
    return {T, opt.max_property_iterations, false, properties_at(mat, T)};
}

namespace {

ThermalSample resolve(double ambient, const std::function<double(const PropertyState&)>& total,
                      const Material& mat, const FieldOptions& opt)
{
    if (opt.frozen_temperature) {
        const PropertyState props = properties_at(mat, *opt.frozen_temperature);
        return {total(props), 0, true, props};
    }
    return resolve_properties_selfconsistent(ambient, total, mat, opt);
}

} // namespace

ThermalSample single_track_temperature(const Vec3& point, double t, const HeatSourceGeometry& geom,
                                       const ProcessParameters& proc, const Material& mat, double absorptivity,
                                       const FieldOptions& opt)
{
    require_probe(point, t);
    TrackSegment seg;
    seg.speed = proc.speed;
    seg.power = proc.power;
    seg.duration = std::numeric_limits<double>::infinity();
    if (t == 0.0 || proc.power == 0.0)
        return {proc.ambient, 0, true, properties_at(mat, proc.ambient)};

    auto total = [&](const PropertyState& p) {
        return proc.ambient +
               segment_temperature_rise(seg, point, t, geom, absorptivity, p.diffusivity, mat.density * p.heat_capacity, opt);
    };
    return resolve(proc.ambient, total, mat, opt);
}

ThermalSample multi_track_temperature(const Vec3& point, double t, const ScanPattern& pattern,
                                      const HeatSourceGeometry& geom, const ProcessParameters& proc,
                                      const Material& mat, double absorptivity, const FieldOptions& opt)
{
    require_probe(point, t);
    if (pattern.segments.empty())
        throw std::invalid_argument("scan pattern has no segments");

    auto total = [&](const PropertyState& p) {
        double rise = 0.0;
        for (const auto& seg : pattern.segments)
            rise += segment_temperature_rise(seg, point, t, geom, absorptivity, p.diffusivity,
                                             mat.density * p.heat_capacity, opt);
        return proc.ambient + rise;
    };
    return resolve(proc.ambient, total, mat, opt);
}

double dimensionless_temperature(const DimensionlessGroups& groups, double xi, double psi, double lambda,
                                 double upper_limit, const QuadratureOptions& opt)
{
    if (!(upper_limit >= 0.0))
        throw std::domain_error("upper limit must be non-negative");
    if (upper_limit == 0.0)
        return 0.0;

    const double ua2 = groups.u_a * groups.u_a;
    const double ub2 = groups.u_b * groups.u_b;
    const double uc2 = groups.u_c * groups.u_c;
    auto integrand = [&](double tau) {
        const double ta = tau + ua2;
        const double tb = tau + ub2;
        const double tc = tau + uc2;
        const double a1 = std::exp(-(xi + tau) * (xi + tau) / (2.0 * tc) - psi * psi / (2.0 * ta) -
                                   lambda * lambda / (2.0 * tb));
        return a1 / std::sqrt(ta * tb * tc);
    };

    std::vector<double> bp{0.0};
    const double s0 = std::max(std::min({ua2, ub2, uc2}) / 4.0, upper_limit * 1e-12);
    for (double k = s0; k < upper_limit; k *= 2.0)
        bp.push_back(k);
    bp.push_back(upper_limit);
    return integrate_adaptive(integrand, std::span<const double>(bp), opt).value / std::sqrt(2.0 * pi);
}

} // namespace meltsim
