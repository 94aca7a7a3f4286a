#include "meltsim/meltpool.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

#include <tbb/parallel_for.h>

#include "meltsim/errors.hpp"

namespace meltsim {

namespace {

// Samples field(point(i, j)) for i < nu, j < nv into a row-major buffer.
template <class PointFn>
std::vector<double> sample_plane(const TemperatureField& field, double t, int nu, int nv, PointFn point)
{
    std::vector<double> out(static_cast<std::size_t>(nu) * nv);
    tbb::parallel_for(0, nu * nv, [&](int k) {
        const int i = k % nu;
        const int j = k / nu;
        out[k] = field(point(i, j), t);
    });
    return out;
}

// Boundary of the superlevel set on the segment inside -> outside.
Vec3 bisect_boundary(const TemperatureField& field, double t, double level, Vec3 inside, Vec3 outside, double tol)
{
    while (norm(outside - inside) > tol) {
        const Vec3 mid = 0.5 * (inside + outside);
        if (field(mid, t) >= level)
            inside = mid;
        else
            outside = mid;
    }
    return 0.5 * (inside + outside);
}

struct Plane2 {
    int nu = 0;
    int nv = 0;
    std::vector<double> values;
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nu + i]; }
};

// Melted samples whose outward neighbour along u (direction +1 / -1) is not
// melted, restricted to lines within one cell of the most extreme one.
std::vector<std::pair<int, int>> extreme_cells_u(const Plane2& g, double level, int direction)
{
    std::vector<std::pair<int, int>> line_extreme; // (j, i)
    for (int j = 0; j < g.nv; ++j) {
        std::optional<int> best;
        for (int i = 0; i < g.nu; ++i)
            if (g.at(i, j) >= level && (!best || (direction > 0 ? i > *best : i < *best)))
                best = i;
        if (best)
            line_extreme.emplace_back(j, *best);
    }
    if (line_extreme.empty())
        return {};
    int extreme = line_extreme.front().second;
    for (auto [j, i] : line_extreme)
        extreme = direction > 0 ? std::max(extreme, i) : std::min(extreme, i);
    std::vector<std::pair<int, int>> out;
    for (auto [j, i] : line_extreme)
        if (std::abs(i - extreme) <= 1)
            out.emplace_back(i, j);
    return out;
}

std::vector<std::pair<int, int>> extreme_cells_v(const Plane2& g, double level, int direction)
{
    Plane2 transposed{g.nv, g.nu, std::vector<double>(g.values.size())};
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i)
            transposed.values[static_cast<std::size_t>(i) * g.nv + j] = g.at(i, j);
    auto cells = extreme_cells_u(transposed, level, direction);
    for (auto& [a, b] : cells)
        std::swap(a, b);
    return cells;
}

} // namespace

MeltPoolDimensions melt_pool_dimensions(const TemperatureField& field, double t, double melt_temperature,
                                        const SearchBox& box_in, const ExtractionOptions& opt)
{
    if (!std::isfinite(melt_temperature))
        throw std::domain_error("melting temperature must be finite");
    if (opt.samples_per_axis < 2)
        throw std::invalid_argument("extraction needs at least 2 samples per axis");
    SearchBox box = box_in;
    box.hi.z = std::min(box.hi.z, 0.0);
    if (!(box.lo.x < box.hi.x && box.lo.y < box.hi.y && box.lo.z < box.hi.z))
        throw std::invalid_argument("search box is empty");

    const int n = opt.samples_per_axis;
    const GridAxis ax{box.lo.x, box.hi.x, n};
    const GridAxis ay{box.lo.y, box.hi.y, n};
    const GridAxis az{box.lo.z, box.hi.z, n};
    const double top_z = box.hi.z;
    const double level = melt_temperature;

    Plane2 top{n, n, sample_plane(field, t, n, n, [&](int i, int j) { return Vec3{ax.at(i), ay.at(j), top_z}; })};

    // Peak: best coarse sample, then a compass search on the top plane.
    auto best = std::max_element(top.values.begin(), top.values.end());
    const auto best_k = static_cast<int>(best - top.values.begin());
    Vec3 peak{ax.at(best_k % n), ay.at(best_k / n), top_z};
    double peak_t = *best;
    {
        double hx = ax.step();
        double hy = ay.step();
        const double stop = 1e-3 * std::min(hx, hy);
        while (std::min(hx, hy) > stop) {
            bool moved = false;
            for (Vec3 d : {Vec3{hx, 0, 0}, Vec3{-hx, 0, 0}, Vec3{0, hy, 0}, Vec3{0, -hy, 0}}) {
                Vec3 p = peak + d;
                if (p.x < box.lo.x || p.x > box.hi.x || p.y < box.lo.y || p.y > box.hi.y)
                    continue;
                const double v = field(p, t);
                if (v > peak_t) {
                    peak_t = v;
                    peak = p;
                    moved = true;
                }
            }
            if (!moved) {
                hx *= 0.5;
                hy *= 0.5;
            }
        }
    }

    MeltPoolDimensions out;
    out.peak_temperature = peak_t;
    out.peak_position = peak;

    Plane2 side{n, n, sample_plane(field, t, n, n, [&](int i, int k) { return Vec3{ax.at(i), peak.y, az.at(k)}; })};

    const bool top_melted = std::any_of(top.values.begin(), top.values.end(), [&](double v) { return v >= level; });
    const bool side_melted = std::any_of(side.values.begin(), side.values.end(), [&](double v) { return v >= level; });
    if (!top_melted && !side_melted && peak_t < level)
        return out;
    out.melted = true;

    // Clipping: melt on any box face other than the free surface.
    for (int q = 0; q < n; ++q) {
        const bool clipped = top.at(0, q) >= level || top.at(n - 1, q) >= level || top.at(q, 0) >= level ||
                             top.at(q, n - 1) >= level || side.at(0, q) >= level || side.at(n - 1, q) >= level ||
                             side.at(q, 0) >= level;
        if (clipped)
            throw SearchBoxClipped("melt-pool isotherm touches the search box boundary; use a larger search box");
    }

    const double tol = opt.bisection_tolerance;
    auto refine = [&](const std::vector<std::pair<int, int>>& cells, auto to_point, int di, int dj, auto coord,
                      bool maximise) {
        double extreme = maximise ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        for (auto [i, j] : cells) {
            const Vec3 inside = to_point(i, j);
            const Vec3 outside = to_point(i + di, j + dj);
            const double c = coord(bisect_boundary(field, t, level, inside, outside, tol));
            extreme = maximise ? std::max(extreme, c) : std::min(extreme, c);
        }
        return extreme;
    };
    auto top_point = [&](int i, int j) { return Vec3{ax.at(i), ay.at(j), top_z}; };
    auto side_point = [&](int i, int k) { return Vec3{ax.at(i), peak.y, az.at(k)}; };
    auto get_x = [](const Vec3& p) { return p.x; };
    auto get_y = [](const Vec3& p) { return p.y; };
    auto get_z = [](const Vec3& p) { return p.z; };

    if (!top_melted) {
        // Pool smaller than one coarse cell: march out from the peak.
        auto edge = [&](Vec3 step, auto coord) {
            Vec3 inside = peak;
            Vec3 outside = peak + step;
            while (field(outside, t) >= level) {
                inside = outside;
                outside = outside + step;
            }
            return coord(bisect_boundary(field, t, level, inside, outside, tol));
        };
        out.length = edge({ax.step(), 0, 0}, get_x) - edge({-ax.step(), 0, 0}, get_x);
        out.width = edge({0, ay.step(), 0}, get_y) - edge({0, -ay.step(), 0}, get_y);
        out.depth = top_z - edge({0, 0, -az.step()}, get_z);
        return out;
    }

    const double x_max = refine(extreme_cells_u(top, level, +1), top_point, +1, 0, get_x, true);
    const double x_min = refine(extreme_cells_u(top, level, -1), top_point, -1, 0, get_x, false);
    const double y_max = refine(extreme_cells_v(top, level, +1), top_point, 0, +1, get_y, true);
    const double y_min = refine(extreme_cells_v(top, level, -1), top_point, 0, -1, get_y, false);
    out.length = x_max - x_min;
    out.width = y_max - y_min;

    if (side_melted) {
        const double z_min = refine(extreme_cells_v(side, level, -1), side_point, 0, -1, get_z, false);
        // The surface row is melted whenever the top plane is.
        out.depth = top_z - z_min;
    }
    else {
        Vec3 inside = peak;
        Vec3 outside = peak + Vec3{0, 0, -az.step()};
        out.depth = top_z - bisect_boundary(field, t, level, inside, outside, tol).z;
    }
    return out;
}

SearchBox default_search_box(const HeatSourceGeometry& geom, const Vec3& source)
{
    const Vec3 half{3.0 * geom.a, 3.0 * geom.b, 3.0 * geom.c};
    SearchBox box{source - half, source + half};
    box.hi.z = std::min(box.hi.z, 0.0);
    return box;
}

MeltPoolDimensions measure_melt_pool(const TemperatureField& field, double t, double melt_temperature,
                                     const HeatSourceGeometry& geom, const Vec3& source_position,
                                     const ExtractionOptions& opt)
{
    HeatSourceGeometry extent = geom;
    for (int attempt = 0;; ++attempt) {
        try {
            return melt_pool_dimensions(field, t, melt_temperature, default_search_box(extent, source_position), opt);
        } catch (const SearchBoxClipped&) {
            if (attempt >= opt.max_box_doublings)
                throw;
            extent = {2.0 * extent.a, 2.0 * extent.b, 2.0 * extent.c};
        }
    }
}

Plane plane_from_string(const std::string& name)
{
    if (name == "top")
        return Plane::top;
    if (name == "side")
        return Plane::side;
    throw std::invalid_argument("unknown plane '" + name + "' (expected top or side)");
}

std::string to_string(Plane plane) { return plane == Plane::top ? "top" : "side"; }

Vec3 ContourGrid::point(int i, int j) const
{
    if (plane == Plane::top)
        return {u.at(i), v.at(j), fixed};
    return {u.at(i), fixed, v.at(j)};
}

double ContourGrid::max_temperature() const { return *std::max_element(temperatures.begin(), temperatures.end()); }
double ContourGrid::min_temperature() const { return *std::min_element(temperatures.begin(), temperatures.end()); }

ContourGrid contour_grid(const TemperatureField& field, double t, Plane plane, const GridAxis& u, const GridAxis& v,
                         double fixed)
{
    if (u.count < 2 || v.count < 2)
        throw std::invalid_argument("contour grid needs at least 2 samples per axis");
    if (!(u.max > u.min && v.max > v.min))
        throw std::invalid_argument("contour grid bounds are empty");
    ContourGrid g;
    g.plane = plane;
    g.u = u;
    g.v = v;
    g.fixed = fixed;
    g.probe_time = t;
    g.temperatures = sample_plane(field, t, u.count, v.count, [&](int i, int j) { return g.point(i, j); });
    return g;
}

namespace {

struct EdgeHit {
    long key;
    Point2 at;
};

} // namespace

std::vector<Isoline> isotherm_polyline(const ContourGrid& grid, double level)
{
    if (!std::isfinite(level))
        throw std::domain_error("isotherm level must be finite");
    const int nu = grid.u.count;
    const int nv = grid.v.count;

    // Grid edges are keyed by their lower-left node and orientation.
    auto h_key = [&](int i, int j) { return 2L * (static_cast<long>(j) * nu + i); };
    auto v_key = [&](int i, int j) { return 2L * (static_cast<long>(j) * nu + i) + 1; };
    auto cross = [&](double fa, double fb, Point2 pa, Point2 pb) {
        const double w = (level - fa) / (fb - fa);
        return Point2{pa.u + w * (pb.u - pa.u), pa.v + w * (pb.v - pa.v)};
    };

    std::vector<std::pair<EdgeHit, EdgeHit>> segments;
    for (int j = 0; j + 1 < nv; ++j) {
        for (int i = 0; i + 1 < nu; ++i) {
            const double f00 = grid.value(i, j), f10 = grid.value(i + 1, j);
            const double f11 = grid.value(i + 1, j + 1), f01 = grid.value(i, j + 1);
            const Point2 p00{grid.u.at(i), grid.v.at(j)}, p10{grid.u.at(i + 1), grid.v.at(j)};
            const Point2 p11{grid.u.at(i + 1), grid.v.at(j + 1)}, p01{grid.u.at(i), grid.v.at(j + 1)};
            const int mask = (f00 >= level ? 1 : 0) | (f10 >= level ? 2 : 0) | (f11 >= level ? 4 : 0) |
                             (f01 >= level ? 8 : 0);
            if (mask == 0 || mask == 15)
                continue;

            const EdgeHit bottom{h_key(i, j), {}}, top{h_key(i, j + 1), {}};
            const EdgeHit left{v_key(i, j), {}}, right{v_key(i + 1, j), {}};
            auto b = [&] { return EdgeHit{bottom.key, cross(f00, f10, p00, p10)}; };
            auto r = [&] { return EdgeHit{right.key, cross(f10, f11, p10, p11)}; };
            auto tp = [&] { return EdgeHit{top.key, cross(f01, f11, p01, p11)}; };
            auto l = [&] { return EdgeHit{left.key, cross(f00, f01, p00, p01)}; };

            switch (mask) {
            case 1: case 14: segments.emplace_back(l(), b()); break;
            case 2: case 13: segments.emplace_back(b(), r()); break;
            case 3: case 12: segments.emplace_back(l(), r()); break;
            case 4: case 11: segments.emplace_back(r(), tp()); break;
            case 6: case 9: segments.emplace_back(b(), tp()); break;
            case 7: case 8: segments.emplace_back(l(), tp()); break;
            case 5: case 10: {
                // Saddle: the cell centre decides which corners connect.
                const bool centre_above = 0.25 * (f00 + f10 + f11 + f01) >= level;
                if ((mask == 5) == centre_above) {
                    segments.emplace_back(l(), tp());
                    segments.emplace_back(b(), r());
                }
                else {
                    segments.emplace_back(l(), b());
                    segments.emplace_back(r(), tp());
                }
                break;
            }
            default: break;
            }
        }
    }

    // Link segments sharing a grid edge into chains.
    std::map<long, std::vector<std::size_t>> by_edge;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        by_edge[segments[s].first.key].push_back(s);
        by_edge[segments[s].second.key].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);

    auto walk = [&](std::size_t start, long from_key) {
        Isoline line;
        std::size_t s = start;
        long key = from_key;
        const auto& first = segments[s];
        line.points.push_back(first.first.key == key ? first.first.at : first.second.at);
        while (true) {
            used[s] = true;
            const auto& seg = segments[s];
            const EdgeHit& exit = seg.first.key == key ? seg.second : seg.first;
            line.points.push_back(exit.at);
            key = exit.key;
            std::optional<std::size_t> next;
            for (std::size_t cand : by_edge[key])
                if (!used[cand])
                    next = cand;
            if (!next) {
                line.closed = key == from_key && line.points.size() > 2;
                break;
            }
            s = *next;
        }
        if (line.closed)
            line.points.back() = line.points.front();
        return line;
    };

    std::vector<Isoline> lines;
    // Open chains start at edges touched once (grid boundary).
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s])
            continue;
        for (long key : {segments[s].first.key, segments[s].second.key}) {
            if (!used[s] && by_edge[key].size() == 1)
                lines.push_back(walk(s, key));
        }
    }
    for (std::size_t s = 0; s < segments.size(); ++s)
        if (!used[s])
            lines.push_back(walk(s, segments[s].first.key));
    return lines;
}

double enclosed_area(const Isoline& line)
{
    if (!line.closed || line.points.size() < 4)
        return 0.0;
    double twice = 0.0;
    for (std::size_t k = 0; k + 1 < line.points.size(); ++k)
        twice += line.points[k].u * line.points[k + 1].v - line.points[k + 1].u * line.points[k].v;
    return 0.5 * std::abs(twice);
}

} // namespace meltsim
