#pragma once

// Uniform node grids over a box Ω ⊂ R^n (n = 2, 3) with node roles
// interior/boundary/excluded, the singular-set geometry (points and
// segments), and the active-edge list used by the discrete energy.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace harmap {

struct SingularComponent {
    enum class Kind { Point, Segment } kind = Kind::Point;
    std::array<double, 3> a{0, 0, 0};  // point position, or segment start
    std::array<double, 3> b{0, 0, 0};  // segment end (kind == Segment)
    double density = 1.0;
    std::vector<double> w;  // target offset ∈ R^{m−1}

    double length() const {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += (b[k] - a[k]) * (b[k] - a[k]);
        return std::sqrt(s);
    }
};

// distance from x to the component (point or segment)
inline double dist_to_component(const SingularComponent& c, const std::array<double, 3>& x,
                                int n) {
    if (c.kind == SingularComponent::Kind::Point) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += (x[k] - c.a[k]) * (x[k] - c.a[k]);
        return std::sqrt(s);
    }
    const double L = c.length();
    std::array<double, 3> d{};
    for (int k = 0; k < 3; ++k) d[k] = (c.b[k] - c.a[k]) / L;
    double t = 0.0;
    for (int k = 0; k < 3; ++k) t += (x[k] - c.a[k]) * d[k];
    t = std::min(std::max(t, 0.0), L);
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double dk = x[k] - c.a[k] - t * d[k];
        s += dk * dk;
    }
    return std::sqrt(s);
}

enum class NodeRole : std::uint8_t { Interior, Boundary, Excluded };

struct GridSpec {
    int n = 2;
    std::array<double, 3> lo{0, 0, 0}, hi{0, 0, 0};
    double h = 0.0;
    std::array<int, 3> dims{1, 1, 1};  // node counts per axis
};

struct Edge {
    std::int32_t a = 0, b = 0;  // node ids, b = a + stride(axis)
};

struct Grid {
    GridSpec spec;
    std::vector<NodeRole> role;
    std::vector<double> dist_sigma;        // distance to Σ (+inf when Σ = ∅)
    std::vector<std::int32_t> nearest_comp;  // index of nearest component (−1 if none)
    std::vector<Edge> edges;               // both endpoints non-excluded

    long node_count() const { return static_cast<long>(role.size()); }

    long index(int i, int j, int k = 0) const {
        return (static_cast<long>(k) * spec.dims[1] + j) * spec.dims[0] + i;
    }
    std::array<int, 3> multi_index(long id) const {
        std::array<int, 3> r{};
        r[0] = static_cast<int>(id % spec.dims[0]);
        id /= spec.dims[0];
        r[1] = static_cast<int>(id % spec.dims[1]);
        r[2] = static_cast<int>(id / spec.dims[1]);
        return r;
    }
    std::array<double, 3> coords(long id) const {
        const auto m = multi_index(id);
        std::array<double, 3> x{0, 0, 0};
        for (int k = 0; k < spec.n; ++k) x[k] = spec.lo[k] + m[k] * spec.h;
        return x;
    }
    long stride(int axis) const {
        if (axis == 0) return 1;
        if (axis == 1) return spec.dims[0];
        return static_cast<long>(spec.dims[0]) * spec.dims[1];
    }
    bool is_active(long id) const { return role[id] != NodeRole::Excluded; }
};

// Grid construction.  Nodes within h/2 of Σ are excluded; each component
// must exclude at least one node (otherwise the grid cannot resolve it) and
// must stay clear of ∂Ω.
inline Grid build_grid(const GridSpec& box, const std::vector<SingularComponent>& comps) {
    if (box.n != 2 && box.n != 3) throw std::invalid_argument("build_grid: n must be 2 or 3");
    if (box.h <= 0.0) throw std::invalid_argument("build_grid: h must be positive");
    Grid g;
    g.spec = box;
    for (int k = 0; k < box.n; ++k) {
        const double len = box.hi[k] - box.lo[k];
        const double cells = len / box.h;
        const long nc = std::lround(cells);
        if (nc < 2 || std::abs(cells - nc) > 1e-9 * std::max(1.0, cells))
            throw std::invalid_argument("build_grid: h must divide the box edges");
        g.spec.dims[k] = static_cast<int>(nc) + 1;
    }
    for (int k = box.n; k < 3; ++k) g.spec.dims[k] = 1;

    long total = 1;
    for (int k = 0; k < 3; ++k) total *= g.spec.dims[k];
    g.role.assign(total, NodeRole::Interior);
    g.dist_sigma.assign(total, std::numeric_limits<double>::infinity());
    g.nearest_comp.assign(total, -1);

    // component sanity: inside Ω, clear of ∂Ω
    for (const auto& c : comps) {
        for (const std::array<double, 3>& p :
             {c.a, c.kind == SingularComponent::Kind::Segment ? c.b : c.a}) {
            for (int k = 0; k < box.n; ++k)
                if (p[k] <= box.lo[k] + box.h - 1e-12 || p[k] >= box.hi[k] - box.h + 1e-12)
                    throw std::invalid_argument(
                        "build_grid: singular component touches the domain boundary");
        }
    }

    std::vector<long> excluded_per_comp(comps.size(), 0);
    for (long id = 0; id < total; ++id) {
        const auto m = g.multi_index(id);
        bool bd = false;
        for (int k = 0; k < box.n; ++k)
            if (m[k] == 0 || m[k] == g.spec.dims[k] - 1) bd = true;
        const auto x = g.coords(id);
        for (size_t ci = 0; ci < comps.size(); ++ci) {
            const double d = dist_to_component(comps[ci], x, box.n);
            if (d < g.dist_sigma[id]) {
                g.dist_sigma[id] = d;
                g.nearest_comp[id] = static_cast<std::int32_t>(ci);
            }
        }
        if (!comps.empty() && g.dist_sigma[id] <= 0.5 * box.h) {
            if (bd)
                throw std::invalid_argument(
                    "build_grid: singular component touches the domain boundary");
            g.role[id] = NodeRole::Excluded;
            ++excluded_per_comp[g.nearest_comp[id]];
        } else if (bd) {
            g.role[id] = NodeRole::Boundary;
        }
    }
    for (size_t ci = 0; ci < comps.size(); ++ci)
        if (excluded_per_comp[ci] == 0)
            throw std::invalid_argument(
                "build_grid: component " + std::to_string(ci + 1) +
                " excludes no node; place it within h/2 of a node or refine h");

    // active edges (axis-aligned, both endpoints non-excluded)
    for (int axis = 0; axis < box.n; ++axis) {
        const long s = g.stride(axis);
        for (long id = 0; id < total; ++id) {
            const auto m = g.multi_index(id);
            if (m[axis] + 1 >= g.spec.dims[axis]) continue;
            if (g.is_active(id) && g.is_active(id + s))
                g.edges.push_back({static_cast<std::int32_t>(id), static_cast<std::int32_t>(id + s)});
        }
    }
    return g;
}

// minimum distance from Σ to ∂Ω (restricted to component sample points:
// exact for points; for segments both ends and the closest interior point)
inline double sigma_boundary_separation(const GridSpec& box,
                                        const std::vector<SingularComponent>& comps) {
    double sep = std::numeric_limits<double>::infinity();
    auto bdist = [&](const std::array<double, 3>& p) {
        double d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < box.n; ++k) d = std::min({d, p[k] - box.lo[k], box.hi[k] - p[k]});
        return d;
    };
    for (const auto& c : comps) {
        sep = std::min(sep, bdist(c.a));
        if (c.kind == SingularComponent::Kind::Segment) sep = std::min(sep, bdist(c.b));
    }
    return sep;
}

inline double min_pairwise_separation(const std::vector<SingularComponent>& comps, int n) {
    double sep = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < comps.size(); ++i)
        for (size_t j = i + 1; j < comps.size(); ++j) {
            // sampled separation (exact for point-point)
            double d;
            if (comps[i].kind == SingularComponent::Kind::Point)
                d = dist_to_component(comps[j], comps[i].a, n);
            else if (comps[j].kind == SingularComponent::Kind::Point)
                d = dist_to_component(comps[i], comps[j].a, n);
            else {
                d = std::min(
                    std::min(dist_to_component(comps[j], comps[i].a, n),
                             dist_to_component(comps[j], comps[i].b, n)),
                    std::min(dist_to_component(comps[i], comps[j].a, n),
                             dist_to_component(comps[i], comps[j].b, n)));
            }
            sep = std::min(sep, d);
        }
    return sep;
}

}  // namespace harmap
