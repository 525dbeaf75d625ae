#pragma once

// The renormalized discrete energy
//   F(û, v) = Σ_{active edges} h^{n−2} [ (Δû)² + Q_{φ̄}(Δv) ],
// with φ̄ the edge-midpoint average of (u₀ + û, v), its analytic gradient,
// the Euler–Lagrange residual, the blended boundary extension, logarithmic
// cutoffs, and the weighted Poincaré check.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "harmap/field.hpp"
#include "harmap/grid.hpp"
#include "harmap/linsolve.hpp"
#include "harmap/metric.hpp"

namespace harmap {

namespace detail {

// Edge range [begin, end) contributions to F.
inline double energy_range(const Grid& g, const QForm& q, const std::vector<double>& u0,
                           const MapField& f, size_t begin, size_t end) {
    const int vd = f.vdim;
    const double scale = std::pow(g.spec.h, g.spec.n - 2);
    std::vector<double> vm(vd), dv(vd);
    double acc = 0.0;
    for (size_t e = begin; e < end; ++e) {
        const long a = g.edges[e].a, b = g.edges[e].b;
        const double du = f.uhat[b] - f.uhat[a];
        const double um = 0.5 * (u0[a] + f.uhat[a] + u0[b] + f.uhat[b]);
        const double *va = f.v_at(a), *vb = f.v_at(b);
        for (int c = 0; c < vd; ++c) {
            vm[c] = 0.5 * (va[c] + vb[c]);
            dv[c] = vb[c] - va[c];
        }
        acc += scale * (du * du + q.value(um, vm, dv));
    }
    return acc;
}

inline void grad_range(const Grid& g, const QForm& q, const std::vector<double>& u0,
                       const MapField& f, size_t begin, size_t end, MapField& out) {
    const int vd = f.vdim;
    const double scale = std::pow(g.spec.h, g.spec.n - 2);
    std::vector<double> vm(vd), dv(vd), gv(vd), gxi(vd);
    for (size_t e = begin; e < end; ++e) {
        const long a = g.edges[e].a, b = g.edges[e].b;
        const double du = f.uhat[b] - f.uhat[a];
        const double um = 0.5 * (u0[a] + f.uhat[a] + u0[b] + f.uhat[b]);
        const double *va = f.v_at(a), *vb = f.v_at(b);
        for (int c = 0; c < vd; ++c) {
            vm[c] = 0.5 * (va[c] + vb[c]);
            dv[c] = vb[c] - va[c];
        }
        double gu = 0.0;
        std::fill(gv.begin(), gv.end(), 0.0);
        std::fill(gxi.begin(), gxi.end(), 0.0);
        q.add_grad(um, vm, dv, scale, &gu, gv.data(), gxi.data());
        out.uhat[a] += -2.0 * scale * du + 0.5 * gu;
        out.uhat[b] += 2.0 * scale * du + 0.5 * gu;
        double *ga = out.v_at(a), *gb = out.v_at(b);
        for (int c = 0; c < vd; ++c) {
            ga[c] += -gxi[c] + 0.5 * gv[c];
            gb[c] += gxi[c] + 0.5 * gv[c];
        }
    }
}

// Fixed chunking: results are deterministic for a given worker count
// (chunks are combined in index order).
inline std::vector<size_t> chunk_bounds(size_t total, int workers) {
    const int w = std::max(1, workers);
    std::vector<size_t> b(w + 1);
    for (int i = 0; i <= w; ++i) b[i] = total * static_cast<size_t>(i) / w;
    return b;
}

}  // namespace detail

inline double discrete_F(const Grid& g, const QForm& q, const std::vector<double>& u0,
                         const MapField& f, int workers = 1) {
    const auto bounds = detail::chunk_bounds(g.edges.size(), workers);
    if (workers <= 1) return detail::energy_range(g, q, u0, f, 0, g.edges.size());
    std::vector<double> partial(bounds.size() - 1, 0.0);
    std::vector<std::thread> pool;
    for (size_t i = 0; i + 1 < bounds.size(); ++i)
        pool.emplace_back([&, i] {
            partial[i] = detail::energy_range(g, q, u0, f, bounds[i], bounds[i + 1]);
        });
    for (auto& t : pool) t.join();
    double acc = 0.0;
    for (const double p : partial) acc += p;  // ordered reduction
    return acc;
}

// Gradient of F w.r.t. nodal (û, v); zero at boundary and excluded nodes.
inline void grad_F(const Grid& g, const QForm& q, const std::vector<double>& u0,
                   const MapField& f, MapField& out, int workers = 1) {
    out.vdim = f.vdim;
    out.uhat.assign(f.uhat.size(), 0.0);
    out.v.assign(f.v.size(), 0.0);
    if (workers <= 1) {
        detail::grad_range(g, q, u0, f, 0, g.edges.size(), out);
    } else {
        const auto bounds = detail::chunk_bounds(g.edges.size(), workers);
        std::vector<MapField> partial(bounds.size() - 1);
        std::vector<std::thread> pool;
        for (size_t i = 0; i + 1 < bounds.size(); ++i)
            pool.emplace_back([&, i] {
                partial[i] = MapField::zeros(g, f.vdim);
                detail::grad_range(g, q, u0, f, bounds[i], bounds[i + 1], partial[i]);
            });
        for (auto& t : pool) t.join();
        for (const auto& p : partial) {  // ordered reduction
            for (size_t i = 0; i < out.uhat.size(); ++i) out.uhat[i] += p.uhat[i];
            for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += p.v[i];
        }
    }
    for (long id = 0; id < g.node_count(); ++id) {
        if (g.role[id] == NodeRole::Interior) continue;
        out.uhat[id] = 0.0;
        double* gv = out.v_at(id);
        for (int c = 0; c < f.vdim; ++c) gv[c] = 0.0;
    }
}

// max-norm of the gradient over interior nodes, scaled by h^{−n}
inline double el_residual(const Grid& g, const QForm& q, const std::vector<double>& u0,
                          const MapField& f, int workers = 1) {
    MapField grad;
    grad_F(g, q, u0, f, grad, workers);
    double mx = 0.0;
    for (const double x : grad.uhat) mx = std::max(mx, std::abs(x));
    for (const double x : grad.v) mx = std::max(mx, std::abs(x));
    return mx * std::pow(g.spec.h, -g.spec.n);
}

// ----------------------------------------------------- boundary extension

struct BoundaryData {
    std::vector<double> u;  // per node; meaningful at boundary nodes
    std::vector<double> v;  // node-major, vdim per node
    int vdim = 0;
};

inline double smoothstep(double t) {
    t = std::min(std::max(t, 0.0), 1.0);
    return t * t * (3.0 - 2.0 * t);
}

// Extension of the boundary data ψ that equals (û, v) = (0, w_i) within
// ρ/2 of Σ_i: discrete-harmonic extension of ψ blended by a smoothstep of
// the distance to Σ.
inline MapField boundary_extension(const Grid& g, const std::vector<SingularComponent>& comps,
                                   const BoundaryData& psi, double rho = 0.0) {
    const int vd = psi.vdim;
    const double sep = comps.empty() ? std::numeric_limits<double>::infinity()
                                     : sigma_boundary_separation(g.spec, comps);
    const double pair_sep =
        comps.size() >= 2 ? min_pairwise_separation(comps, g.spec.n)
                          : std::numeric_limits<double>::infinity();
    if (rho <= 0.0) rho = 0.5 * std::min(sep, pair_sep);
    if (rho > sep)
        throw std::invalid_argument(
            "boundary_extension: blend radius exceeds the separation between the singular set "
            "and the domain boundary");
    if (rho > pair_sep)
        throw std::invalid_argument(
            "boundary_extension: blend radius exceeds the separation between components");

    // discrete-harmonic extension of every component of ψ
    MapField f = MapField::zeros(g, vd);
    std::vector<char> mask(g.node_count(), 0);
    for (long id = 0; id < g.node_count(); ++id)
        if (g.role[id] != NodeRole::Boundary) mask[id] = 1;
    std::vector<double> x(g.node_count(), 0.0);
    for (int comp = 0; comp < 1 + vd; ++comp) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (long id = 0; id < g.node_count(); ++id) {
            if (g.role[id] != NodeRole::Boundary) continue;
            const double val = comp == 0 ? psi.u[id] : psi.v[id * vd + comp - 1];
            lo = std::min(lo, val);
            hi = std::max(hi, val);
        }
        if (lo == hi) {
            // the harmonic extension of a constant is that constant, exactly
            std::fill(x.begin(), x.end(), lo);
        } else {
            for (long id = 0; id < g.node_count(); ++id)
                x[id] = (g.role[id] == NodeRole::Boundary)
                            ? (comp == 0 ? psi.u[id] : psi.v[id * vd + comp - 1])
                            : 0.0;
            solve_laplace_dirichlet(g, mask, x);
        }
        for (long id = 0; id < g.node_count(); ++id) {
            if (comp == 0)
                f.uhat[id] = x[id];
            else
                f.v_at(id)[comp - 1] = x[id];
        }
    }
    if (comps.empty()) return f;

    for (long id = 0; id < g.node_count(); ++id) {
        const double d = g.dist_sigma[id];
        const int ci = g.nearest_comp[id];
        const double s = smoothstep((d - 0.5 * rho) / (0.5 * rho));
        if (s >= 1.0) continue;
        f.uhat[id] *= s;
        double* v = f.v_at(id);
        for (int c = 0; c < vd; ++c) v[c] = (1.0 - s) * comps[ci].w[c] + s * v[c];
    }
    return f;
}

// ----------------------------------------------------------- log cutoffs

// χ_ε(x) = clamp(2 − log dist(x,Σ)/log ε, [0,1]): 0 inside r ≤ ε², 1 outside
// r ≥ ε.  Requires the inner plateau to be resolved by the grid.
inline std::vector<double> log_cutoff(const Grid& g, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("log_cutoff: need 0 < eps < 1");
    if (eps * eps < 2.0 * g.spec.h)
        throw std::invalid_argument("log_cutoff: eps^2 below grid resolution (< 2h)");
    std::vector<double> chi(g.node_count(), 0.0);
    const double le = std::log(eps);
    for (long id = 0; id < g.node_count(); ++id) {
        const double r = g.dist_sigma[id];
        if (r <= 0.0) continue;
        chi[id] = std::min(1.0, std::max(0.0, 2.0 - std::log(r) / le));
    }
    return chi;
}

// Dirichlet energy Σ h^{n−2}(Δχ)² of a nodal scalar over active edges
inline double dirichlet_energy(const Grid& g, const std::vector<double>& chi) {
    const double scale = std::pow(g.spec.h, g.spec.n - 2);
    double acc = 0.0;
    for (const auto& e : g.edges) {
        const double d = chi[e.b] - chi[e.a];
        acc += scale * d * d;
    }
    return acc;
}

// ------------------------------------------------------ weighted Poincaré

struct PoincareResult {
    double lhs = 0.0;  // Σ h^n Q_{φ₀}(v) ‖∇u₀‖²
    double rhs = 0.0;  // a⁻² Σ h^{n−2} Q_{φ₀}(Δv)
};

// v must vanish on ∂Ω and near Σ (its support must have a complete interior
// stencil); φ₀ = (u₀, w of the nearest component).
inline PoincareResult poincare_check(const Grid& g, const QForm& q,
                                     const std::vector<double>& u0,
                                     const std::vector<SingularComponent>& comps,
                                     const MapField& vf) {
    const int vd = vf.vdim;
    const double h = g.spec.h;
    PoincareResult r;
    std::vector<double> w0(vd, 0.0);
    const double hn = std::pow(h, g.spec.n);
    for (long id = 0; id < g.node_count(); ++id) {
        const double* v = vf.v_at(id);
        double vn = 0.0;
        for (int c = 0; c < vd; ++c) vn += v[c] * v[c];
        if (vn == 0.0) continue;
        if (g.role[id] != NodeRole::Interior)
            throw std::invalid_argument("poincare_check: v must vanish on the boundary");
        const auto m = g.multi_index(id);
        double grad2 = 0.0;
        for (int axis = 0; axis < g.spec.n; ++axis) {
            const long st = g.stride(axis);
            if (m[axis] <= 0 || m[axis] + 1 >= g.spec.dims[axis] || !g.is_active(id - st) ||
                !g.is_active(id + st))
                throw std::invalid_argument("poincare_check: v must vanish near Σ");
            const double d = (u0[id + st] - u0[id - st]) / (2.0 * h);
            grad2 += d * d;
        }
        const int ci = g.nearest_comp[id];
        const std::vector<double>& w = ci >= 0 ? comps[ci].w : w0;
        r.lhs += hn * q.value(u0[id], w, std::span<const double>(v, vd)) * grad2;
    }
    const double scale = std::pow(h, g.spec.n - 2);
    const double a = q.params().curv_a();
    for (const auto& e : g.edges) {
        const double* va = vf.v_at(e.a);
        const double* vb = vf.v_at(e.b);
        bool zero = true;
        for (int c = 0; c < vd; ++c)
            if (va[c] != 0.0 || vb[c] != 0.0) zero = false;
        if (zero) continue;
        std::vector<double> dv(vd);
        for (int c = 0; c < vd; ++c) dv[c] = vb[c] - va[c];
        const double um = 0.5 * (u0[e.a] + u0[e.b]);
        const int ci = g.nearest_comp[e.a];
        const std::vector<double>& w = ci >= 0 ? comps[ci].w : w0;
        r.rhs += scale / (a * a) * q.value(um, w, dv);
    }
    return r;
}

}  // namespace harmap
