#pragma once

// Matrix-free conjugate-gradient solve of the discrete Dirichlet problem
//   (Δ_h x)_i = 0   at unknown nodes,   x = data at the remaining nodes,
// where Δ_h is the standard (2n+1)-point stencil on the uniform grid.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "harmap/grid.hpp"

namespace harmap {

// Solve for the nodes with mask[i] == true; x must carry the Dirichlet data
// at the unmasked nodes on entry (its masked entries serve as the initial
// guess).  Converges the relative residual below rel_tol or throws.
inline void solve_laplace_dirichlet(const Grid& g, const std::vector<char>& mask,
                                    std::vector<double>& x, double rel_tol = 1e-12,
                                    long max_iter = 0) {
    const long total = g.node_count();
    if (static_cast<long>(mask.size()) != total || static_cast<long>(x.size()) != total)
        throw std::invalid_argument("solve_laplace_dirichlet: size mismatch");
    const int n = g.spec.n;
    if (max_iter == 0) max_iter = 40L * (g.spec.dims[0] + g.spec.dims[1] + g.spec.dims[2]) + 2000;

    // A y = Σ_axis (2 y_i − y_{i−} − y_{i+}) over masked nodes, with unmasked
    // neighbor values folded into the right-hand side.
    auto apply = [&](const std::vector<double>& y, std::vector<double>& out, bool fold_data) {
        for (long id = 0; id < total; ++id) {
            if (!mask[id]) {
                out[id] = 0.0;
                continue;
            }
            double acc = 0.0;
            const auto m = g.multi_index(id);
            for (int axis = 0; axis < n; ++axis) {
                const long s = g.stride(axis);
                for (int dir = -1; dir <= 1; dir += 2) {
                    const int mi = m[axis] + dir;
                    if (mi < 0 || mi >= g.spec.dims[axis]) continue;  // outside: no equation term
                    const long j = id + dir * s;
                    acc += y[id] - (mask[j] ? y[j] : (fold_data ? x[j] : 0.0));
                }
            }
            out[id] = acc;
        }
    };

    std::vector<double> r(total, 0.0), p(total, 0.0), Ap(total, 0.0);
    apply(x, r, true);
    double bnorm2 = 0.0;
    for (long id = 0; id < total; ++id) {
        r[id] = -r[id];
        bnorm2 += r[id] * r[id];
    }
    // measure against the Dirichlet data scale so that an all-zero RHS with
    // nonzero boundary data still converges in the relative sense
    double dscale = 0.0;
    for (long id = 0; id < total; ++id)
        if (!mask[id]) dscale = std::max(dscale, std::abs(x[id]));
    const double stop2 = std::max(bnorm2 * rel_tol * rel_tol, dscale * dscale * 1e-30);
    if (bnorm2 <= stop2 || bnorm2 == 0.0) return;

    p = r;
    double rs = bnorm2;
    for (long it = 0; it < max_iter; ++it) {
        apply(p, Ap, false);
        double pAp = 0.0;
        for (long id = 0; id < total; ++id) pAp += p[id] * Ap[id];
        if (pAp <= 0.0) throw std::runtime_error("solve_laplace_dirichlet: operator not positive");
        const double alpha = rs / pAp;
        for (long id = 0; id < total; ++id) {
            if (!mask[id]) continue;
            x[id] += alpha * p[id];
            r[id] -= alpha * Ap[id];
        }
        double rs_new = 0.0;
        for (long id = 0; id < total; ++id) rs_new += r[id] * r[id];
        if (rs_new <= stop2) return;
        const double beta = rs_new / rs;
        rs = rs_new;
        for (long id = 0; id < total; ++id) p[id] = r[id] + beta * p[id];
    }
    throw std::runtime_error("solve_laplace_dirichlet: CG failed to reach the requested residual");
}

// Harmonic extension on the active-edge graph: interior nodes satisfy the
// graph-Laplacian equation over the edges of g (excluded nodes carry no
// equation and no coupling), boundary nodes hold bdata.  This is the
// stationarity system of the quadratic part of the discrete energy, solved
// independently of the descent loop by conjugate gradients.
inline std::vector<double> harmonic_on_active_graph(const Grid& g, const std::vector<double>& bdata,
                                                    double rel_tol = 1e-13, long max_iter = 0) {
    const long total = g.node_count();
    if (static_cast<long>(bdata.size()) != total)
        throw std::invalid_argument("harmonic_on_active_graph: size mismatch");
    if (max_iter == 0) max_iter = 80L * (g.spec.dims[0] + g.spec.dims[1] + g.spec.dims[2]) + 4000;
    auto interior = [&](long id) { return g.role[id] == NodeRole::Interior; };
    std::vector<double> x(total, 0.0);
    for (long id = 0; id < total; ++id)
        if (g.role[id] == NodeRole::Boundary) x[id] = bdata[id];
    auto apply = [&](const std::vector<double>& y, std::vector<double>& out, bool fold) {
        std::fill(out.begin(), out.end(), 0.0);
        for (const auto& e : g.edges) {
            const double ya = interior(e.a) ? y[e.a] : (fold ? x[e.a] : 0.0);
            const double yb = interior(e.b) ? y[e.b] : (fold ? x[e.b] : 0.0);
            if (interior(e.a)) out[e.a] += ya - yb;
            if (interior(e.b)) out[e.b] += yb - ya;
        }
    };
    std::vector<double> r(total, 0.0), p(total, 0.0), Ap(total, 0.0);
    apply(x, r, true);
    double bnorm2 = 0.0, dscale = 0.0;
    for (long id = 0; id < total; ++id) {
        r[id] = interior(id) ? -r[id] : 0.0;
        bnorm2 += r[id] * r[id];
        if (g.role[id] == NodeRole::Boundary) dscale = std::max(dscale, std::abs(x[id]));
    }
    const double stop2 = std::max(bnorm2 * rel_tol * rel_tol, dscale * dscale * 1e-30);
    if (bnorm2 <= stop2 || bnorm2 == 0.0) return x;
    p = r;
    double rs = bnorm2;
    for (long it = 0; it < max_iter; ++it) {
        apply(p, Ap, false);
        double pAp = 0.0;
        for (long id = 0; id < total; ++id) pAp += p[id] * Ap[id];
        if (pAp <= 0.0) throw std::runtime_error("harmonic_on_active_graph: operator not positive");
        const double alpha = rs / pAp;
        for (long id = 0; id < total; ++id) {
            if (!interior(id)) continue;
            x[id] += alpha * p[id];
            r[id] -= alpha * Ap[id];
        }
        double rs_new = 0.0;
        for (long id = 0; id < total; ++id) rs_new += r[id] * r[id];
        if (rs_new <= stop2) return x;
        const double beta = rs_new / rs;
        rs = rs_new;
        for (long id = 0; id < total; ++id) p[id] = interior(id) ? r[id] + beta * p[id] : 0.0;
    }
    throw std::runtime_error("harmonic_on_active_graph: CG failed to reach the requested residual");
}

}  // namespace harmap
