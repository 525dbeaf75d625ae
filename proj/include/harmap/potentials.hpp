#pragma once

// Singular potentials u_i: closed-form Newtonian potentials of point and
// segment charges, discrete-harmonic boundary corrections (u_i = 0 on ∂Ω),
// charges via flux integrals, and shell integrals.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "harmap/grid.hpp"
#include "harmap/linsolve.hpp"

namespace harmap {

// ---------------------------------------------------------------- kernels

inline double fundamental_solution(int n, double r) {
    if (r <= 0.0) throw std::domain_error("fundamental_solution: r must be positive");
    if (n == 2) return -std::log(r) / (2.0 * M_PI);
    if (n == 3) return 1.0 / (4.0 * M_PI * r);
    throw std::invalid_argument("fundamental_solution: n must be 2 or 3");
}

namespace detail {
// s + sqrt(s^2 + rho^2), computed without cancellation for s < 0
inline double asinh_term(double s, double rho) {
    const double r = std::hypot(s, rho);
    return s >= 0.0 ? s + r : rho * rho / (r - s);
}
}  // namespace detail

// ------------------------------------------------- closed-form potentials

inline double potential_closed_form(int n, const SingularComponent& c,
                                    const std::array<double, 3>& x) {
    if (c.kind == SingularComponent::Kind::Point) {
        double r2 = 0.0;
        for (int k = 0; k < n; ++k) r2 += (x[k] - c.a[k]) * (x[k] - c.a[k]);
        return c.density * fundamental_solution(n, std::sqrt(r2));
    }
    if (n != 3) throw std::invalid_argument("potential_closed_form: segments require n = 3");
    const double L = c.length();
    if (L <= 0.0) throw std::invalid_argument("potential_closed_form: degenerate segment");
    std::array<double, 3> d{};
    for (int k = 0; k < 3; ++k) d[k] = (c.b[k] - c.a[k]) / L;
    double t = 0.0, rho2 = 0.0;
    for (int k = 0; k < 3; ++k) t += (x[k] - c.a[k]) * d[k];
    for (int k = 0; k < 3; ++k) {
        const double pk = x[k] - c.a[k] - t * d[k];
        rho2 += pk * pk;
    }
    const double rho = std::sqrt(rho2);
    if (rho <= 0.0 && t >= 0.0 && t <= L)
        throw std::domain_error("potential_closed_form: point lies on the segment");
    const double s1 = -t, s2 = L - t;
    if (rho <= 0.0)  // on the segment's line, outside the segment
        return c.density / (4.0 * M_PI) * std::log(s1 > 0.0 ? s2 / s1 : s1 / s2);
    return c.density / (4.0 * M_PI) *
           std::log(detail::asinh_term(s2, rho) / detail::asinh_term(s1, rho));
}

inline std::array<double, 3> potential_closed_grad(int n, const SingularComponent& c,
                                                   const std::array<double, 3>& x) {
    std::array<double, 3> g{0, 0, 0};
    if (c.kind == SingularComponent::Kind::Point) {
        double r2 = 0.0;
        for (int k = 0; k < n; ++k) r2 += (x[k] - c.a[k]) * (x[k] - c.a[k]);
        if (r2 <= 0.0) throw std::domain_error("potential_closed_grad: point on the charge");
        // dΓ/dr = −1/(2πr) (n=2), −1/(4πr²) (n=3); gradient = dΓ/dr · r̂
        const double f = (n == 2) ? -c.density / (2.0 * M_PI * r2)
                                  : -c.density / (4.0 * M_PI * r2 * std::sqrt(r2));
        for (int k = 0; k < n; ++k) g[k] = f * (x[k] - c.a[k]);
        return g;
    }
    const double L = c.length();
    std::array<double, 3> d{};
    for (int k = 0; k < 3; ++k) d[k] = (c.b[k] - c.a[k]) / L;
    double t = 0.0;
    for (int k = 0; k < 3; ++k) t += (x[k] - c.a[k]) * d[k];
    std::array<double, 3> perp{};
    double rho2 = 0.0;
    for (int k = 0; k < 3; ++k) {
        perp[k] = x[k] - c.a[k] - t * d[k];
        rho2 += perp[k] * perp[k];
    }
    const double rho = std::sqrt(rho2);
    const double s1 = -t, s2 = L - t;
    const double r1 = std::hypot(s1, rho), r2 = std::hypot(s2, rho);
    if (r1 <= 0.0 || r2 <= 0.0 || (rho <= 0.0 && t >= 0.0 && t <= L))
        throw std::domain_error("potential_closed_grad: point on the segment");
    const double cdens = c.density / (4.0 * M_PI);
    const double axial = cdens * (1.0 / r1 - 1.0 / r2);
    for (int k = 0; k < 3; ++k) g[k] = axial * d[k];
    if (rho > 1e-300) {
        const double radial = cdens * (s1 / r1 - s2 / r2) / rho2;  // coefficient of perp
        for (int k = 0; k < 3; ++k) g[k] += radial * perp[k];
    }
    return g;
}

// --------------------------------------------------- corrected potentials

struct SingularPotential {
    SingularComponent comp;
    int n = 0;
    bool corrected = false;
    std::vector<double> corr;   // correction at every node (empty if !corrected)
    std::vector<double> total;  // closed + corr at non-excluded nodes; 0 at excluded

    double closed_at(const std::array<double, 3>& x) const {
        return potential_closed_form(n, comp, x);
    }
    std::array<double, 3> closed_grad_at(const std::array<double, 3>& x) const {
        return potential_closed_grad(n, comp, x);
    }
};

// multilinear interpolation of nodal values at an arbitrary point
inline double grid_interpolate(const Grid& g, const std::vector<double>& vals,
                               const std::array<double, 3>& x) {
    const int n = g.spec.n;
    std::array<int, 3> i0{0, 0, 0};
    std::array<double, 3> f{0, 0, 0};
    for (int k = 0; k < n; ++k) {
        double t = (x[k] - g.spec.lo[k]) / g.spec.h;
        t = std::min(std::max(t, 0.0), static_cast<double>(g.spec.dims[k] - 1));
        i0[k] = std::min(static_cast<int>(t), g.spec.dims[k] - 2);
        f[k] = t - i0[k];
    }
    double acc = 0.0;
    const int corners = 1 << n;
    for (int m = 0; m < corners; ++m) {
        double wgt = 1.0;
        std::array<int, 3> idx = i0;
        for (int k = 0; k < n; ++k) {
            if (m & (1 << k)) {
                wgt *= f[k];
                idx[k] += 1;
            } else {
                wgt *= 1.0 - f[k];
            }
        }
        acc += wgt * vals[g.index(idx[0], idx[1], idx[2])];
    }
    return acc;
}

// boundary_correction: discrete-harmonic c with c = −closed on ∂Ω, solved at
// every non-boundary node (the correction is regular across Σ)
inline SingularPotential make_potential(const Grid& g, const SingularComponent& comp,
                                        double cg_tol = 1e-12) {
    SingularPotential pot;
    pot.comp = comp;
    pot.n = g.spec.n;
    pot.corrected = true;
    const long total = g.node_count();
    pot.corr.assign(total, 0.0);
    std::vector<char> mask(total, 0);
    for (long id = 0; id < total; ++id) {
        if (g.role[id] == NodeRole::Boundary)
            pot.corr[id] = -potential_closed_form(pot.n, comp, g.coords(id));
        else
            mask[id] = 1;
    }
    solve_laplace_dirichlet(g, mask, pot.corr, cg_tol);
    pot.total.assign(total, 0.0);
    for (long id = 0; id < total; ++id)
        if (g.is_active(id))
            pot.total[id] = potential_closed_form(pot.n, comp, g.coords(id)) + pot.corr[id];
    return pot;
}

// uncorrected (free-kernel) potential on the same grid, for oracles
inline SingularPotential make_free_potential(const Grid& g, const SingularComponent& comp) {
    SingularPotential pot;
    pot.comp = comp;
    pot.n = g.spec.n;
    pot.corrected = false;
    pot.total.assign(g.node_count(), 0.0);
    for (long id = 0; id < g.node_count(); ++id)
        if (g.is_active(id)) pot.total[id] = potential_closed_form(pot.n, comp, g.coords(id));
    return pot;
}

// ------------------------------------------------------- quadrature rules

namespace detail {

inline void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(m);
    weights.resize(m);
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= m; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= m; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        const double dp = m * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

// visit quadrature points of the shell ∂^s around the component:
// fn(point, outward unit normal, area weight)
template <typename F>
void for_shell(const SingularComponent& c, int n, double s, F&& fn) {
    if (c.kind == SingularComponent::Kind::Point) {
        if (n == 2) {
            const int M = 16384;
            const double dth = 2.0 * M_PI / M;
            for (int i = 0; i < M; ++i) {
                const double th = i * dth;
                const std::array<double, 3> nr{std::cos(th), std::sin(th), 0.0};
                fn(std::array<double, 3>{c.a[0] + s * nr[0], c.a[1] + s * nr[1], 0.0}, nr,
                   s * dth);
            }
            return;
        }
        std::vector<double> mu, wmu;
        gauss_legendre(100, mu, wmu);
        const int Mphi = 200;
        const double dphi = 2.0 * M_PI / Mphi;
        for (int i = 0; i < 100; ++i) {
            const double sth = std::sqrt(std::max(0.0, 1.0 - mu[i] * mu[i]));
            for (int j = 0; j < Mphi; ++j) {
                const double phi = j * dphi;
                const std::array<double, 3> nr{sth * std::cos(phi), sth * std::sin(phi), mu[i]};
                fn(std::array<double, 3>{c.a[0] + s * nr[0], c.a[1] + s * nr[1],
                                         c.a[2] + s * nr[2]},
                   nr, s * s * wmu[i] * dphi);
            }
        }
        return;
    }
    // segment tube: cylinder of length L plus two hemispherical caps
    const double L = c.length();
    std::array<double, 3> d{};
    for (int k = 0; k < 3; ++k) d[k] = (c.b[k] - c.a[k]) / L;
    // orthonormal complement of d
    std::array<double, 3> e1{}, e2{};
    {
        const std::array<double, 3> trial =
            std::abs(d[0]) < 0.9 ? std::array<double, 3>{1, 0, 0} : std::array<double, 3>{0, 1, 0};
        double dot = trial[0] * d[0] + trial[1] * d[1] + trial[2] * d[2];
        double nrm = 0.0;
        for (int k = 0; k < 3; ++k) {
            e1[k] = trial[k] - dot * d[k];
            nrm += e1[k] * e1[k];
        }
        nrm = std::sqrt(nrm);
        for (int k = 0; k < 3; ++k) e1[k] /= nrm;
        e2 = {d[1] * e1[2] - d[2] * e1[1], d[2] * e1[0] - d[0] * e1[2],
              d[0] * e1[1] - d[1] * e1[0]};
    }
    std::vector<double> gt, wt;
    gauss_legendre(100, gt, wt);
    const int Mphi = 128;
    const double dphi = 2.0 * M_PI / Mphi;
    for (int i = 0; i < 100; ++i) {
        const double t = 0.5 * L * (gt[i] + 1.0);
        const double wgt = 0.5 * L * wt[i];
        for (int j = 0; j < Mphi; ++j) {
            const double phi = j * dphi;
            std::array<double, 3> nr{}, x{};
            for (int k = 0; k < 3; ++k) {
                nr[k] = std::cos(phi) * e1[k] + std::sin(phi) * e2[k];
                x[k] = c.a[k] + t * d[k] + s * nr[k];
            }
            fn(x, nr, s * wgt * dphi);
        }
    }
    std::vector<double> mu, wmu;
    gauss_legendre(50, mu, wmu);
    for (int cap = 0; cap < 2; ++cap) {
        const std::array<double, 3> center = cap == 0 ? c.a : c.b;
        const double sign = cap == 0 ? -1.0 : 1.0;  // axis direction of the cap
        for (int i = 0; i < 50; ++i) {
            const double m = 0.5 * (mu[i] + 1.0);  // cos of angle from the cap axis, in [0,1]
            const double wgt = 0.5 * wmu[i];
            const double sth = std::sqrt(std::max(0.0, 1.0 - m * m));
            for (int j = 0; j < Mphi; ++j) {
                const double phi = j * dphi;
                std::array<double, 3> nr{}, x{};
                for (int k = 0; k < 3; ++k) {
                    nr[k] = sign * m * d[k] + sth * (std::cos(phi) * e1[k] + std::sin(phi) * e2[k]);
                    x[k] = center[k] + s * nr[k];
                }
                fn(x, nr, s * s * wgt * dphi);
            }
        }
    }
}

// discrete flux of nodal values through an axis-aligned node box around the
// component (Σ h^{n−2}(v_out − v_in) over cut edges); for a discrete-harmonic
// field this vanishes up to the linear-solver residual
inline double discrete_box_flux(const Grid& g, const std::vector<double>& vals,
                                const SingularComponent& c, double s) {
    const int n = g.spec.n;
    const double h = g.spec.h;
    std::array<double, 3> blo{}, bhi{};
    for (int k = 0; k < n; ++k) {
        blo[k] = std::min(c.a[k], c.kind == SingularComponent::Kind::Segment ? c.b[k] : c.a[k]);
        bhi[k] = std::max(c.a[k], c.kind == SingularComponent::Kind::Segment ? c.b[k] : c.a[k]);
    }
    const double w = std::max(2.0 * h, std::round(s / h) * h);
    for (int k = 0; k < n; ++k) {
        blo[k] = std::max(blo[k] - w, g.spec.lo[k] + 0.5 * h);
        bhi[k] = std::min(bhi[k] + w, g.spec.hi[k] - 0.5 * h);
    }
    auto inside = [&](const std::array<double, 3>& x) {
        for (int k = 0; k < n; ++k)
            if (x[k] < blo[k] - 0.25 * h || x[k] > bhi[k] + 0.25 * h) return false;
        return true;
    };
    const double scale = std::pow(h, n - 2);
    double flux = 0.0;
    for (int axis = 0; axis < n; ++axis) {
        const long st = g.stride(axis);
        for (long id = 0; id < g.node_count(); ++id) {
            const auto m = g.multi_index(id);
            if (m[axis] + 1 >= g.spec.dims[axis]) continue;
            const bool ia = inside(g.coords(id)), ib = inside(g.coords(id + st));
            if (ia == ib) continue;
            const double d = vals[id + st] - vals[id];
            flux += ia ? scale * d : -scale * d;
        }
    }
    return flux;
}

}  // namespace detail

// -------------------------------------------------------------- integrals

// total charge e₀ = −∫_{∂^s} ∂_n u:  closed part by high-order quadrature of
// the analytic gradient, correction part by the discrete Gauss flux (zero for
// a discrete-harmonic correction up to the solver residual)
inline double charge(const Grid& g, const SingularPotential& pot, double s) {
    if (s <= 0.0) throw std::domain_error("charge: shell radius must be positive");
    double sep = std::numeric_limits<double>::infinity();
    for (const std::array<double, 3>& p :
         {pot.comp.a, pot.comp.kind == SingularComponent::Kind::Segment ? pot.comp.b : pot.comp.a})
        for (int k = 0; k < g.spec.n; ++k)
            sep = std::min({sep, p[k] - g.spec.lo[k], g.spec.hi[k] - p[k]});
    if (s >= sep) throw std::domain_error("charge: shell intersects the domain boundary");

    double flux = 0.0;
    detail::for_shell(pot.comp, pot.n, s,
                      [&](const std::array<double, 3>& x, const std::array<double, 3>& nr,
                          double da) {
                          const auto gr = pot.closed_grad_at(x);
                          flux += (gr[0] * nr[0] + gr[1] * nr[1] + gr[2] * nr[2]) * da;
                      });
    if (pot.corrected) flux += detail::discrete_box_flux(g, pot.corr, pot.comp, s);
    return -flux;
}

// ∫_{∂^s} u dA (correction interpolated from the grid when present)
inline double shell_integral(const Grid& g, const SingularPotential& pot, double s) {
    if (s <= 0.0) throw std::domain_error("shell_integral: shell radius must be positive");
    double acc = 0.0;
    detail::for_shell(pot.comp, pot.n, s,
                      [&](const std::array<double, 3>& x, const std::array<double, 3>&,
                          double da) {
                          double u = pot.closed_at(x);
                          if (pot.corrected) u += grid_interpolate(g, pot.corr, x);
                          acc += u * da;
                      });
    return acc;
}

// min over nodes with dist to Σ_i in [2h, 10h] of ‖∇_h u_i‖² · dist²
inline double condition_iii_margin(const Grid& g, const SingularPotential& pot) {
    const double h = g.spec.h;
    double mn = std::numeric_limits<double>::infinity();
    for (long id = 0; id < g.node_count(); ++id) {
        if (g.role[id] != NodeRole::Interior) continue;
        const double r = dist_to_component(pot.comp, g.coords(id), g.spec.n);
        if (r < 2.0 * h || r > 10.0 * h) continue;
        const auto m = g.multi_index(id);
        double g2 = 0.0;
        bool ok = true;
        for (int axis = 0; axis < g.spec.n; ++axis) {
            const long st = g.stride(axis);
            if (m[axis] <= 0 || m[axis] + 1 >= g.spec.dims[axis] || !g.is_active(id - st) ||
                !g.is_active(id + st)) {
                ok = false;
                break;
            }
            const double d = (pot.total[id + st] - pot.total[id - st]) / (2.0 * h);
            g2 += d * d;
        }
        if (ok) mn = std::min(mn, g2 * r * r);
    }
    return mn;
}

// ------------------------------------------------------------------ multi

struct MultiPotential {
    std::vector<SingularPotential> parts;
    std::vector<double> u0;  // Σ_i u_i at non-excluded nodes; 0 at excluded
};

inline MultiPotential multi_potential(const Grid& g,
                                      const std::vector<SingularComponent>& comps,
                                      double cg_tol = 1e-12) {
    if (comps.size() >= 2) {
        const double sep = min_pairwise_separation(comps, g.spec.n);
        if (sep <= g.spec.h)
            throw std::invalid_argument("multi_potential: singular components overlap");
    }
    MultiPotential mp;
    mp.u0.assign(g.node_count(), 0.0);
    for (const auto& c : comps) {
        mp.parts.push_back(make_potential(g, c, cg_tol));
        for (long id = 0; id < g.node_count(); ++id)
            if (g.is_active(id)) mp.u0[id] += mp.parts.back().total[id];
    }
    return mp;
}

}  // namespace harmap
