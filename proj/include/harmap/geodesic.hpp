#pragma once

// Geodesics: the numerical IVP oracle (4th-order Runge–Kutta on the geodesic
// equation of the horospherical metric, with step halving), and the exact
// point-to-point connection built from a transvection plus the radial disk
// geodesic s ↦ tanh(s)·d̂.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "harmap/chart.hpp"
#include "harmap/isometry.hpp"
#include "harmap/metric.hpp"

namespace harmap {

namespace detail {

// Geodesic acceleration ẍ = −g⁻¹ F with
// F_a = ẋ^b (∂_b g ẋ)_a − ½ ẋᵀ(∂_a g)ẋ  in the chart x = (u, v).
// All metric derivatives are analytic; the cross-term tables make the
// v-derivative contractions sparse (and B_c(ξ, ξ) = 0 by antisymmetry).
inline void geo_accel(const QForm& Q, const std::vector<double>& x, const std::vector<double>& xd,
                      std::vector<double>& acc) {
    const int vd = Q.v_dim(), cd = Q.cross_dim();
    const double u = x[0], mu = xd[0];
    const double* v = x.data() + 1;
    const double* xi = xd.data() + 1;
    const double e2 = std::exp(2.0 * u), e4 = e2 * e2;

    std::vector<double> a(static_cast<size_t>(cd) * vd, 0.0);   // rows a_c
    std::vector<double> alpha(cd, 0.0);                          // A_c(v, ξ)
    std::vector<double> tau(static_cast<size_t>(cd) * vd, 0.0);  // τ_{c,i} = Σ s·ξ_j over (i,j,s)
    std::vector<double> beta(static_cast<size_t>(cd) * vd, 0.0); // β_{c,i} = Σ s·ξ_j over (j,i,s)
    for (int c = 0; c < cd; ++c) {
        a[c * vd + c] = 1.0;
        for (const auto& t : Q.tables()[c]) {
            a[c * vd + t.xj] += t.s * v[t.vi];
            tau[c * vd + t.vi] += t.s * xi[t.xj];
            beta[c * vd + t.xj] += t.s * xi[t.vi];
        }
        double al = 0.0;
        for (int j = 0; j < vd; ++j) al += a[c * vd + j] * xi[j];
        alpha[c] = al;
    }

    double sum_a2 = 0.0, sum_f2 = 0.0;
    for (int c = 0; c < cd; ++c) sum_a2 += alpha[c] * alpha[c];
    for (int j = cd; j < vd; ++j) sum_f2 += xi[j] * xi[j];

    // F_0 = −½ ξᵀ(∂_u M)ξ
    const double F0 = -0.5 * (4.0 * e4 * sum_a2 + 2.0 * e2 * sum_f2);

    std::vector<double> Fv(vd, 0.0);
    for (int i = 0; i < vd; ++i) {
        double f = mu * 2.0 * e2 * (i >= cd ? xi[i] : 0.0);
        for (int c = 0; c < cd; ++c)
            f += mu * 4.0 * e4 * alpha[c] * a[c * vd + i] +
                 e4 * alpha[c] * (beta[c * vd + i] - tau[c * vd + i]);
        Fv[i] = f;
    }

    const auto M = Q.v_matrix(u, std::span<const double>(v, vd));
    auto vacc = spd_solve(M, Fv);
    acc.resize(vd + 1);
    acc[0] = -F0;
    for (int i = 0; i < vd; ++i) acc[i + 1] = -vacc[i];
}

struct GeoState {
    std::vector<double> x;   // (u, v)
    std::vector<double> xd;  // velocity
};

inline GeoState rk4_integrate(const QForm& Q, GeoState y, double t, int nsteps) {
    const double h = t / nsteps;
    const int m = static_cast<int>(y.x.size());
    std::vector<double> k1a, k2a, k3a, k4a;
    GeoState y2, y3, y4;
    for (int step = 0; step < nsteps; ++step) {
        geo_accel(Q, y.x, y.xd, k1a);
        y2 = y;
        for (int i = 0; i < m; ++i) {
            y2.x[i] += 0.5 * h * y.xd[i];
            y2.xd[i] += 0.5 * h * k1a[i];
        }
        geo_accel(Q, y2.x, y2.xd, k2a);
        y3 = y;
        for (int i = 0; i < m; ++i) {
            y3.x[i] += 0.5 * h * y2.xd[i];
            y3.xd[i] += 0.5 * h * k2a[i];
        }
        geo_accel(Q, y3.x, y3.xd, k3a);
        y4 = y;
        for (int i = 0; i < m; ++i) {
            y4.x[i] += h * y3.xd[i];
            y4.xd[i] += h * k3a[i];
        }
        geo_accel(Q, y4.x, y4.xd, k4a);
        for (int i = 0; i < m; ++i) {
            y.x[i] += h / 6.0 * (y.xd[i] + 2.0 * y2.xd[i] + 2.0 * y3.xd[i] + y4.xd[i]);
            y.xd[i] += h / 6.0 * (k1a[i] + 2.0 * k2a[i] + 2.0 * k3a[i] + k4a[i]);
        }
    }
    return y;
}

}  // namespace detail

struct GeodesicResult {
    HoroPoint endpoint;
    std::vector<double> velocity;  // (du, dv) at the endpoint
    int steps = 0;
};

// g-norm of a chart tangent (du, dv) at p.
inline double tangent_norm(const ModelParams& P, const HoroPoint& p,
                           const std::vector<double>& dir) {
    const QForm Q(P);
    const double q = Q.value(p.u, p.v, std::span<const double>(dir.data() + 1, P.v_dim()));
    return std::sqrt(dir[0] * dir[0] + q);
}

// Integrates the geodesic equation from p with unit initial direction for
// time t; step count doubles until the endpoint moves by less than tol.
inline GeodesicResult geodesic_ode(const ModelParams& P, const HoroPoint& p,
                                   const std::vector<double>& dir, double t, double tol = 1e-8) {
    check_dims(P, p, "geodesic_ode");
    if (static_cast<int>(dir.size()) != P.real_dim())
        throw std::invalid_argument("geodesic_ode: direction has wrong dimension");
    if (std::abs(tangent_norm(P, p, dir) - 1.0) > 1e-6)
        throw std::invalid_argument("geodesic_ode: direction is not unit length");
    const QForm Q(P);
    detail::GeoState y0;
    y0.x.resize(P.real_dim());
    y0.x[0] = p.u;
    for (int i = 0; i < P.v_dim(); ++i) y0.x[i + 1] = p.v[i];
    y0.xd = dir;

    int nsteps = std::max(16, static_cast<int>(std::ceil(std::abs(t) * 32.0)));
    detail::GeoState prev = detail::rk4_integrate(Q, y0, t, nsteps);
    for (;;) {
        if (nsteps > (1 << 20))
            throw std::runtime_error("geodesic_ode: step halving failed to converge");
        nsteps *= 2;
        detail::GeoState next = detail::rk4_integrate(Q, y0, t, nsteps);
        double move = 0.0;
        for (size_t i = 0; i < next.x.size(); ++i)
            move = std::max(move, std::abs(next.x[i] - prev.x[i]));
        prev = next;
        if (move < tol) break;
    }
    GeodesicResult r;
    r.endpoint.u = prev.x[0];
    r.endpoint.v.assign(prev.x.begin() + 1, prev.x.end());
    r.velocity = prev.xd;
    r.steps = nsteps;
    return r;
}

struct Connection {
    double length = 0.0;           // tanh⁻¹ of the transvected radius = dist formula
    std::vector<double> dir;       // unit initial direction at p in (u, v)
    MobiusMatrix to_p;             // isometry with to_p · o = p
    std::vector<Quat> dhat;        // radial direction in the transvected frame
};

// Exact connecting geodesic between disk points: move p to the origin by a
// transvection, connect radially, push back.  γ(s) = to_p · (tanh(s)·d̂).
inline Connection connect_geodesic(const ModelParams& P, const DiskPoint& zp,
                                   const DiskPoint& zq) {
    check_dims(P, zp, "connect_geodesic");
    check_dims(P, zq, "connect_geodesic");
    const MobiusMatrix h = transvection_to_origin(P, zp);
    const DiskPoint q1 = mobius_apply(P, h, zq);
    const double r = std::sqrt(q1.norm2());
    Connection c;
    c.length = std::atanh(r);
    c.to_p = h.inverse();
    c.dhat.resize(P.ell);
    if (r > 1e-300)
        for (int k = 0; k < P.ell; ++k) c.dhat[k] = q1.z[k] * (1.0 / r);
    else
        c.dhat[0] = Quat::one();

    DiskPoint origin;
    origin.z.assign(P.ell, Quat{});
    const DiskPoint p0 = mobius_apply(P, c.to_p, origin);
    const std::vector<Quat> vel_disk = mobius_differential(P, c.to_p, origin, c.dhat);
    auto [du, dv] = chart_differential(P, p0, vel_disk);
    c.dir.resize(P.real_dim());
    c.dir[0] = du;
    for (int i = 0; i < P.v_dim(); ++i) c.dir[i + 1] = dv[i];
    return c;
}

// Point at arclength s along the connection (closed form).
inline DiskPoint connection_point(const ModelParams& P, const Connection& c, double s) {
    DiskPoint radial;
    radial.z.resize(P.ell);
    const double r = std::tanh(s);
    for (int k = 0; k < P.ell; ++k) radial.z[k] = c.dhat[k] * r;
    return mobius_apply(P, c.to_p, radial);
}

}  // namespace harmap
