#pragma once

// Certification suite: every check samples one quantitative comparison fact
// of the geometry / energy / solver layers and reports a pass margin.  A
// margin is the distance to the failing threshold, so margin ≥ 0 ⟺ pass and
// the value says how much room the property has.  Checks draw all randomness
// from a per-check stream derived from (seed, check id), which makes the
// whole table reproducible under a fixed seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "harmap/chart.hpp"
#include "harmap/energy.hpp"
#include "harmap/geodesic.hpp"
#include "harmap/grid.hpp"
#include "harmap/metric.hpp"
#include "harmap/potentials.hpp"
#include "harmap/rng.hpp"
#include "harmap/solver.hpp"

namespace harmap {

struct CheckResult {
    std::string id;
    std::string description;
    bool pass = false;
    double margin = 0.0;  // distance to the failing threshold; ≥ 0 ⟺ pass
    long samples = 0;     // number of samples actually examined
    std::string detail;   // worst-offender context (filled on failure)
};

namespace verify_detail {

inline const std::vector<ModelParams>& families() {
    static const std::vector<ModelParams> f = {
        ModelParams(Family::Real, 2),       ModelParams(Family::Real, 3),
        ModelParams(Family::Complex, 2),    ModelParams(Family::Complex, 3),
        ModelParams(Family::Quaternionic, 2)};
    return f;
}

inline std::uint64_t check_seed(std::uint64_t seed, const std::string& id) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the id
    for (const char c : id) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return seed ^ h;
}

// covector of finite-difference partials of f at p (step 1e-5, central)
template <typename F>
std::vector<double> fd_gradient(const ModelParams& P, const F& f, const HoroPoint& p) {
    const double h = 1e-5;
    std::vector<double> g(P.real_dim());
    HoroPoint q = p;
    q.u = p.u + h;
    const double fu_p = f(q);
    q.u = p.u - h;
    g[0] = (fu_p - f(q)) / (2.0 * h);
    q.u = p.u;
    for (int i = 0; i < P.v_dim(); ++i) {
        q.v = p.v;
        q.v[i] = p.v[i] + h;
        const double fp = f(q);
        q.v[i] = p.v[i] - h;
        g[i + 1] = (fp - f(q)) / (2.0 * h);
        q.v = p.v;
    }
    return g;
}

// g(∇f, ∇h) = df·g⁻¹·dh
inline double grad_inner(const ModelParams& P, const HoroPoint& p, const std::vector<double>& df,
                         const std::vector<double>& dh) {
    const auto g = metric_tensor(P, p);
    const auto gidh = spd_solve(g, dh);
    double s = 0.0;
    for (int i = 0; i < P.real_dim(); ++i) s += df[i] * gidh[i];
    return s;
}

inline std::vector<Quat> random_disk_tangent(const ModelParams& P, Rng& rng) {
    std::vector<Quat> dz(P.ell);
    const int d = P.dim_k();
    for (auto& c : dz)
        c = Quat(rng.normal(), d > 1 ? rng.normal() : 0.0, d > 2 ? rng.normal() : 0.0,
                 d > 2 ? rng.normal() : 0.0);
    return dz;
}

// pushforward of dz through disk_to_horo by central finite differences
inline std::vector<double> fd_pushforward(const ModelParams& P, const DiskPoint& z,
                                          const std::vector<Quat>& dz, double h) {
    DiskPoint zp = z, zm = z;
    for (int k = 0; k < P.ell; ++k) {
        zp.z[k] = z.z[k] + dz[k] * h;
        zm.z[k] = z.z[k] - dz[k] * h;
    }
    const HoroPoint pp = disk_to_horo(P, zp), pm = disk_to_horo(P, zm);
    std::vector<double> r(P.real_dim());
    r[0] = (pp.u - pm.u) / (2.0 * h);
    for (int i = 0; i < P.v_dim(); ++i) r[i + 1] = (pp.v[i] - pm.v[i]) / (2.0 * h);
    return r;
}

inline GridSpec box2(double h, double half = 1.0) {
    GridSpec b;
    b.n = 2;
    b.lo = {-half, -half, 0.0};
    b.hi = {half, half, 0.0};
    b.h = h;
    return b;
}

inline GridSpec box3(double h, double half = 0.5) {
    GridSpec b;
    b.n = 3;
    b.lo = {-half, -half, -half};
    b.hi = {half, half, half};
    b.h = h;
    return b;
}

inline SingularComponent point_comp(std::array<double, 3> x, double dens,
                                    std::vector<double> w = {}) {
    SingularComponent c;
    c.kind = SingularComponent::Kind::Point;
    c.a = x;
    c.density = dens;
    c.w = std::move(w);
    return c;
}

inline SingularComponent segment_comp(std::array<double, 3> a, std::array<double, 3> b,
                                      double dens, std::vector<double> w = {}) {
    SingularComponent c;
    c.kind = SingularComponent::Kind::Segment;
    c.a = a;
    c.b = b;
    c.density = dens;
    c.w = std::move(w);
    return c;
}

struct MarginAcc {
    double margin = std::numeric_limits<double>::infinity();
    std::string detail;
    long samples = 0;

    void feed(double m, const std::string& where) {
        if (m < margin) {
            margin = m;
            detail = where;
        }
    }
};

inline CheckResult finish(const char* id, const char* description, const MarginAcc& acc) {
    CheckResult r;
    r.id = id;
    r.description = description;
    r.margin = acc.margin;
    r.samples = acc.samples;
    r.pass = acc.margin >= 0.0 && std::isfinite(acc.margin);
    if (!r.pass) r.detail = acc.detail;
    return r;
}

}  // namespace verify_detail

// ---------------------------------------------------------------- geometry

// Both renormalized-distance functions have unit-length gradient.
inline CheckResult check_norm1(std::uint64_t seed, long samples) {
    using namespace verify_detail;
    MarginAcc acc;
    for (const auto& P : families()) {
        Rng rng(check_seed(seed, std::string("norm1:") + P.name()));
        for (long it = 0; it < samples; ++it) {
            const HoroPoint p = random_horo_point(P, rng, 1.5, 1.0);
            const auto gm = fd_gradient(P, [&](const HoroPoint& q) { return busemann_minus(P, q); }, p);
            const auto gp = fd_gradient(P, [&](const HoroPoint& q) { return busemann_plus(P, q); }, p);
            const double nm = std::sqrt(grad_inner(P, p, gm, gm));
            const double np = std::sqrt(grad_inner(P, p, gp, gp));
            acc.feed(1e-6 - std::abs(nm - 1.0), P.name() + " minus-gradient");
            acc.feed(1e-6 - std::abs(np - 1.0), P.name() + " plus-gradient");
            ++acc.samples;
        }
    }
    return finish("norm1", "unit gradient of both renormalized distances (1e-6)", acc);
}

// Growth of the form along verticals: e^{2a(t−s)} ≤ χ(t)/χ(s) ≤ e^{2b(t−s)},
// with equality on both sides for the real family.
inline CheckResult check_jacobi(std::uint64_t seed, long samples) {
    using namespace verify_detail;
    MarginAcc acc;
    for (const auto& P : families()) {
        Rng rng(check_seed(seed, std::string("lemma2.1:") + P.name()));
        const double a = P.curv_a(), b = P.curv_b();
        for (long it = 0; it < samples; ++it) {
            const auto v = rng.normal_vec(P.v_dim());
            const auto xi = rng.normal_vec(P.v_dim());
            const double s = rng.uniform(-3.0, 3.0);
            const double t = s + rng.uniform(0.0, 3.0);
            const double chi_s = q_form(P, geodesic_vertical(P, v, s), xi);
            const double chi_t = q_form(P, geodesic_vertical(P, v, t), xi);
            const double lo = chi_t / (std::exp(2.0 * a * (t - s)) * chi_s);
            const double hi = chi_t / (std::exp(2.0 * b * (t - s)) * chi_s);
            acc.feed(lo - (1.0 - 1e-12), P.name() + " lower bound");
            acc.feed((1.0 + 1e-12) - hi, P.name() + " upper bound");
            if (P.fam == Family::Real) acc.feed(1e-10 - std::abs(lo - 1.0), P.name() + " equality");
            ++acc.samples;
        }
    }
    return finish("lemma2.1", "vertical growth of the form within [e^{2a dt}, e^{2b dt}]", acc);
}

// Vertical geodesics with the same ideal past coalesce backwards at rate e^{at}.
inline CheckResult check_coalesce(std::uint64_t seed, long samples) {
    using namespace verify_detail;
    MarginAcc acc;
    for (const auto& P : families()) {
        Rng rng(check_seed(seed, std::string("lemma2.2:") + P.name()));
        const std::vector<double> zero(P.v_dim(), 0.0);
        for (long it = 0; it < samples; ++it) {
            const auto v = rng.normal_vec(P.v_dim());
            const int n = 64;  // h(0) = ∫₀¹ Q_{(0,s v)}(v) ds by Simpson
            double h0 = 0.0;
            for (int i = 0; i <= n; ++i) {
                const double s = static_cast<double>(i) / n;
                std::vector<double> sv(v.size());
                for (size_t k = 0; k < v.size(); ++k) sv[k] = s * v[k];
                const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                h0 += w * q_form(P, HoroPoint{0.0, sv}, v);
            }
            h0 /= 3.0 * n;
            double prev = 1e300;
            for (const double t : {0.0, -2.0, -5.0, -10.0, -20.0}) {
                const double d =
                    dist_horo(P, geodesic_vertical(P, zero, t), geodesic_vertical(P, v, t));
                acc.feed(std::exp(t) * std::sqrt(h0) + 1e-12 - d, P.name() + " rate bound");
                acc.feed(prev + 1e-15 - d, P.name() + " monotone decay");
                prev = d;
            }
            // the limit is 0 at the separation scale of the pair
            acc.feed(1e-8 * std::max(1.0, std::sqrt(h0)) - prev, P.name() + " limit 0");
            ++acc.samples;
        }
    }
    return finish("lemma2.2", "backward coalescence of verticals at rate e^{at}", acc);
}

// Points inside both horoballs of height T lie within distance T + log 2 of
// the geodesic midpoint.
inline CheckResult check_horoball(std::uint64_t seed, long samples) {
    using namespace verify_detail;
    MarginAcc acc;
    bool starved = false;
    std::string starved_where;
    for (const auto& P : families()) {
        Rng rng(check_seed(seed, std::string("lemma2.3:") + P.name()));
        const double T = 0.9;
        const HoroPoint origin{0.0, std::vector<double>(P.v_dim(), 0.0)};
        long used = 0;
        for (long it = 0; it < 40 * samples + 1000 && used < samples; ++it) {
            const HoroPoint p = random_horo_point(P, rng, T + 1.0, 0.8);
            if (busemann_minus(P, p) > T || busemann_plus(P, p) > T) continue;
            ++used;
            acc.feed(T + std::log(2.0) + 1e-9 - dist_horo(P, p, origin), P.name() + " containment");
        }
        acc.samples += used;
        if (used < std::max<long>(1, samples / 4)) {
            starved = true;
            starved_where = P.name();
        }
    }
    CheckResult r =
        finish("lemma2.3", "horoball intersection inside the ball of radius T + log 2", acc);
    if (starved) {
        r.pass = false;
        r.detail = "sampler starved for " + starved_where;
    }
    return r;
}

// Along a vertical with the same ideal past, the difference of the two
// renormalized distances is nondecreasing, their sum vanishes backwards, and
// the forward limit matches the closed form.
inline CheckResult check_busemann_limits(std::uint64_t seed, long samples) {
    using namespace verify_detail;
    MarginAcc acc;
    for (const auto& P : families()) {
        Rng rng(check_seed(seed, std::string("lemma2.4:") + P.name()));
        const int cd = P.cross_dim();
        for (long it = 0; it < samples; ++it) {
            auto v = rng.normal_vec(P.v_dim());
            {
                // keep the limit well conditioned: for microscopic offsets the
                // tail term at t = 10 exceeds the 1e-6 comparison budget
                double s2 = 0.0, cc = 0.0;
                for (int i = 0; i < cd; ++i) cc += v[i] * v[i];
                for (int i = cd; i < P.v_dim(); ++i) s2 += v[i] * v[i];
                if (s2 * s2 + 4.0 * cc < 1e-3)
                    for (auto& x : v) x += 1.0;
            }
            double prev = -1e300;
            for (double t = -20.0; t <= 20.0; t += 1.0) {
                const double diff = t - busemann_plus(P, geodesic_vertical(P, v, t));
                acc.feed(diff - prev + 1e-10, P.name() + " monotone difference");
                prev = diff;
            }
            const double sum20 = -20.0 + busemann_plus(P, geodesic_vertical(P, v, -20.0));
            acc.feed(1e-6 - std::abs(sum20), P.name() + " backward sum");
            double sf = 0.0, c2 = 0.0;
            for (int i = 0; i < cd; ++i) c2 += v[i] * v[i];
            for (int i = cd; i < P.v_dim(); ++i) sf += v[i] * v[i];
            const double d10 = 10.0 - busemann_plus(P, geodesic_vertical(P, v, 10.0));
            const double d20 = 20.0 - busemann_plus(P, geodesic_vertical(P, v, 20.0));
            acc.feed(1e-6 - std::abs(d20 - d10), P.name() + " tail");
            acc.feed(1e-6 - std::abs(d20 - (-0.5 * std::log(sf * sf + 4.0 * c2))),
                     P.name() + " closed-form limit");
            ++acc.samples;
        }
    }
    return finish("lemma2.4", "asymptotic shift along verticals: monotone, pinned limit", acc);
}

// Inside the region where the two height functions sum above log 2, their
// gradients pair positively.
inline CheckResult check_gradient_positivity(std::uint64_t seed, long samples) {
    using namespace verify_detail;
    MarginAcc acc;
    bool starved = false;
    std::string starved_where;
    for (const auto& P : families()) {
        Rng rng(check_seed(seed, std::string("lemma2.5:") + P.name()));
        long used = 0;
        for (long it = 0; it < 40 * samples + 1000 && used < samples; ++it) {
            const HoroPoint p = random_horo_point(P, rng, 2.0, 1.0);
            if (busemann_minus(P, p) + busemann_plus(P, p) <= std::log(2.0) + 1e-3) continue;
            ++used;
            const auto gm = fd_gradient(P, [&](const HoroPoint& q) { return busemann_minus(P, q); }, p);
            const auto gp = fd_gradient(P, [&](const HoroPoint& q) { return busemann_plus(P, q); }, p);
            acc.feed(grad_inner(P, p, gm, gp), P.name() + " pairing");
        }
        acc.samples += used;
        if (used < std::max<long>(1, samples / 4)) {
            starved = true;
            starved_where = P.name();
        }
    }
    CheckResult r = finish("lemma2.5", "positive gradient pairing above the log 2 level", acc);
    if (starved) {
        r.pass = false;
        r.detail = "sampler starved for " + starved_where;
    }
    return r;
}

// The form at points of a metric ball around the reference vertical is
// equivalent to the form at the center, with the explicit constant c(R).
inline CheckResult check_form_equivalence(std::uint64_t seed, long samples) {
    using namespace verify_detail;
    MarginAcc acc;
    bool starved = false;
    std::string starved_where;
    for (const auto& P : families()) {
        Rng rng(check_seed(seed, std::string("lemma2.6i:") + P.name()));
        const double R = 1.0;
        const double C = 2.0 * R * std::exp(2.0 * R);
        const double c = std::exp(4.0 * R) * std::max(2.0, 4.0 * C * C + 1.0);
        long used = 0;
        for (long it = 0; it < 40 * samples + 1000 && used < samples; ++it) {
            const double t0 = rng.uniform(0.0, 3.0);
            const HoroPoint center{t0, std::vector<double>(P.v_dim(), 0.0)};
            HoroPoint p = random_horo_point(P, rng, 0.0, 0.5 * std::exp(-t0));
            p.u = t0 + rng.uniform(-0.9, 0.9);
            if (dist_horo(P, p, center) > R) continue;
            ++used;
            const auto xi = rng.normal_vec(P.v_dim());
            const double ratio = q_form(P, p, xi) / q_form(P, center, xi);
            acc.feed(c * (1.0 + 1e-12) - ratio, P.name() + " upper");
            acc.feed(ratio - (1.0 - 1e-12) / c, P.name() + " lower");
        }
        acc.samples += used;
        if (used < std::max<long>(1, samples / 4)) {
            starved = true;
            starved_where = P.name();
        }
    }
    CheckResult r = finish("lemma2.6i", "form equivalence on unit balls around the vertical", acc);
    if (starved) {
        r.pass = false;
        r.detail = "sampler starved for " + starved_where;
    }
    return r;
}

// The forward height function is nondecreasing along rays s ↦ (u, s·v).
inline CheckResult check_star_shaped(std::uint64_t seed, long samples) {
    using namespace verify_detail;
    MarginAcc acc;
    for (const auto& P : families()) {
        Rng rng(check_seed(seed, std::string("lemma2.6ii:") + P.name()));
        for (long it = 0; it < samples; ++it) {
            const double u = rng.uniform(-2.0, 2.0);
            const auto v = rng.normal_vec(P.v_dim());
            double prev = -1e300;
            for (int i = 0; i <= 50; ++i) {
                const double s = static_cast<double>(i) / 50.0;
                std::vector<double> sv(v.size());
                for (size_t k = 0; k < v.size(); ++k) sv[k] = s * v[k];
                const double f = busemann_plus(P, HoroPoint{u, sv});
                acc.feed(f - prev + 1e-12, P.name() + " ray monotonicity");
                prev = f;
            }
            ++acc.samples;
        }
    }
    return finish("lemma2.6ii", "star-shaped sublevels: monotone along rays in v", acc);
}

// ------------------------------------------------------------- potentials

// Charges are shell-independent and equal mass; shell integrals of the
// potential tail decrease to zero; symmetric data gives equal charges.
inline CheckResult check_charges(std::uint64_t /*seed*/, long /*samples*/) {
    using namespace verify_detail;
    MarginAcc acc;
    {  // planar point mass
        const Grid g = build_grid(box2(1.0 / 32), {point_comp({0, 0, 0}, 1.0)});
        const auto pot = make_potential(g, point_comp({0, 0, 0}, 1.0));
        for (const double s : {0.05, 0.1, 0.2}) {
            acc.feed(1e-6 - std::abs(charge(g, pot, s) - 1.0), "planar point charge");
            ++acc.samples;
        }
        double prev = std::numeric_limits<double>::infinity();
        for (const double s : {0.2, 0.1, 0.05, 0.025}) {
            const double val = std::abs(shell_integral(g, pot, s));
            acc.feed(prev - val, "planar shell decrease");
            prev = val;
            ++acc.samples;
        }
        acc.feed(0.4 * std::abs(shell_integral(g, pot, 0.2)) - prev, "planar shell limit");
    }
    {  // spatial point mass
        const Grid g = build_grid(box3(1.0 / 16), {point_comp({0, 0, 0}, 1.0)});
        const auto pot = make_potential(g, point_comp({0, 0, 0}, 1.0));
        for (const double s : {0.05, 0.1, 0.2}) {
            acc.feed(1e-6 - std::abs(charge(g, pot, s) - 1.0), "spatial point charge");
            ++acc.samples;
        }
    }
    {  // spatial segment: total charge = density × length
        const auto c = segment_comp({-0.25, 0.0, 0.0}, {0.25, 0.0, 0.0}, 0.8);
        const Grid g = build_grid(box3(1.0 / 16), {c});
        const auto pot = make_potential(g, c);
        const double expect = 0.8 * c.length();
        for (const double s : {0.1, 0.2}) {
            acc.feed(1e-6 - std::abs(charge(g, pot, s) / expect - 1.0), "segment charge");
            ++acc.samples;
        }
    }
    {  // symmetric two-point data: equal charges
        const auto c1 = point_comp({-0.375, 0.0, 0.0}, 1.0);
        const auto c2 = point_comp({0.375, 0.0, 0.0}, 1.0);
        const Grid g = build_grid(box2(1.0 / 32), {c1, c2});
        const auto mp = multi_potential(g, {c1, c2});
        const double e1 = charge(g, mp.parts[0], 0.15);
        const double e2 = charge(g, mp.parts[1], 0.15);
        acc.feed(1e-9 - std::abs(e1 - e2), "symmetric pair equality");
        acc.samples += 2;
    }
    return finish("lemma2.7", "shell-independent unit charges; decreasing shell integrals", acc);
}

// The logarithmic cutoff has Dirichlet energy of order 1/|log eps|.
inline CheckResult check_log_cutoff(std::uint64_t /*seed*/, long /*samples*/) {
    using namespace verify_detail;
    MarginAcc acc;
    {
        const double eps = 0.2, h = 1.0 / 200;
        const Grid g = build_grid(box2(h), {point_comp({0, 0, 0}, 1.0)});
        const auto chi = log_cutoff(g, eps);
        auto at = [&](double x) {
            const long i = std::lround((x + 1.0) / h);
            const long j = std::lround(1.0 / h);
            return chi[i * g.stride(0) + j * g.stride(1)];
        };
        acc.feed(1e-12 - std::abs(at(eps) - 1.0), "outer transition value");
        acc.feed(1e-12 - std::abs(at(eps * eps)), "inner transition value");
        acc.feed(0.0 - std::abs(at(0.5 * eps * eps)) + 0.0, "inner plateau");
        acc.feed(0.0 - std::abs(at(2.0 * eps) - 1.0) + 0.0, "outer plateau");
        acc.feed(0.02 - std::abs(at(std::sqrt(eps * eps * eps)) - 0.5), "log midpoint");
        acc.samples += 5;
    }
    {
        std::vector<double> products;
        for (const double eps : {0.2, 0.1, 0.05}) {
            // geometrically similar grids: box half-width 5ε, spacing ε²/8
            const Grid g = build_grid(box2(eps * eps / 8.0, 5.0 * eps), {point_comp({0, 0, 0}, 1.0)});
            const auto chi = log_cutoff(g, eps);
            products.push_back(dirichlet_energy(g, chi) * std::abs(std::log(eps)));
            ++acc.samples;
        }
        const double lo = *std::min_element(products.begin(), products.end());
        const double hi = *std::max_element(products.begin(), products.end());
        acc.feed(1.2 - hi / lo, "scaling stability");
        for (const double p : products)
            acc.feed(0.2 - std::abs(p - 2.0 * M_PI) / (2.0 * M_PI), "continuum constant");
    }
    return finish("lemma2.8", "cutoff Dirichlet energy decays like 1/|log eps|", acc);
}

// ----------------------------------------------------------------- energy

// Weighted Poincare inequality for compactly supported v-fields.
inline CheckResult check_poincare(std::uint64_t seed, long samples) {
    using namespace verify_detail;
    MarginAcc acc;
    const std::vector<ModelParams> fams = {ModelParams(Family::Real, 2),
                                           ModelParams(Family::Complex, 2),
                                           ModelParams(Family::Quaternionic, 2)};
    for (const auto& P : fams) {
        Rng rng(check_seed(seed, std::string("lemma3.2:") + P.name()));
        const QForm q(P);
        const auto comp = point_comp({0, 0, 0}, 1.0, std::vector<double>(P.v_dim(), 0.0));
        const Grid g = build_grid(box2(1.0 / 32), {comp});
        const auto mp = multi_potential(g, {comp});
        long used = 0;
        for (long it = 0; it < 4 * samples + 100 && used < samples; ++it) {
            const double cx = rng.uniform(-0.45, 0.45);
            const double cy = rng.uniform(-0.45, 0.45);
            const double d0 = std::hypot(cx, cy);
            const double radius = std::min({0.25, d0 - 0.1, 0.9 - std::abs(cx), 0.9 - std::abs(cy)});
            std::vector<double> dir(P.v_dim());
            for (auto& d : dir) d = rng.uniform(-1.0, 1.0);
            if (radius < 0.1) continue;
            ++used;
            MapField f = MapField::zeros(g, P.v_dim());
            for (long id = 0; id < g.node_count(); ++id) {
                if (g.role[id] != NodeRole::Interior) continue;
                const auto x = g.coords(id);
                const double r2 = (x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy);
                if (r2 >= radius * radius) continue;
                const double t = 1.0 - r2 / (radius * radius);
                for (int c = 0; c < P.v_dim(); ++c) f.v_at(id)[c] = dir[c] * t * t;
            }
            const auto r = poincare_check(g, q, mp.u0, {comp}, f);
            acc.feed((r.rhs * (1.0 + 5.0 * g.spec.h) - r.lhs) / std::max(r.rhs, 1e-300),
                     P.name() + " inequality");
        }
        acc.samples += used;
    }
    return finish("lemma3.2", "weighted Poincare inequality with 1 + 5h slack", acc);
}

// Fields staying within distance R of the model map have forms equivalent to
// the model form edge by edge, with the explicit constant c(R).
inline CheckResult check_field_form_equivalence(std::uint64_t seed, long samples) {
    using namespace verify_detail;
    MarginAcc acc;
    const std::vector<ModelParams> fams = {ModelParams(Family::Real, 2),
                                           ModelParams(Family::Complex, 2),
                                           ModelParams(Family::Quaternionic, 2)};
    const double R = 1.0;
    const double C = 2.0 * R * std::exp(2.0 * R);
    const double c = std::exp(4.0 * R) * std::max(2.0, 4.0 * C * C + 1.0);
    const long n_fields = std::clamp<long>(samples / 100, 5, 200);
    for (const auto& P : fams) {
        Rng rng(check_seed(seed, std::string("lemma3.3:") + P.name()));
        const int vd = P.v_dim();
        std::vector<double> w(vd, 0.0);
        w[0] = 0.25;
        const auto comp = point_comp({0, 0, 0}, 1.0, w);
        const Grid g = build_grid(box2(1.0 / 8), {comp});
        const auto mp = multi_potential(g, {comp});
        const QForm q(P);
        for (long k = 0; k < n_fields; ++k) {
            MapField f = MapField::zeros(g, vd);
            for (long id = 0; id < g.node_count(); ++id) {
                if (!g.is_active(id)) continue;
                f.uhat[id] = rng.uniform(-0.5, 0.5);
                for (int cidx = 0; cidx < vd; ++cidx)
                    f.v_at(id)[cidx] = w[cidx] + 0.2 * rng.normal();
                // shrink the offsets until the point sits inside B_R(model)
                for (int bt = 0; bt < 200; ++bt) {
                    HoroPoint p{mp.u0[id] + f.uhat[id],
                                std::vector<double>(f.v_at(id), f.v_at(id) + vd)};
                    const HoroPoint p0{mp.u0[id], w};
                    if (dist_horo(P, p, p0) <= R - 1e-6) break;
                    f.uhat[id] *= 0.7;
                    for (int cidx = 0; cidx < vd; ++cidx)
                        f.v_at(id)[cidx] = w[cidx] + 0.7 * (f.v_at(id)[cidx] - w[cidx]);
                }
            }
            std::vector<double> dv(vd);
            for (const auto& e : g.edges) {
                for (int cidx = 0; cidx < vd; ++cidx)
                    dv[cidx] = f.v_at(e.b)[cidx] - f.v_at(e.a)[cidx];
                double dn = 0.0;
                for (const double x : dv) dn += x * x;
                if (dn == 0.0) continue;
                const double um = mp.u0[e.a] + 0.5 * (f.uhat[e.a] + f.uhat[e.b]);
                const double u0m = mp.u0[e.a];
                std::vector<double> vm(vd);
                for (int cidx = 0; cidx < vd; ++cidx)
                    vm[cidx] = 0.5 * (f.v_at(e.a)[cidx] + f.v_at(e.b)[cidx]);
                const double ratio = q.value(um, vm, dv) / q.value(u0m, w, dv);
                acc.feed(c * (1.0 + 1e-12) - ratio, P.name() + " upper");
                acc.feed(ratio - (1.0 - 1e-12) / c, P.name() + " lower");
            }
            ++acc.samples;
        }
    }
    return finish("lemma3.3", "edgewise form equivalence within distance R of the model", acc);
}

// The two truncation projections never increase the discrete energy.
inline CheckResult check_truncations(std::uint64_t seed, long samples) {
    using namespace verify_detail;
    MarginAcc acc;
    const std::vector<ModelParams> fams = {ModelParams(Family::Real, 2),
                                           ModelParams(Family::Complex, 2),
                                           ModelParams(Family::Quaternionic, 2)};
    const long n_fields = std::clamp<long>(samples, 20, 100);
    for (const auto& P : fams) {
        Rng rng(check_seed(seed, std::string("lemma3.5:") + P.name()));
        const int vd = P.v_dim();
        Problem pb;
        pb.params = P;
        pb.box = box2(1.0 / 8);
        std::vector<double> w(vd, 0.0);
        w[0] = 0.3;
        pb.comps = {point_comp({0, 0, 0}, 1.0, w)};
        pb.boundary.constant = true;
        pb.boundary.u = 0.2;
        pb.boundary.v = std::vector<double>(vd, 0.0);
        const Setup s = make_setup(pb);
        for (long k = 0; k < n_fields; ++k) {
            MapField f = s.init;
            for (long id = 0; id < s.grid.node_count(); ++id) {
                if (s.grid.role[id] != NodeRole::Interior) continue;
                f.uhat[id] += rng.uniform(-1.5, 2.5);  // exceed the caps regularly
                for (int cidx = 0; cidx < vd; ++cidx) f.v_at(id)[cidx] += rng.uniform(-0.5, 0.5);
            }
            const double F = discrete_F(s.grid, s.q, s.mp.u0, f, 1);
            MapField fu = f;
            truncate_u(s.grid, s.T, fu);
            acc.feed(F - discrete_F(s.grid, s.q, s.mp.u0, fu, 1), P.name() + " height truncation");
            MapField fb = f;
            truncate_ubar(P, s.grid, s.mp.u0, s.Tbar, fb);
            acc.feed(F - discrete_F(s.grid, s.q, s.mp.u0, fb, 1), P.name() + " reverse truncation");
            ++acc.samples;
        }
    }
    return finish("lemma3.5", "both truncations never increase the discrete energy", acc);
}

// ------------------------------------------------------------ cross-checks

// The explicit chart metric equals the finite-difference pullback of the
// disk-model metric at random points.
inline CheckResult check_metric_pullback(std::uint64_t seed, long samples) {
    using namespace verify_detail;
    MarginAcc acc;
    for (const auto& P : families()) {
        Rng rng(check_seed(seed, std::string("appendix-metric:") + P.name()));
        for (long it = 0; it < samples; ++it) {
            const DiskPoint z = random_disk_point(P, rng, 0.85);
            const HoroPoint p = disk_to_horo(P, z);
            const auto dz = random_disk_tangent(P, rng);
            const double g_disk = disk_metric(P, z, dz);
            // Richardson-extrapolated pushforward removes the h² term
            const auto t1 = fd_pushforward(P, z, dz, 2e-5);
            const auto t2 = fd_pushforward(P, z, dz, 1e-5);
            std::vector<double> t(t1.size());
            for (size_t i = 0; i < t.size(); ++i) t[i] = (4.0 * t2[i] - t1[i]) / 3.0;
            std::vector<double> tv(t.begin() + 1, t.end());
            const double g_fd = t[0] * t[0] + q_form(P, p, tv);
            acc.feed(1e-8 - std::abs(g_fd - g_disk) / (1.0 + std::abs(g_disk)),
                     P.name() + " pullback residual");
            ++acc.samples;
        }
    }
    return finish("appendix-metric", "chart metric equals the disk-metric pullback (1e-8)", acc);
}

// The closed-form distance is consistent with the geodesic flow: shooting
// from p along the connecting direction for that arclength lands on q.
inline CheckResult check_dist_ode(std::uint64_t seed, long samples) {
    using namespace verify_detail;
    MarginAcc acc;
    const long n_pairs = std::min<long>(samples, 150);
    for (const auto& P : families()) {
        Rng rng(check_seed(seed, std::string("dist-ode:") + P.name()));
        for (long it = 0; it < n_pairs; ++it) {
            const DiskPoint zp = random_disk_point(P, rng, 0.85);
            const DiskPoint zq = random_disk_point(P, rng, 0.85);
            const Connection c = connect_geodesic(P, zp, zq);
            const double L = dist_disk(P, zp, zq);
            acc.feed(1e-10 * (1.0 + L) - std::abs(c.length - L), P.name() + " length consistency");
            const HoroPoint hp = disk_to_horo(P, zp), hq = disk_to_horo(P, zq);
            const auto r = geodesic_ode(P, hp, c.dir, c.length);
            acc.feed(1e-6 - dist_horo(P, r.endpoint, hq), P.name() + " endpoint");
            ++acc.samples;
        }
    }
    return finish("dist-ode", "closed-form distance agrees with the geodesic flow (1e-6)", acc);
}

// ---------------------------------------------------------------- registry

struct CheckSpec {
    const char* id;
    const char* description;
    CheckResult (*run)(std::uint64_t, long);
};

inline const std::vector<CheckSpec>& check_registry() {
    static const std::vector<CheckSpec> reg = {
        {"norm1", "unit gradient of both renormalized distances (1e-6)", &check_norm1},
        {"lemma2.1", "vertical growth of the form within [e^{2a dt}, e^{2b dt}]", &check_jacobi},
        {"lemma2.2", "backward coalescence of verticals at rate e^{at}", &check_coalesce},
        {"lemma2.3", "horoball intersection inside the ball of radius T + log 2", &check_horoball},
        {"lemma2.4", "asymptotic shift along verticals: monotone, pinned limit",
         &check_busemann_limits},
        {"lemma2.5", "positive gradient pairing above the log 2 level",
         &check_gradient_positivity},
        {"lemma2.6i", "form equivalence on unit balls around the vertical",
         &check_form_equivalence},
        {"lemma2.6ii", "star-shaped sublevels: monotone along rays in v", &check_star_shaped},
        {"lemma2.7", "shell-independent unit charges; decreasing shell integrals", &check_charges},
        {"lemma2.8", "cutoff Dirichlet energy decays like 1/|log eps|", &check_log_cutoff},
        {"lemma3.2", "weighted Poincare inequality with 1 + 5h slack", &check_poincare},
        {"lemma3.3", "edgewise form equivalence within distance R of the model",
         &check_field_form_equivalence},
        {"lemma3.5", "both truncations never increase the discrete energy", &check_truncations},
        {"appendix-metric", "chart metric equals the disk-metric pullback (1e-8)",
         &check_metric_pullback},
        {"dist-ode", "closed-form distance agrees with the geodesic flow (1e-6)", &check_dist_ode},
    };
    return reg;
}

inline const CheckSpec* find_check(const std::string& id) {
    for (const auto& c : check_registry())
        if (id == c.id) return &c;
    return nullptr;
}

inline CheckResult run_check(const CheckSpec& spec, std::uint64_t seed, long samples) {
    CheckResult r = spec.run(seed, samples);
    r.id = spec.id;
    r.description = spec.description;
    return r;
}

}  // namespace harmap
