#include <doctest.h>

#include <cmath>

#include "harmap/chart.hpp"
#include "harmap/rng.hpp"

using namespace harmap;

namespace {
const ModelParams kAll[] = {ModelParams(Family::Real, 2), ModelParams(Family::Real, 3),
                            ModelParams(Family::Complex, 2), ModelParams(Family::Complex, 3),
                            ModelParams(Family::Quaternionic, 2)};
}

TEST_CASE("disk_to_horo pinned values") {
    // z = 0 → (0, 0)
    for (const auto& P : kAll) {
        DiskPoint z;
        z.z.assign(P.ell, Quat{});
        const HoroPoint p = disk_to_horo(P, z);
        CHECK(p.u == doctest::Approx(0.0).epsilon(1e-14));
        for (double vi : p.v) CHECK(std::abs(vi) < 1e-14);
    }
    // z = tanh(t)·e₁ → (t, 0)
    for (const auto& P : kAll) {
        for (double t : {-2.0, -0.3, 0.7, 3.0}) {
            DiskPoint z;
            z.z.assign(P.ell, Quat{});
            z.z[0] = Quat(std::tanh(t));
            const HoroPoint p = disk_to_horo(P, z);
            CHECK(p.u == doctest::Approx(t).epsilon(1e-12));
            for (double vi : p.v) CHECK(std::abs(vi) < 1e-13);
        }
    }
    // K=C, ℓ=2, z = (0, 0.3): u = −½ log 0.91, v = (0, 0.3, 0)
    {
        const ModelParams P(Family::Complex, 2);
        DiskPoint z;
        z.z = {Quat(0), Quat(0.3)};
        const HoroPoint p = disk_to_horo(P, z);
        CHECK(p.u == doctest::Approx(-0.5 * std::log(0.91)).epsilon(1e-14));
        CHECK(p.v[0] == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(p.v[1] == doctest::Approx(0.3).epsilon(1e-14));
        CHECK(p.v[2] == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("chart round trips") {
    Rng rng(7);
    for (const auto& P : kAll) {
        for (int it = 0; it < 200; ++it) {
            const DiskPoint z = random_disk_point(P, rng);
            const HoroPoint p = disk_to_horo(P, z);
            const DiskPoint z2 = horo_to_disk(P, p);
            for (int k = 0; k < P.ell; ++k) CHECK((z2.z[k] - z.z[k]).norm() < 1e-12);

            const HoroPoint q = random_horo_point(P, rng);
            const HoroPoint q2 = disk_to_horo(P, horo_to_disk(P, q));
            CHECK(std::abs(q2.u - q.u) < 1e-12 * (1.0 + std::abs(q.u)));
            for (int i = 0; i < P.v_dim(); ++i) CHECK(std::abs(q2.v[i] - q.v[i]) < 1e-11);
        }
    }
}

TEST_CASE("one_minus_normsq identity") {
    Rng rng(8);
    for (const auto& P : kAll) {
        for (int it = 0; it < 100; ++it) {
            const DiskPoint z = random_disk_point(P, rng);
            const WPoint W = horo_to_w(P, disk_to_horo(P, z));
            CHECK(one_minus_normsq(W) ==
                  doctest::Approx(1.0 - z.norm2()).epsilon(1e-11));
        }
    }
}

TEST_CASE("busemann pinned values") {
    const ModelParams P(Family::Real, 2);
    HoroPoint o{0.0, {0.0}};
    CHECK(busemann_minus(P, o) == 0.0);
    CHECK(busemann_plus(P, o) == doctest::Approx(0.0).epsilon(1e-14));
    for (double t : {-3.0, 0.5, 2.0}) {
        HoroPoint p{t, {0.0}};
        CHECK(busemann_minus(P, p) == t);
        CHECK(busemann_plus(P, p) == doctest::Approx(-t).epsilon(1e-13));
    }
    // K=R, ℓ=2, p = (0, 1): ū = log(e⁰ + e⁰·1) = ln 2
    HoroPoint p1{0.0, {1.0}};
    CHECK(busemann_plus(P, p1) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("busemann limit definition oracle") {
    // f_{−γ}(p) = lim dist(p, γ(−t)) − t,  f_γ(p) = lim dist(p, γ(t)) − t.
    Rng rng(9);
    const double t = 20.0;
    for (const auto& P : kAll) {
        for (int it = 0; it < 40; ++it) {
            const HoroPoint p = random_horo_point(P, rng);
            std::vector<double> zero(P.v_dim(), 0.0);
            const HoroPoint gm = geodesic_vertical(P, zero, -t);
            const HoroPoint gp = geodesic_vertical(P, zero, t);
            CHECK(std::abs(busemann_minus(P, p) - (dist_horo(P, p, gm) - t)) < 1e-6);
            CHECK(std::abs(busemann_plus(P, p) - (dist_horo(P, p, gp) - t)) < 1e-6);
        }
    }
}

TEST_CASE("reverse_chart contracts") {
    Rng rng(10);
    for (const auto& P : kAll) {
        // (t, 0) → (−t, 0)
        std::vector<double> zero(P.v_dim(), 0.0);
        for (double t : {-1.5, 0.0, 2.5}) {
            const HoroPoint r = reverse_chart(P, geodesic_vertical(P, zero, t));
            CHECK(r.u == doctest::Approx(-t).epsilon(1e-13));
            for (double vi : r.v) CHECK(std::abs(vi) < 1e-13);
        }
        for (int it = 0; it < 200; ++it) {
            const HoroPoint p = random_horo_point(P, rng);
            const HoroPoint r = reverse_chart(P, p);
            // first coordinate = busemann_plus
            CHECK(std::abs(r.u - busemann_plus(P, p)) < 1e-12 * (1.0 + std::abs(r.u)));
            // involution
            const HoroPoint p2 = reverse_chart(P, r);
            CHECK(std::abs(p2.u - p.u) < 1e-12 * (1.0 + std::abs(p.u)));
            for (int i = 0; i < P.v_dim(); ++i)
                CHECK(std::abs(p2.v[i] - p.v[i]) < 1e-11 * (1.0 + std::abs(p.v[i])));
        }
        // matches the endpoint-swap route through the disk at moderate radius
        for (int it = 0; it < 50; ++it) {
            const DiskPoint z = random_disk_point(P, rng, 0.8);
            const HoroPoint via_disk = disk_to_horo(P, endpoint_swap(P, z));
            const HoroPoint via_w = reverse_chart(P, disk_to_horo(P, z));
            CHECK(std::abs(via_disk.u - via_w.u) < 1e-10);
            for (int i = 0; i < P.v_dim(); ++i)
                CHECK(std::abs(via_disk.v[i] - via_w.v[i]) < 1e-10);
        }
        // stays accurate far up the cusp, where the disk route would lose digits
        for (double t : {8.0, 15.0}) {
            HoroPoint p = random_horo_point(P, rng, 0.0);
            p.u = t;
            const HoroPoint p2 = reverse_chart(P, reverse_chart(P, p));
            CHECK(std::abs(p2.u - p.u) < 1e-11);
            for (int i = 0; i < P.v_dim(); ++i) CHECK(std::abs(p2.v[i] - p.v[i]) < 1e-11);
        }
    }
}

TEST_CASE("dilation and n-translation chart maps") {
    Rng rng(11);
    for (const auto& P : kAll) {
        const QForm Q(P);
        // dilation moves γ_0(s) to γ_0(s−t)
        std::vector<double> zero(P.v_dim(), 0.0);
        const HoroPoint g = dilate(P, 0.7, geodesic_vertical(P, zero, 1.2));
        CHECK(g.u == doctest::Approx(0.5).epsilon(1e-14));
        // n-translation: group law and inverse
        for (int it = 0; it < 100; ++it) {
            const auto a = rng.normal_vec(P.v_dim());
            const auto b = rng.normal_vec(P.v_dim());
            const HoroPoint p = random_horo_point(P, rng);
            const HoroPoint lhs = n_translate(Q, a, n_translate(Q, b, p));
            const HoroPoint rhs = n_translate(Q, compose_offsets(Q, a, b), p);
            CHECK(lhs.u == rhs.u);
            for (int i = 0; i < P.v_dim(); ++i)
                CHECK(lhs.v[i] == doctest::Approx(rhs.v[i]).epsilon(1e-12));
            const HoroPoint id = n_translate(Q, offset_inverse(a), n_translate(Q, a, p));
            for (int i = 0; i < P.v_dim(); ++i)
                CHECK(id.v[i] == doctest::Approx(p.v[i]).epsilon(1e-12));
        }
    }
    // pinned K=C cross formula: v₁ + w₁ − Σ(w_{2k}v_{2k+1} − w_{2k+1}v_{2k})
    {
        const ModelParams P(Family::Complex, 2);
        const QForm Q(P);
        const std::vector<double> w = {0.3, -0.5, 0.2}, v = {1.0, 0.4, -0.7};
        const auto r = n_translate_offset(Q, w, v);
        CHECK(r[0] == doctest::Approx(v[0] + w[0] - (w[1] * v[2] - w[2] * v[1])).epsilon(1e-15));
        CHECK(r[1] == doctest::Approx(v[1] + w[1]).epsilon(1e-15));
        CHECK(r[2] == doctest::Approx(v[2] + w[2]).epsilon(1e-15));
    }
}
