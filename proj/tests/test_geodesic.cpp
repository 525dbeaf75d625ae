#include <doctest.h>

#include <cmath>

#include "harmap/geodesic.hpp"
#include "harmap/rng.hpp"

using namespace harmap;

namespace {
const ModelParams kAll[] = {ModelParams(Family::Real, 2), ModelParams(Family::Complex, 2),
                            ModelParams(Family::Quaternionic, 2)};

std::vector<double> unit_dir(const ModelParams& P, const HoroPoint& p, Rng& rng) {
    std::vector<double> dir = rng.normal_vec(P.real_dim());
    const double n = tangent_norm(P, p, dir);
    for (auto& x : dir) x /= n;
    return dir;
}
}  // namespace

TEST_CASE("geodesic_ode: vertical direction stays vertical") {
    for (const auto& P : kAll) {
        HoroPoint o{0.0, std::vector<double>(P.v_dim(), 0.0)};
        std::vector<double> dir(P.real_dim(), 0.0);
        dir[0] = 1.0;
        for (double t : {-1.5, 0.5, 2.0}) {
            const auto r = geodesic_ode(P, o, dir, t);
            CHECK(std::abs(r.endpoint.u - t) < 1e-8);
            for (double vi : r.endpoint.v) CHECK(std::abs(vi) < 1e-8);
        }
    }
}

TEST_CASE("geodesic_ode rejects non-unit directions") {
    const ModelParams P(Family::Real, 2);
    HoroPoint o{0.0, {0.0}};
    CHECK_THROWS_AS(geodesic_ode(P, o, std::vector<double>{2.0, 0.0}, 1.0),
                    std::invalid_argument);
}

TEST_CASE("geodesic_ode matches radial disk geodesics through the origin") {
    Rng rng(51);
    for (const auto& P : kAll) {
        for (int it = 0; it < 10; ++it) {
            // unit disk direction at o
            const int d = P.dim_k();
            std::vector<Quat> dhat(P.ell);
            double n2 = 0.0;
            for (auto& c : dhat) {
                c = Quat(rng.normal(), d > 1 ? rng.normal() : 0.0, d > 2 ? rng.normal() : 0.0,
                         d > 2 ? rng.normal() : 0.0);
                n2 += c.norm2();
            }
            for (auto& c : dhat) c = c * (1.0 / std::sqrt(n2));

            DiskPoint o;
            o.z.assign(P.ell, Quat{});
            auto [du, dv] = chart_differential(P, o, dhat);
            std::vector<double> dir(P.real_dim());
            dir[0] = du;
            for (int i = 0; i < P.v_dim(); ++i) dir[i + 1] = dv[i];
            CHECK(tangent_norm(P, disk_to_horo(P, o), dir) == doctest::Approx(1.0).epsilon(1e-12));

            const double t = rng.uniform(0.2, 1.6);
            const auto r = geodesic_ode(P, disk_to_horo(P, o), dir, t);
            DiskPoint target;
            target.z.resize(P.ell);
            for (int k = 0; k < P.ell; ++k) target.z[k] = dhat[k] * std::tanh(t);
            const HoroPoint th = disk_to_horo(P, target);
            CHECK(std::abs(r.endpoint.u - th.u) < 1e-8);
            for (int i = 0; i < P.v_dim(); ++i) CHECK(std::abs(r.endpoint.v[i] - th.v[i]) < 1e-8);
        }
    }
}

TEST_CASE("geodesic_ode is unit speed and consistent with dist") {
    Rng rng(52);
    for (const auto& P : kAll) {
        for (int it = 0; it < 12; ++it) {
            const HoroPoint p = random_horo_point(P, rng, 1.0, 0.7);
            const auto dir = unit_dir(P, p, rng);
            const double t = rng.uniform(-1.5, 1.5);
            const auto r = geodesic_ode(P, p, dir, t);
            CHECK(std::abs(dist_horo(P, p, r.endpoint) - std::abs(t)) < 1e-6);
            CHECK(tangent_norm(P, r.endpoint, r.velocity) == doctest::Approx(1.0).epsilon(1e-7));
        }
    }
}

TEST_CASE("connect_geodesic lands on the target at arclength = dist") {
    Rng rng(53);
    for (const auto& P : kAll) {
        for (int it = 0; it < 15; ++it) {
            const DiskPoint zp = random_disk_point(P, rng, 0.85);
            const DiskPoint zq = random_disk_point(P, rng, 0.85);
            const Connection c = connect_geodesic(P, zp, zq);
            CHECK(c.length == doctest::Approx(dist_disk(P, zp, zq)).epsilon(1e-12));
            // closed-form endpoints
            const DiskPoint a = connection_point(P, c, 0.0), b = connection_point(P, c, c.length);
            for (int k = 0; k < P.ell; ++k) {
                CHECK((a.z[k] - zp.z[k]).norm() < 1e-10);
                CHECK((b.z[k] - zq.z[k]).norm() < 1e-10);
            }
            // the ODE flow from p with the connection direction reaches q
            const HoroPoint hp = disk_to_horo(P, zp), hq = disk_to_horo(P, zq);
            CHECK(tangent_norm(P, hp, c.dir) == doctest::Approx(1.0).epsilon(1e-10));
            const auto r = geodesic_ode(P, hp, c.dir, c.length);
            CHECK(dist_horo(P, r.endpoint, hq) < 1e-7);
        }
    }
}
