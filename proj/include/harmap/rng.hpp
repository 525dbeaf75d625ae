#pragma once

// Deterministic random sampling helpers.  All distributions are written out
// explicitly (rather than relying on std:: distribution objects) so that a
// fixed seed yields byte-identical streams independent of the standard
// library build — the CLI promises reproducible outputs under --seed.

#include <cmath>
#include <cstdint>
#include <vector>

#include "harmap/model.hpp"

namespace harmap {

// xoshiro256** by Blackman & Vigna (public domain reference implementation).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 seeding
        std::uint64_t x = seed;
        for (auto& si : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            si = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Standard normal via Box–Muller (deterministic two-call form).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    std::vector<double> normal_vec(int n) {
        std::vector<double> r(n);
        for (auto& x : r) x = normal();
        return r;
    }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t s_[4];
};

// Random point of the disk model with radius bounded away from 1.
inline DiskPoint random_disk_point(const ModelParams& P, Rng& rng, double max_radius = 0.9) {
    const int d = P.dim_k();
    DiskPoint p;
    p.z.resize(P.ell);
    double n2 = 0.0;
    for (auto& c : p.z) {
        c = Quat(rng.normal(), d > 1 ? rng.normal() : 0.0, d > 2 ? rng.normal() : 0.0,
                 d > 2 ? rng.normal() : 0.0);
        n2 += c.norm2();
    }
    // rescale to a uniform-in-[0, max_radius] radius
    const double r = max_radius * std::pow(rng.uniform(), 1.0 / P.real_dim());
    const double scale = r / std::sqrt(n2);
    for (auto& c : p.z) c = c * scale;
    return p;
}

// Random horospherical point with |u| ≤ u_range, ‖v‖ components ~ N(0, v_scale²).
inline HoroPoint random_horo_point(const ModelParams& P, Rng& rng, double u_range = 2.0,
                                   double v_scale = 1.0) {
    HoroPoint p;
    p.u = rng.uniform(-u_range, u_range);
    p.v.resize(P.v_dim());
    for (auto& x : p.v) x = v_scale * rng.normal();
    return p;
}

}  // namespace harmap
