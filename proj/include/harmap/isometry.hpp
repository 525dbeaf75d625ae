#pragma once

// Isometries of H^ℓ_K in both models: Möbius matrices of the indefinite
// form x̄₀y₀ − Σ x̄_k y_k acting projectively on the disk, the unipotent
// N-translations, dilations along the reference geodesic, and the endpoint
// swap.  Construction validates form preservation; all variants preserve
// distances (certified in the test suite).

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "harmap/chart.hpp"
#include "harmap/metric.hpp"
#include "harmap/model.hpp"

namespace harmap {

struct MobiusMatrix {
    int n = 0;             // ℓ + 1
    std::vector<Quat> a;   // row-major n×n over K

    const Quat& at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
    Quat& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }

    static MobiusMatrix identity(int n) {
        MobiusMatrix h;
        h.n = n;
        h.a.assign(static_cast<size_t>(n) * n, Quat{});
        for (int i = 0; i < n; ++i) h.at(i, i) = Quat::one();
        return h;
    }

    MobiusMatrix operator*(const MobiusMatrix& o) const {
        MobiusMatrix r;
        r.n = n;
        r.a.assign(static_cast<size_t>(n) * n, Quat{});
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j) r.at(i, j) += at(i, k) * o.at(k, j);
        return r;
    }

    // h⁻¹ = J hᴴ J for form-preserving h, J = diag(1, −1, …, −1).
    MobiusMatrix inverse() const {
        MobiusMatrix r;
        r.n = n;
        r.a.resize(static_cast<size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double sign = ((i == 0) ? 1.0 : -1.0) * ((j == 0) ? 1.0 : -1.0);
                r.at(i, j) = at(j, i).conj() * sign;
            }
        return r;
    }

    // max |(hᴴJh − J)_{jk}| over all entries.
    double form_residual() const {
        double res = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Quat s = at(0, j).conj() * at(0, k);
                for (int i = 1; i < n; ++i) s -= at(i, j).conj() * at(i, k);
                const double target = (j == k) ? (j == 0 ? 1.0 : -1.0) : 0.0;
                s.w -= target;
                res = std::max(res, s.norm());
            }
        return res;
    }
};

inline void validate_mobius(const ModelParams& P, const MobiusMatrix& h) {
    if (h.n != P.ell + 1) throw std::invalid_argument("MobiusMatrix: wrong size");
    for (const auto& q : h.a) KScalar(P.fam, q);
    if (h.form_residual() > 1e-12)
        throw std::invalid_argument("MobiusMatrix: does not preserve the bilinear form");
}

// Projective action (h·z)_k = (h_{k0} + Σ_j h_{kj} z_j)·(h_{00} + Σ_j h_{0j} z_j)⁻¹.
inline DiskPoint mobius_apply(const ModelParams& P, const MobiusMatrix& h, const DiskPoint& z) {
    check_dims(P, z, "mobius_apply");
    if (h.n != P.ell + 1) throw std::invalid_argument("mobius_apply: matrix size");
    Quat den = h.at(0, 0);
    for (int j = 1; j <= P.ell; ++j) den += h.at(0, j) * z.z[j - 1];
    const Quat dinv = den.inv();
    DiskPoint r;
    r.z.resize(P.ell);
    for (int k = 1; k <= P.ell; ++k) {
        Quat num = h.at(k, 0);
        for (int j = 1; j <= P.ell; ++j) num += h.at(k, j) * z.z[j - 1];
        r.z[k - 1] = num * dinv;
    }
    return r;
}

// Differential of the Möbius action at z applied to dz.
inline std::vector<Quat> mobius_differential(const ModelParams& P, const MobiusMatrix& h,
                                             const DiskPoint& z, const std::vector<Quat>& dz) {
    Quat den = h.at(0, 0), dden{};
    for (int j = 1; j <= P.ell; ++j) {
        den += h.at(0, j) * z.z[j - 1];
        dden += h.at(0, j) * dz[j - 1];
    }
    const Quat dinv = den.inv();
    std::vector<Quat> r(P.ell);
    for (int k = 1; k <= P.ell; ++k) {
        Quat num = h.at(k, 0), dnum{};
        for (int j = 1; j <= P.ell; ++j) {
            num += h.at(k, j) * z.z[j - 1];
            dnum += h.at(k, j) * dz[j - 1];
        }
        r[k - 1] = dnum * dinv - (num * dinv) * (dden * dinv);
    }
    return r;
}

// Hyperbolic translation taking z to the origin: 2×2 block
// [[cosh d, −sinh d · b̄ᵀ], [−sinh d · b, I + (cosh d − 1)·b b̄ᵀ]]
// with d = tanh⁻¹‖z‖ and b = z/‖z‖, extended by the identity.
inline MobiusMatrix transvection_to_origin(const ModelParams& P, const DiskPoint& z) {
    check_dims(P, z, "transvection_to_origin");
    const int n = P.ell + 1;
    const double r = std::sqrt(z.norm2());
    if (r < 1e-300) return MobiusMatrix::identity(n);
    const double d = std::atanh(r);
    const double c = std::cosh(d), s = std::sinh(d);
    std::vector<Quat> b(P.ell);
    for (int k = 0; k < P.ell; ++k) b[k] = z.z[k] * (1.0 / r);
    MobiusMatrix h = MobiusMatrix::identity(n);
    h.at(0, 0) = Quat(c);
    for (int k = 1; k <= P.ell; ++k) {
        h.at(0, k) = b[k - 1].conj() * (-s);
        h.at(k, 0) = b[k - 1] * (-s);
        for (int j = 1; j <= P.ell; ++j) h.at(k, j) += (b[k - 1] * b[j - 1].conj()) * (c - 1.0);
    }
    return h;
}

struct NTranslation {
    std::vector<double> w;  // offset ∈ R^{m−1}
};
struct Dilation {
    double t = 0.0;
};
struct EndpointSwap {};

struct Isometry {
    std::variant<MobiusMatrix, NTranslation, Dilation, EndpointSwap> rep;
};

inline HoroPoint apply_isometry(const ModelParams& P, const Isometry& iso, const HoroPoint& p);

inline DiskPoint apply_isometry(const ModelParams& P, const Isometry& iso, const DiskPoint& z) {
    if (const auto* h = std::get_if<MobiusMatrix>(&iso.rep)) return mobius_apply(P, *h, z);
    if (std::holds_alternative<EndpointSwap>(iso.rep)) return endpoint_swap(P, z);
    return horo_to_disk(P, apply_isometry(P, iso, disk_to_horo(P, z)));
}

inline HoroPoint apply_isometry(const ModelParams& P, const Isometry& iso, const HoroPoint& p) {
    if (const auto* nt = std::get_if<NTranslation>(&iso.rep)) {
        const QForm Q(P);
        return n_translate(Q, nt->w, p);
    }
    if (const auto* dl = std::get_if<Dilation>(&iso.rep)) return dilate(P, dl->t, p);
    if (std::holds_alternative<EndpointSwap>(iso.rep))
        return reverse_chart(P, p);  // coordinates of the swapped point in the fixed chart
    return disk_to_horo(P, apply_isometry(P, iso, horo_to_disk(P, p)));
}

// n_translation / dilation_tau as map factories (operation-level API).
inline Isometry n_translation(const ModelParams& P, std::vector<double> w) {
    if (static_cast<int>(w.size()) != P.v_dim())
        throw std::invalid_argument("n_translation: offset dimension");
    return Isometry{NTranslation{std::move(w)}};
}

inline Isometry dilation_tau(const ModelParams& /*P*/, double t) { return Isometry{Dilation{t}}; }

}  // namespace harmap
