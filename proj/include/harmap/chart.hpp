#pragma once

// The horospherical chart (u, v) adapted to the reference vertical geodesic,
// its intermediate w-coordinates, the closed-form Busemann functions, the
// reverse chart, and a cancellation-free distance formula.
//
// Chart (disk → horo):
//   u   = log( ‖1+z₁‖ / (1−‖z‖²)^{1/2} )
//   w₁  = (1−z₁)(1+z₁)⁻¹,   w_k = z_k(1+z₁)⁻¹  (k ≥ 2)
//   v_cross = −½ Vec(w₁),   v_flat = real components of (w₂, …, w_ℓ)
// with the identities  Re w₁ = e^{−2u} + Σ_{k≥2}‖w_k‖²  and
// 1 − ‖z‖² = 4 e^{−2u} / ‖1+w₁‖².

#include <algorithm>
#include <cmath>
#include <vector>

#include "harmap/metric.hpp"
#include "harmap/model.hpp"

namespace harmap {

// Intermediate representation: (u, w₁, w₂…w_ℓ) with w_k ∈ K.
struct WPoint {
    double u = 0.0;
    Quat w1;
    std::vector<Quat> wk;  // length ℓ−1
};

namespace detail {

// Pack the real components of x ∈ K into dst (dim_K of them).
inline void pack_scalar(Family f, const Quat& x, double* dst) {
    dst[0] = x.w;
    if (f != Family::Real) dst[1] = x.x;
    if (f == Family::Quaternionic) {
        dst[2] = x.y;
        dst[3] = x.z;
    }
}

inline Quat unpack_scalar(Family f, const double* src) {
    Quat q(src[0]);
    if (f != Family::Real) q.x = src[1];
    if (f == Family::Quaternionic) {
        q.y = src[2];
        q.z = src[3];
    }
    return q;
}

}  // namespace detail

inline WPoint horo_to_w(const ModelParams& P, const HoroPoint& p) {
    check_dims(P, p, "horo_to_w");
    WPoint W;
    W.u = p.u;
    W.wk.resize(P.ell - 1);
    const int cd = P.cross_dim(), dk = P.dim_k();
    double s = 0.0;
    for (int k = 0; k + 1 < P.ell; ++k) {
        W.wk[k] = detail::unpack_scalar(P.fam, p.v.data() + cd + k * dk);
        s += W.wk[k].norm2();
    }
    W.w1 = Quat(std::exp(-2.0 * p.u) + s);
    if (cd >= 1) W.w1.x = -2.0 * p.v[0];
    if (cd == 3) {
        W.w1.y = -2.0 * p.v[1];
        W.w1.z = -2.0 * p.v[2];
    }
    return W;
}

inline HoroPoint w_to_horo(const ModelParams& P, const WPoint& W) {
    HoroPoint p;
    p.u = W.u;
    p.v.assign(P.v_dim(), 0.0);
    const int cd = P.cross_dim(), dk = P.dim_k();
    if (cd >= 1) p.v[0] = -0.5 * W.w1.x;
    if (cd == 3) {
        p.v[1] = -0.5 * W.w1.y;
        p.v[2] = -0.5 * W.w1.z;
    }
    for (int k = 0; k + 1 < P.ell; ++k)
        detail::pack_scalar(P.fam, W.wk[k], p.v.data() + cd + k * dk);
    return p;
}

inline HoroPoint disk_to_horo(const ModelParams& P, const DiskPoint& z) {
    check_dims(P, z, "disk_to_horo");
    const Quat one = Quat::one();
    const Quat den = (one + z.z[0]).inv();
    WPoint W;
    W.w1 = (one - z.z[0]) * den;
    W.wk.resize(P.ell - 1);
    for (int k = 1; k < P.ell; ++k) W.wk[k - 1] = z.z[k] * den;
    W.u = 0.5 * std::log((one + z.z[0]).norm2() / (1.0 - z.norm2()));
    return w_to_horo(P, W);
}

inline DiskPoint horo_to_disk(const ModelParams& P, const HoroPoint& p) {
    const WPoint W = horo_to_w(P, p);
    const Quat one = Quat::one();
    const Quat inv1 = (one + W.w1).inv();
    DiskPoint z;
    z.z.resize(P.ell);
    z.z[0] = inv1 * (one - W.w1);
    for (int k = 1; k < P.ell; ++k) z.z[k] = 2.0 * (W.wk[k - 1] * inv1);
    return z;
}

// 1 − ‖z‖² evaluated without cancellation from horospherical data.
inline double one_minus_normsq(const WPoint& W) {
    return 4.0 * std::exp(-2.0 * W.u) / (Quat::one() + W.w1).norm2();
}

// f_{−γ}: the Busemann function of the reversed reference ray; equals the
// chart coordinate u (disk form: log(‖1+z₁‖ / (1−‖z‖²)^{1/2})).
inline double busemann_minus(const ModelParams& P, const HoroPoint& p) {
    check_dims(P, p, "busemann_minus");
    return p.u;
}

// f_γ = ū via the closed form e^{2ū} = e^{2u}·‖w₁‖², expanded as
// e^{2ū} = (e^{−u} + e^{u}·Σ_flat v²)² + 4 e^{2u} ‖v_cross‖².
inline double busemann_plus(const ModelParams& P, const HoroPoint& p) {
    check_dims(P, p, "busemann_plus");
    const int cd = P.cross_dim();
    double sf = 0.0, c2 = 0.0;
    for (int i = 0; i < cd; ++i) c2 += p.v[i] * p.v[i];
    for (int i = cd; i < P.v_dim(); ++i) sf += p.v[i] * p.v[i];
    const double re = std::exp(-2.0 * p.u) + sf;  // Re w₁
    return p.u + 0.5 * std::log(re * re + 4.0 * c2);
}

// The reverse chart (ū, v̄): the chart adapted to the reversed geodesic,
// obtained by conjugating with the endpoint swap z₁ ↦ −z₁.  In
// w-coordinates the swap is exactly w₁ ↦ w₁⁻¹, w_k ↦ w_k·w₁⁻¹, and the new
// height is ū = u + log‖w₁‖; this algebraic route stays accurate at large
// |u| where disk coordinates saturate.
inline HoroPoint reverse_chart(const ModelParams& P, const HoroPoint& p) {
    WPoint W = horo_to_w(P, p);
    const Quat inv1 = W.w1.inv();
    WPoint R;
    R.u = W.u + 0.5 * std::log(W.w1.norm2());
    R.w1 = inv1;
    R.wk.resize(W.wk.size());
    for (size_t k = 0; k < W.wk.size(); ++k) R.wk[k] = W.wk[k] * inv1;
    return w_to_horo(P, R);
}

// Endpoint swap applied to a disk point: z₁ ↦ −z₁ (form-preserving diagonal map).
inline DiskPoint endpoint_swap(const ModelParams& P, DiskPoint z) {
    check_dims(P, z, "endpoint_swap");
    z.z[0] = -z.z[0];
    return z;
}

// Vertical geodesic γ_v(t) = (t, v); unit speed.
inline HoroPoint geodesic_vertical(const ModelParams& P, const std::vector<double>& v0, double t) {
    HoroPoint p;
    p.u = t;
    p.v = v0;
    check_dims(P, p, "geodesic_vertical");
    return p;
}

// dist(p, q) = cosh⁻¹( ½ e^{u+u'} ‖ w̄₁ + w'₁ − 2 Σ_{k≥2} w̄_k w'_k ‖ ).
// The real part of the argument is the exact sum
// e^{−2u} + e^{−2u'} + Σ‖w_k − w'_k‖², so the cosh⁻¹ argument minus one is
//   ½ [ 4 sinh²((u−u')/2) + e^{u+u'} Σ‖Δw_k‖² + e^{u+u'}·‖vec‖²/(n + re) ],
// a sum of non-negative terms — full relative accuracy down to dist = 0 —
// and the half-angle form cosh⁻¹(x) = 2 sinh⁻¹(√((x−1)/2)) finishes stably.
inline double dist_w(const WPoint& A, const WPoint& B) {
    const double eA = std::exp(-2.0 * A.u), eB = std::exp(-2.0 * B.u);
    double sd = 0.0;
    Quat vec = A.w1.conj() + B.w1;  // real part replaced below
    vec.w = 0.0;
    for (size_t k = 0; k < A.wk.size(); ++k) {
        const Quat d = B.wk[k] - A.wk[k];
        sd += d.norm2();
        Quat cross = A.wk[k].conj() * d;  // Vec(w̄_k w'_k) = Vec(w̄_k (w'_k − w_k))
        cross.w = 0.0;
        vec -= 2.0 * cross;
    }
    const double re = eA + eB + sd;
    const double c2 = vec.norm2();
    const double n = std::sqrt(re * re + c2);
    const double epu = std::exp(A.u + B.u);
    const double sh = std::sinh(0.5 * (A.u - B.u));
    const double xm1 = 0.5 * (4.0 * sh * sh + epu * sd + epu * c2 / (n + re));
    return 2.0 * std::asinh(std::sqrt(0.5 * xm1));
}

inline double dist_horo(const ModelParams& P, const HoroPoint& p, const HoroPoint& q) {
    return dist_w(horo_to_w(P, p), horo_to_w(P, q));
}

// Distance in the disk model:
// cosh d = ‖1 − ⟨⟨z, w⟩⟩‖ / ((1−‖z‖²)(1−‖w‖²))^{1/2}.
inline double dist_disk(const ModelParams& P, const DiskPoint& z, const DiskPoint& w) {
    check_dims(P, z, "dist_disk");
    check_dims(P, w, "dist_disk");
    Quat ip{};
    for (int k = 0; k < P.ell; ++k) ip += z.z[k].conj() * w.z[k];
    const double num = (Quat::one() - ip).norm();
    const double den = std::sqrt((1.0 - z.norm2()) * (1.0 - w.norm2()));
    return std::acosh(std::max(num / den, 1.0));
}

// Differential of disk_to_horo at z applied to dz; returns (du, dv).
inline std::pair<double, std::vector<double>> chart_differential(const ModelParams& P,
                                                                 const DiskPoint& z,
                                                                 const std::vector<Quat>& dz) {
    check_dims(P, z, "chart_differential");
    const Quat one = Quat::one();
    const Quat opz = one + z.z[0];
    const Quat den = opz.inv();
    const Quat w1 = (one - z.z[0]) * den;
    const double omn = 1.0 - z.norm2();

    double du = ((opz.conj() * dz[0]).w) / opz.norm2();
    for (int k = 0; k < P.ell; ++k) du += (z.z[k].conj() * dz[k]).w / omn;

    const Quat t = dz[0] * den;
    const Quat dw1 = -1.0 * ((one + w1) * t);
    std::vector<double> dv(P.v_dim(), 0.0);
    const int cd = P.cross_dim(), dk = P.dim_k();
    if (cd >= 1) dv[0] = -0.5 * dw1.x;
    if (cd == 3) {
        dv[1] = -0.5 * dw1.y;
        dv[2] = -0.5 * dw1.z;
    }
    for (int k = 1; k < P.ell; ++k) {
        const Quat wk = z.z[k] * den;
        const Quat dwk = (dz[k] - wk * dz[0]) * den;
        detail::pack_scalar(P.fam, dwk, dv.data() + cd + (k - 1) * dk);
    }
    return {du, dv};
}

// ---- N-translations: the unipotent isometries fixing γ(−∞) pointwise on u. ----
// τ_w(u, v) = (u, v_cross + w_cross − B(w_flat, v_flat), v_flat + w_flat)
// with B_c(w, v) = Σ_{(i,j,s) ∈ table_c} s·w_i·v_j (same tables as Q).

inline std::vector<double> n_translate_offset(const QForm& Q, const std::vector<double>& w,
                                              const std::vector<double>& v) {
    const int cd = Q.cross_dim(), vd = Q.v_dim();
    std::vector<double> r(vd);
    for (int c = 0; c < cd; ++c) {
        double b = 0.0;
        for (const auto& t : Q.tables()[c]) b += t.s * w[t.vi] * v[t.xj];
        r[c] = v[c] + w[c] - b;
    }
    for (int j = cd; j < vd; ++j) r[j] = v[j] + w[j];
    return r;
}

inline HoroPoint n_translate(const QForm& Q, const std::vector<double>& w, const HoroPoint& p) {
    return HoroPoint{p.u, n_translate_offset(Q, w, p.v)};
}

// Parameters of τ_a ∘ τ_b; the group law (a, b) ↦ a·b.  Inverse is −a
// (the tables are antisymmetric, so B_c(a, a) = 0).
inline std::vector<double> compose_offsets(const QForm& Q, const std::vector<double>& a,
                                           const std::vector<double>& b) {
    return n_translate_offset(Q, a, b);
}

inline std::vector<double> offset_inverse(const std::vector<double>& a) {
    std::vector<double> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

// Dilation along the reference geodesic: maps γ_0(s) to γ_0(s−t);
// (u, v) ↦ (u − t, e^{2t} v_cross, e^{t} v_flat).
inline HoroPoint dilate(const ModelParams& P, double t, const HoroPoint& p) {
    check_dims(P, p, "dilate");
    HoroPoint r;
    r.u = p.u - t;
    r.v.resize(p.v.size());
    const int cd = P.cross_dim();
    const double e1 = std::exp(t), e2 = e1 * e1;
    for (int i = 0; i < cd; ++i) r.v[i] = e2 * p.v[i];
    for (int i = cd; i < P.v_dim(); ++i) r.v[i] = e1 * p.v[i];
    return r;
}

}  // namespace harmap
