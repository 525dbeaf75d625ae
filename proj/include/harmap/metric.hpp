#pragma once

// The horospherical line element ds² = du² + Q_{(u,v)}(dv) for the three
// families, its exact first derivatives (used by the energy gradient), the
// full metric tensor, and the disk-model metric (used as a pullback oracle).
//
// Q_{(u,v)}(ξ) = e^{4u} Σ_c A_c(v, ξ)²  +  e^{2u} Σ_{flat j} ξ_j²,
// A_c(v, ξ)   = ξ_c + Σ_{(i,j,s) ∈ table_c} s · v_i · ξ_j,
//
// where c runs over the dim_K − 1 cross coordinates and the tables couple
// the flat coordinates pairwise (complex) or in quaternionic 4-blocks.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "harmap/model.hpp"

namespace harmap {

struct CrossTerm {
    int vi;    // index into v (flat range)
    int xj;    // index into ξ (flat range)
    double s;  // ±1
};

class QForm {
  public:
    explicit QForm(const ModelParams& P) : P_(P), cd_(P.cross_dim()), vd_(P.v_dim()) {
        tables_.resize(cd_);
        if (P.fam == Family::Complex) {
            for (int kappa = 1; kappa < P.ell; ++kappa) {
                const int b = 2 * kappa - 1;  // flat pair (Re w_{κ+1}, Im w_{κ+1})
                tables_[0].push_back({b, b + 1, +1.0});
                tables_[0].push_back({b + 1, b, -1.0});
            }
        } else if (P.fam == Family::Quaternionic) {
            for (int kappa = 1; kappa < P.ell; ++kappa) {
                const int b = 4 * kappa - 1;  // flat 4-block of w_{κ+1}
                // i-component of Vec(w̄ dw)
                tables_[0].push_back({b, b + 1, +1.0});
                tables_[0].push_back({b + 1, b, -1.0});
                tables_[0].push_back({b + 2, b + 3, -1.0});
                tables_[0].push_back({b + 3, b + 2, +1.0});
                // j-component
                tables_[1].push_back({b, b + 2, +1.0});
                tables_[1].push_back({b + 2, b, -1.0});
                tables_[1].push_back({b + 3, b + 1, -1.0});
                tables_[1].push_back({b + 1, b + 3, +1.0});
                // k-component
                tables_[2].push_back({b, b + 3, +1.0});
                tables_[2].push_back({b + 3, b, -1.0});
                tables_[2].push_back({b + 1, b + 2, -1.0});
                tables_[2].push_back({b + 2, b + 1, +1.0});
            }
        }
    }

    const ModelParams& params() const { return P_; }

    double cross_coeff(int c, std::span<const double> v, std::span<const double> xi) const {
        double a = xi[c];
        for (const auto& t : tables_[c]) a += t.s * v[t.vi] * xi[t.xj];
        return a;
    }

    double value(double u, std::span<const double> v, std::span<const double> xi) const {
        const double e2 = std::exp(2.0 * u), e4 = e2 * e2;
        double q = 0.0;
        for (int c = 0; c < cd_; ++c) {
            const double a = cross_coeff(c, v, xi);
            q += e4 * a * a;
        }
        for (int j = cd_; j < vd_; ++j) q += e2 * xi[j] * xi[j];
        return q;
    }

    // Accumulates w · ∂Q/∂u into *gu, w · ∂Q/∂v into gv[], w · ∂Q/∂ξ into gxi[].
    // Any destination may be null.
    void add_grad(double u, std::span<const double> v, std::span<const double> xi, double w,
                  double* gu, double* gv, double* gxi) const {
        const double e2 = std::exp(2.0 * u), e4 = e2 * e2;
        double sum_a2 = 0.0, sum_f2 = 0.0;
        for (int c = 0; c < cd_; ++c) {
            const double a = cross_coeff(c, v, xi);
            sum_a2 += a * a;
            if (gxi) gxi[c] += w * 2.0 * e4 * a;
            for (const auto& t : tables_[c]) {
                if (gxi) gxi[t.xj] += w * 2.0 * e4 * a * t.s * v[t.vi];
                if (gv) gv[t.vi] += w * 2.0 * e4 * a * t.s * xi[t.xj];
            }
        }
        for (int j = cd_; j < vd_; ++j) {
            sum_f2 += xi[j] * xi[j];
            if (gxi) gxi[j] += w * 2.0 * e2 * xi[j];
        }
        if (gu) *gu += w * (4.0 * e4 * sum_a2 + 2.0 * e2 * sum_f2);
    }

    // Matrix of the quadratic form on dv: (m−1) × (m−1), row-major.
    std::vector<double> v_matrix(double u, std::span<const double> v) const {
        const double e2 = std::exp(2.0 * u), e4 = e2 * e2;
        std::vector<double> M(static_cast<size_t>(vd_) * vd_, 0.0);
        // rows a_c of the cross coefficients: A_c = a_c · ξ
        std::vector<double> a(vd_);
        for (int c = 0; c < cd_; ++c) {
            std::fill(a.begin(), a.end(), 0.0);
            a[c] = 1.0;
            for (const auto& t : tables_[c]) a[t.xj] += t.s * v[t.vi];
            for (int i = 0; i < vd_; ++i)
                for (int j = 0; j < vd_; ++j) M[i * vd_ + j] += e4 * a[i] * a[j];
        }
        for (int j = cd_; j < vd_; ++j) M[j * vd_ + j] += e2;
        return M;
    }

    int v_dim() const { return vd_; }
    int cross_dim() const { return cd_; }
    const std::vector<std::vector<CrossTerm>>& tables() const { return tables_; }

  private:
    ModelParams P_;
    int cd_, vd_;
    std::vector<std::vector<CrossTerm>> tables_;
};

inline double q_form(const ModelParams& P, const HoroPoint& p, std::span<const double> xi) {
    check_dims(P, p, "q_form");
    if (static_cast<int>(xi.size()) != P.v_dim())
        throw std::invalid_argument("q_form: xi has wrong dimension");
    return QForm(P).value(p.u, p.v, xi);
}

// Full metric tensor in the (u, v) chart: block diag(1, Q-matrix), m × m row-major.
inline std::vector<double> metric_tensor(const ModelParams& P, const HoroPoint& p) {
    check_dims(P, p, "metric_tensor");
    const int m = P.real_dim(), vd = P.v_dim();
    std::vector<double> g(static_cast<size_t>(m) * m, 0.0);
    g[0] = 1.0;
    const auto M = QForm(P).v_matrix(p.u, p.v);
    for (int i = 0; i < vd; ++i)
        for (int j = 0; j < vd; ++j) g[(i + 1) * m + (j + 1)] = M[i * vd + j];
    return g;
}

// Disk-model metric applied to a tangent vector dz at z:
// ds² = ‖dz‖²/(1−‖z‖²) + ‖⟨⟨dz, z⟩⟩‖²/(1−‖z‖²)²  with ⟨⟨x, y⟩⟩ = Σ x̄_k y_k.
inline double disk_metric(const ModelParams& P, const DiskPoint& z, const std::vector<Quat>& dz) {
    check_dims(P, z, "disk_metric");
    if (dz.size() != z.z.size()) throw std::invalid_argument("disk_metric: tangent length");
    const double om = 1.0 - z.norm2();
    double n2 = 0.0;
    Quat ip{};
    for (size_t k = 0; k < dz.size(); ++k) {
        n2 += dz[k].norm2();
        ip += dz[k].conj() * z.z[k];
    }
    return n2 / om + ip.norm2() / (om * om);
}

// Symmetric positive-definite solve via Cholesky (small m).  A is n×n row-major.
inline std::vector<double> spd_solve(std::vector<double> A, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = A[i * n + j];
            for (int k = 0; k < j; ++k) s -= A[i * n + k] * A[j * n + k];
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("spd_solve: matrix not positive definite");
                A[i * n + i] = std::sqrt(s);
            } else {
                A[i * n + j] = s / A[j * n + j];
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= A[i * n + k] * b[k];
        b[i] = s / A[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < n; ++k) s -= A[k * n + i] * b[k];
        b[i] = s / A[i * n + i];
    }
    return b;
}

}  // namespace harmap
