#pragma once

// Model parameters and the two coordinate representations of a point of
// H^ℓ_K: the unit-disk model z ∈ K^ℓ and the horospherical chart (u, v).

#include <stdexcept>
#include <string>
#include <vector>

#include "harmap/quaternion.hpp"

namespace harmap {

// Scaling fixes a = 1 throughout; b = 1 for K = R and b = 2 for K = C, H,
// so all sectional curvatures lie in [−b², −a²] ⊆ [−4, −1].
struct ModelParams {
    Family fam = Family::Real;
    int ell = 2;  // rank ℓ ≥ 2

    ModelParams() = default;
    ModelParams(Family f, int l) : fam(f), ell(l) {
        if (ell < 2) throw std::invalid_argument("ModelParams: rank ell must be >= 2");
    }

    int dim_k() const { return family_dim(fam); }
    int real_dim() const { return ell * dim_k(); }      // m
    int v_dim() const { return real_dim() - 1; }        // dim of v in (u, v)
    int cross_dim() const { return dim_k() - 1; }       // leading e^{4u} block
    int flat_dim() const { return v_dim() - cross_dim(); }
    double curv_a() const { return 1.0; }
    double curv_b() const { return fam == Family::Real ? 1.0 : 2.0; }

    std::string name() const { return std::string("H^") + std::to_string(ell) + "_" + family_name(fam); }
};

// Point of the unit disk model: z ∈ K^ℓ with ‖z‖ < 1.
struct DiskPoint {
    std::vector<Quat> z;  // length ℓ, components in K

    double norm2() const {
        double s = 0.0;
        for (const auto& c : z) s += c.norm2();
        return s;
    }
};

// Point in the horospherical chart adapted to the reference vertical
// geodesic: coordinates (u, v) with v ∈ R^{m−1}, v = (v_cross, v_flat).
struct HoroPoint {
    double u = 0.0;
    std::vector<double> v;  // length m−1
};

inline void check_dims(const ModelParams& P, const DiskPoint& z, const char* where) {
    if (static_cast<int>(z.z.size()) != P.ell)
        throw std::invalid_argument(std::string(where) + ": disk point has wrong length");
    for (const auto& c : z.z) KScalar(P.fam, c);  // membership in K
    if (z.norm2() >= 1.0)
        throw std::invalid_argument(std::string(where) + ": point not inside unit disk");
}

inline void check_dims(const ModelParams& P, const HoroPoint& p, const char* where) {
    if (static_cast<int>(p.v.size()) != P.v_dim())
        throw std::invalid_argument(std::string(where) + ": horospherical point has wrong v-dimension");
}

}  // namespace harmap
