#pragma once

// Quaternion arithmetic and the scalar tower R ⊂ C ⊂ H used for all three
// target families.  Everything is exact floating-point algebra: the complex
// and real cases are the subalgebras with vanishing (j,k) resp. (i,j,k)
// parts, so a single code path serves K = R, C, H.

#include <cmath>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

namespace harmap {

struct Quat {
    double w = 0.0;  // real part
    double x = 0.0;  // i
    double y = 0.0;  // j
    double z = 0.0;  // k

    constexpr Quat() = default;
    constexpr Quat(double w_, double x_ = 0.0, double y_ = 0.0, double z_ = 0.0)
        : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quat one() { return Quat(1.0); }

    constexpr Quat operator+(const Quat& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
    constexpr Quat operator-(const Quat& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
    constexpr Quat operator-() const { return {-w, -x, -y, -z}; }

    // Hamilton product: i² = j² = k² = ijk = −1, ij = k, jk = i, ki = j.
    constexpr Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }
    constexpr Quat operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
    friend constexpr Quat operator*(double s, const Quat& q) { return q * s; }

    Quat& operator+=(const Quat& o) { return *this = *this + o; }
    Quat& operator-=(const Quat& o) { return *this = *this - o; }
    Quat& operator*=(const Quat& o) { return *this = *this * o; }

    constexpr Quat conj() const { return {w, -x, -y, -z}; }
    constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }

    Quat inv() const {
        const double n2 = norm2();
        return conj() * (1.0 / n2);
    }
    // q / r  =  q · r⁻¹  (right division; order matters over H).
    Quat rdiv(const Quat& r) const { return *this * r.inv(); }

    constexpr bool operator==(const Quat& o) const {
        return w == o.w && x == o.x && y == o.y && z == o.z;
    }
};

inline std::ostream& operator<<(std::ostream& os, const Quat& q) {
    return os << "(" << q.w << "," << q.x << "," << q.y << "," << q.z << ")";
}

enum class Family { Real, Complex, Quaternionic };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Real: return "R";
        case Family::Complex: return "C";
        case Family::Quaternionic: return "H";
    }
    return "?";
}

// Real dimension of K over R.
inline int family_dim(Family f) {
    switch (f) {
        case Family::Real: return 1;
        case Family::Complex: return 2;
        case Family::Quaternionic: return 4;
    }
    std::abort();
}

// A scalar of K, tagged with its family.  Arithmetic never leaves the
// subalgebra because R and C are closed under the Hamilton product.
struct KScalar {
    Family fam = Family::Real;
    Quat q;

    KScalar() = default;
    KScalar(Family f, Quat v) : fam(f), q(v) { check_membership(); }

    void check_membership() const {
        const bool ok = (fam == Family::Quaternionic) ||
                        (fam == Family::Complex && q.y == 0.0 && q.z == 0.0) ||
                        (fam == Family::Real && q.x == 0.0 && q.y == 0.0 && q.z == 0.0);
        if (!ok) throw std::invalid_argument("KScalar component outside of K");
    }

    KScalar operator+(const KScalar& o) const { return {fam, q + o.q}; }
    KScalar operator-(const KScalar& o) const { return {fam, q - o.q}; }
    KScalar operator*(const KScalar& o) const { return {fam, q * o.q}; }
    KScalar conj() const { return {fam, q.conj()}; }
    KScalar inv() const { return {fam, q.inv()}; }
    double norm() const { return q.norm(); }
    double norm2() const { return q.norm2(); }
};

}  // namespace harmap
