#pragma once

#include <cmath>
#include <iosfwd>
#include <string>

namespace qstab {

/// Quaternion w + x i + y j + z k with Hamilton multiplication.
struct Quaternion {
    double w = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_) : w(w_) {}  // NOLINT(google-explicit-constructor)
    constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quaternion i() { return {0.0, 1.0, 0.0, 0.0}; }
    static constexpr Quaternion j() { return {0.0, 0.0, 1.0, 0.0}; }
    static constexpr Quaternion k() { return {0.0, 0.0, 0.0, 1.0}; }

    [[nodiscard]] constexpr double real() const { return w; }
    [[nodiscard]] constexpr Quaternion imag() const { return {0.0, x, y, z}; }
    [[nodiscard]] constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
    [[nodiscard]] constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
    [[nodiscard]] double norm() const { return std::sqrt(norm2()); }
    [[nodiscard]] double imagNorm() const { return std::sqrt(x * x + y * y + z * z); }
    [[nodiscard]] bool isReal(double tol = 0.0) const { return imagNorm() <= tol; }
    [[nodiscard]] bool isFinite() const {
        return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
    /// Multiplicative inverse; the caller guarantees a nonzero value.
    [[nodiscard]] Quaternion inverse() const;

    constexpr Quaternion& operator+=(const Quaternion& o) {
        w += o.w; x += o.x; y += o.y; z += o.z;
        return *this;
    }
    constexpr Quaternion& operator-=(const Quaternion& o) {
        w -= o.w; x -= o.x; y -= o.y; z -= o.z;
        return *this;
    }
    constexpr Quaternion& operator*=(double s) {
        w *= s; x *= s; y *= s; z *= s;
        return *this;
    }
};

constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
constexpr Quaternion operator*(Quaternion a, double s) { return a *= s; }
constexpr Quaternion operator*(double s, Quaternion a) { return a *= s; }

// Hamilton product: i^2 = j^2 = k^2 = ijk = -1.
constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

/// Right division a * b^{-1}.
Quaternion operator/(const Quaternion& a, const Quaternion& b);

constexpr bool operator==(const Quaternion& a, const Quaternion& b) {
    return a.w == b.w && a.x == b.x && a.y == b.y && a.z == b.z;
}

inline Quaternion qmul(const Quaternion& a, const Quaternion& b) { return a * b; }

/// e^q = e^w (cos|v| + v/|v| sin|v|); |e^q| = e^{Re q}.
Quaternion exp(const Quaternion& q);

/// Distance |a - b|.
inline double distance(const Quaternion& a, const Quaternion& b) { return (a - b).norm(); }

/// True iff J is a unit with J^2 = -1, i.e. Re J = 0 and |J| = 1.
bool isImaginaryUnit(const Quaternion& J, double tol = 1e-9);

std::string toString(const Quaternion& q);
std::ostream& operator<<(std::ostream& os, const Quaternion& q);

}  // namespace qstab
