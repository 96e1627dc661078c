#include "qstab/quaternion.hpp"

#include <cstdio>
#include <ostream>

namespace qstab {

Quaternion Quaternion::inverse() const {
    const double n2 = norm2();
    return conj() * (1.0 / n2);
}

Quaternion operator/(const Quaternion& a, const Quaternion& b) {
    return a * b.inverse();
}

Quaternion exp(const Quaternion& q) {
    const double r = std::exp(q.w);
    const double v = q.imagNorm();
    if (v == 0.0) {
        return {r, 0.0, 0.0, 0.0};
    }
    const double s = r * std::sin(v) / v;
    return {r * std::cos(v), s * q.x, s * q.y, s * q.z};
}

bool isImaginaryUnit(const Quaternion& J, double tol) {
    return std::abs(J.w) <= tol && std::abs(J.norm() - 1.0) <= tol;
}

std::string toString(const Quaternion& q) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi%+.12gj%+.12gk", q.w, q.x, q.y, q.z);
    return buf;
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
    return os << toString(q);
}

}  // namespace qstab
