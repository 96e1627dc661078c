#include "qstab/qmatrix.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace qstab {

QMatrix::QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

QMatrix::QMatrix(std::size_t rows, std::size_t cols, std::vector<Quaternion> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw std::invalid_argument("QMatrix: entry count does not match shape");
    }
}

QMatrix::QMatrix(std::initializer_list<std::initializer_list<Quaternion>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw std::invalid_argument("QMatrix: ragged initializer");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

QMatrix QMatrix::identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

QMatrix QMatrix::diagonal(std::span<const Quaternion> d) {
    QMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

QMatrix QMatrix::adjoint() const {
    QMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c).conj();
    return out;
}

QMatrix& QMatrix::operator+=(const QMatrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("QMatrix: shape mismatch in +");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

QMatrix& QMatrix::operator-=(const QMatrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("QMatrix: shape mismatch in -");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

QMatrix& QMatrix::operator*=(double s) {
    for (auto& q : data_) q *= s;
    return *this;
}

QMatrix operator+(QMatrix a, const QMatrix& b) { return a += b; }
QMatrix operator-(QMatrix a, const QMatrix& b) { return a -= b; }
QMatrix operator*(QMatrix a, double s) { return a *= s; }

QMatrix operator*(const QMatrix& a, const QMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("QMatrix: shape mismatch in *");
    QMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Quaternion& ark = a(r, k);
            for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += ark * b(k, c);
        }
    return out;
}

std::vector<Quaternion> operator*(const QMatrix& a, std::span<const Quaternion> v) {
    if (a.cols() != v.size()) throw std::invalid_argument("QMatrix: shape mismatch in matrix-vector product");
    std::vector<Quaternion> out(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out[r] += a(r, c) * v[c];
    return out;
}

Eigen::Matrix4d leftMultiplication(const Quaternion& q) {
    Eigen::Matrix4d m;
    // clang-format off
    m << q.w, -q.x, -q.y, -q.z,
         q.x,  q.w, -q.z,  q.y,
         q.y,  q.z,  q.w, -q.x,
         q.z, -q.y,  q.x,  q.w;
    // clang-format on
    return m;
}

Eigen::MatrixXd realEmbedding(const QMatrix& m) {
    Eigen::MatrixXd out(4 * m.rows(), 4 * m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            out.block<4, 4>(4 * static_cast<Eigen::Index>(r), 4 * static_cast<Eigen::Index>(c)) =
                leftMultiplication(m(r, c));
    return out;
}

Eigen::VectorXd embedVector(std::span<const Quaternion> v) {
    Eigen::VectorXd out(4 * v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[4 * i] = v[i].w;
        out[4 * i + 1] = v[i].x;
        out[4 * i + 2] = v[i].y;
        out[4 * i + 3] = v[i].z;
    }
    return out;
}

std::vector<Quaternion> unembedVector(const Eigen::Ref<const Eigen::VectorXd>& v) {
    if (v.size() % 4 != 0) throw std::invalid_argument("unembedVector: length not a multiple of 4");
    std::vector<Quaternion> out(static_cast<std::size_t>(v.size() / 4));
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto b = static_cast<Eigen::Index>(4 * i);
        out[i] = {v[b], v[b + 1], v[b + 2], v[b + 3]};
    }
    return out;
}

double vectorNorm(std::span<const Quaternion> v) {
    double s = 0.0;
    for (const auto& q : v) s += q.norm2();
    return std::sqrt(s);
}

double opNorm(const QMatrix& m) {
    if (m.empty()) throw std::invalid_argument("opNorm: empty matrix");
    if (m.rows() == 1 && m.cols() == 1) return m(0, 0).norm();
    const Eigen::MatrixXd e = realEmbedding(m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
    return svd.singularValues()(0);
}

bool isNormal(const QMatrix& m, double tol) {
    if (!m.square()) throw std::invalid_argument("isNormal: matrix is not square");
    const QMatrix adj = m.adjoint();
    const double scale = opNorm(m);
    return opNorm(m * adj - adj * m) <= tol * scale * scale;
}

bool commutes(const QMatrix& a, const QMatrix& b, double tol) {
    return opNorm(a * b - b * a) <= tol * opNorm(a) * opNorm(b);
}

bool isUnitary(const QMatrix& u, double tol) {
    if (!u.square()) return false;
    const QMatrix id = QMatrix::identity(u.rows());
    const QMatrix adj = u.adjoint();
    return opNorm(u * adj - id) <= tol && opNorm(adj * u - id) <= tol;
}

namespace {

Eigen::Vector3d imagVector(const Quaternion& q) { return {q.x, q.y, q.z}; }

std::optional<Quaternion> commonUnitOf(std::span<const Quaternion> entries, double tol) {
    Eigen::Vector3d best = Eigen::Vector3d::Zero();
    for (const auto& q : entries) {
        const Eigen::Vector3d v = imagVector(q);
        if (v.norm() > best.norm()) best = v;
    }
    if (best.norm() == 0.0) return Quaternion::i();
    const Eigen::Vector3d u = best.normalized();
    for (const auto& q : entries) {
        const Eigen::Vector3d v = imagVector(q);
        if (v.cross(u).norm() > tol * std::max(q.norm(), std::numeric_limits<double>::min())) {
            return std::nullopt;
        }
    }
    return Quaternion{0.0, u[0], u[1], u[2]};
}

}  // namespace

std::optional<Quaternion> commonImaginaryUnit(const QMatrix& m, double tol) {
    return commonUnitOf(m.entries(), tol);
}

std::optional<Quaternion> commonImaginaryUnit(std::span<const QMatrix> family, double tol) {
    std::vector<Quaternion> all;
    for (const auto& m : family) all.insert(all.end(), m.entries().begin(), m.entries().end());
    return commonUnitOf(all, tol);
}

Eigen::MatrixXcd complexImage(const QMatrix& m, const Quaternion& J) {
    if (!isImaginaryUnit(J)) throw std::invalid_argument("complexImage: J is not an imaginary unit");
    const Eigen::Vector3d u = imagVector(J);
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const Quaternion& q = m(r, c);
            const Eigen::Vector3d v = imagVector(q);
            if (v.cross(u).norm() > kStructureTol * std::max(q.norm(), 1.0)) {
                throw std::invalid_argument("complexImage: entry is not in C_J");
            }
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {q.w, v.dot(u)};
        }
    return out;
}

QMatrix fromComplex(const Eigen::Ref<const Eigen::MatrixXcd>& m, const Quaternion& J) {
    QMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const std::complex<double> z = m(r, c);
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = Quaternion(z.real()) + J * z.imag();
        }
    return out;
}

std::vector<std::complex<double>> embeddedEigenvalues(const QMatrix& m) {
    if (!m.square()) throw std::invalid_argument("embeddedEigenvalues: matrix is not square");
    if (m.rows() == 1) {
        const Quaternion& q = m(0, 0);
        return {{q.w, q.imagNorm()}, {q.w, -q.imagNorm()}};
    }
    // q = (w + x i) + (y + z i) j gives the complex adjoint [[M1, M2], [-conj M2, conj M1]],
    // whose spectrum is that of the real image at half multiplicity.
    const auto n = static_cast<Eigen::Index>(m.rows());
    Eigen::MatrixXcd chi(2 * n, 2 * n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            const Quaternion& q = m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            const std::complex<double> m1{q.w, q.x}, m2{q.y, q.z};
            chi(r, c) = m1;
            chi(r, c + n) = m2;
            chi(r + n, c) = -std::conj(m2);
            chi(r + n, c + n) = std::conj(m1);
        }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(chi, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("embeddedEigenvalues: eigen-decomposition failed");
    std::vector<std::complex<double>> out;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        out.push_back(es.eigenvalues()(k));
        out.push_back(es.eigenvalues()(k));
    }
    return out;
}

double maxRealEigenvalue(const QMatrix& m) {
    if (m.rows() == 1 && m.cols() == 1) return m(0, 0).w;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : embeddedEigenvalues(m)) best = std::max(best, z.real());
    return best;
}

QMatrix expDiagonalized(const QMatrix& u, std::span<const Quaternion> m) {
    std::vector<Quaternion> e(m.size());
    std::transform(m.begin(), m.end(), e.begin(), [](const Quaternion& q) { return exp(q); });
    return u * QMatrix::diagonal(e) * u.adjoint();
}

ExpNormBound expNormBound(const QMatrix& u, std::span<const Quaternion> m, double tol) {
    if (u.rows() != m.size()) throw std::invalid_argument("expNormBound: dimension mismatch");
    if (!isUnitary(u, tol) || !commonImaginaryUnit(u, tol)) {
        throw std::invalid_argument("expNormBound: U is not J-unitary");
    }
    double maxRe = -std::numeric_limits<double>::infinity();
    for (const auto& q : m) maxRe = std::max(maxRe, q.w);
    return {opNorm(expDiagonalized(u, m)), std::exp(maxRe)};
}

}  // namespace qstab
