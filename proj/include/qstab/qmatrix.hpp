#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qstab/quaternion.hpp"

namespace qstab {

/// Default relative tolerance for normality / unitarity tests.
inline constexpr double kStructureTol = 1e-9;

/// Dense quaternionic matrix, row-major. Acts on H^n by left multiplication.
class QMatrix {
public:
    QMatrix() = default;
    QMatrix(std::size_t rows, std::size_t cols);
    QMatrix(std::size_t rows, std::size_t cols, std::vector<Quaternion> entries);
    QMatrix(std::initializer_list<std::initializer_list<Quaternion>> rows);

    static QMatrix identity(std::size_t n);
    static QMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }
    static QMatrix diagonal(std::span<const Quaternion> d);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] bool empty() const { return rows_ == 0 || cols_ == 0; }
    [[nodiscard]] bool square() const { return rows_ == cols_; }

    Quaternion& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Quaternion& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    [[nodiscard]] std::span<const Quaternion> entries() const { return data_; }

    /// Conjugate transpose M*.
    [[nodiscard]] QMatrix adjoint() const;

    QMatrix& operator+=(const QMatrix& o);
    QMatrix& operator-=(const QMatrix& o);
    QMatrix& operator*=(double s);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Quaternion> data_;
};

QMatrix operator+(QMatrix a, const QMatrix& b);
QMatrix operator-(QMatrix a, const QMatrix& b);
QMatrix operator*(const QMatrix& a, const QMatrix& b);
QMatrix operator*(QMatrix a, double s);
std::vector<Quaternion> operator*(const QMatrix& a, std::span<const Quaternion> v);

/// 4x4 real matrix of left multiplication by q on R^4 = (w, x, y, z).
Eigen::Matrix4d leftMultiplication(const Quaternion& q);

/// Real (4 rows) x (4 cols) image of M; an algebra homomorphism with embed(M*) = embed(M)^T.
Eigen::MatrixXd realEmbedding(const QMatrix& m);
Eigen::VectorXd embedVector(std::span<const Quaternion> v);
std::vector<Quaternion> unembedVector(const Eigen::Ref<const Eigen::VectorXd>& v);

/// Euclidean norm on H^n.
double vectorNorm(std::span<const Quaternion> v);

/// Induced operator norm sup ||M q|| / ||q|| (largest singular value of the real image).
double opNorm(const QMatrix& m);

/// ||M M* - M* M|| <= tol * ||M||^2.
bool isNormal(const QMatrix& m, double tol = kStructureTol);

/// ||A B - B A|| <= tol * ||A|| ||B||.
bool commutes(const QMatrix& a, const QMatrix& b, double tol = kStructureTol);

/// ||U U* - I|| and ||U* U - I|| both within tol.
bool isUnitary(const QMatrix& u, double tol = kStructureTol);

/// A unit J (J^2 = -1) with every entry of m in C_J = {a + J b}, if one exists.
/// Real matrices report i.
std::optional<Quaternion> commonImaginaryUnit(const QMatrix& m, double tol = kStructureTol);
std::optional<Quaternion> commonImaginaryUnit(std::span<const QMatrix> family, double tol = kStructureTol);

/// Isometry C_J^{r x c} -> C^{r x c}: a + J b -> a + i b. Entries must lie in C_J.
Eigen::MatrixXcd complexImage(const QMatrix& m, const Quaternion& J);
QMatrix fromComplex(const Eigen::Ref<const Eigen::MatrixXcd>& m, const Quaternion& J);

/// Eigenvalues of the real image. For M = U diag(m_l) U* these are Re m_l +- i |Im m_l|.
std::vector<std::complex<double>> embeddedEigenvalues(const QMatrix& m);
double maxRealEigenvalue(const QMatrix& m);

/// U diag(e^{m_l}) U*.
QMatrix expDiagonalized(const QMatrix& u, std::span<const Quaternion> m);

struct ExpNormBound {
    double norm = 0.0;   ///< ||exp(M)||
    double bound = 0.0;  ///< exp(max Re m_l)
    [[nodiscard]] bool holds(double tol = 1e-9) const { return norm <= bound + tol; }
};

/// Exponential bound for M = U diag(m) U* with U J-unitary.
/// Throws std::invalid_argument if U is not J-unitary for any J.
ExpNormBound expNormBound(const QMatrix& u, std::span<const Quaternion> m, double tol = kStructureTol);

}  // namespace qstab
