#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qstab/expr.hpp"
#include "qstab/qmatrix.hpp"

namespace qstab {

/// Matrix whose entries are time functions.
class FunctionMatrix {
public:
    FunctionMatrix() = default;
    FunctionMatrix(std::size_t rows, std::size_t cols, std::vector<TimeFunction> entries);

    /// Entries in row-major order, one expression string each.
    static FunctionMatrix parse(std::size_t rows, std::size_t cols, const std::vector<std::string>& sources,
                                double domainStart);
    static FunctionMatrix zero(std::size_t rows, std::size_t cols, double domainStart);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] const TimeFunction& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    [[nodiscard]] const std::vector<TimeFunction>& entries() const { return entries_; }

    [[nodiscard]] QMatrix at(double t) const;
    [[nodiscard]] bool isConstant() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<TimeFunction> entries_;
};

/// Two-block linear system  Phi' = A Phi + B Psi,  Psi' = C Phi + D Psi,  t >= t0,
/// with A: m x m, B: m x n, C: n x m, D: n x n quaternionic matrix functions.
struct BlockSystem {
    std::size_t m = 0;
    std::size_t n = 0;
    double t0 = 0.0;
    FunctionMatrix A, B, C, D;

    /// Throws std::invalid_argument on inconsistent dimensions.
    void validate() const;
    /// Full (m + n) x (m + n) coefficient matrix [[A, B], [C, D]].
    [[nodiscard]] QMatrix full(double t) const;
};

enum class CommutationMode {
    Pairwise,  ///< X(t) commutes with the integral of X over [t0, tau] for all sampled tau, t
    SameTime,  ///< only tau = t (the weaker pair of restrictions)
};

struct ConditionResult {
    bool passed = false;
    std::string condition;  ///< "a", "a'", "b"
    double maxViolation = 0.0;
    std::optional<std::string> witness;
    std::vector<std::string> notes;
    std::vector<std::pair<double, double>> failingPairs;  ///< (tau, t), first few only
};

/// Commutation restriction on the diagonal blocks, sampled on `grid`.
ConditionResult checkConditionA(const BlockSystem& sys, const std::vector<double>& grid, double tol = 1e-8,
                                CommutationMode mode = CommutationMode::Pairwise);

/// Unitary diagonalizability of the integrated diagonal blocks, verified through the
/// sufficient route: pointwise normality plus pairwise commutation of the family.
ConditionResult checkConditionB(const BlockSystem& sys, const std::vector<double>& grid, double tol = 1e-8);

enum class EnvelopeSource { UserSupplied, Derived };

/// Real functions a*(t), d*(t) whose integrals dominate the real parts of the
/// eigenvalues of the integrated A and D blocks.
struct Envelopes {
    RealFn aStar;
    RealFn dStar;
    EnvelopeSource source = EnvelopeSource::Derived;
    std::string aStarDescription;
    std::string dStarDescription;
};

/// a*(t) = max Re spec A(t), d*(t) = max Re spec D(t). Sharp for commuting normal families.
Envelopes deriveEnvelopes(const BlockSystem& sys);
Envelopes userEnvelopes(const TimeFunction& aStar, const TimeFunction& dStar);

struct EnvelopeCheck {
    double maxExcess = 0.0;  ///< max over sampled pairs of (max Re spec of the integral) - (integral of envelope)
    bool holds = false;
};

/// For all grid pairs tau <= t: max Re spec(int_tau^t A) <= int_tau^t a* + tol (and likewise for D).
EnvelopeCheck verifyEnvelopes(const BlockSystem& sys, const Envelopes& env, const std::vector<double>& grid,
                              double tol = 1e-7);

/// The 2-dimensional real majorant system
///   phi' = a*(t) phi + ||B(t)|| psi,  psi' = ||C(t)|| phi + d*(t) psi.
struct ScalarComparisonSystem {
    RealFn aStar;
    RealFn dStar;
    RealFn normB;
    RealFn normC;
    double t0 = 0.0;

    /// E(t) = a*(t) - d*(t)
    [[nodiscard]] double E(double t) const { return aStar(t) - dStar(t); }
};

ScalarComparisonSystem buildScalarSystem(const BlockSystem& sys, const Envelopes& env);

/// Cumulative integrals int_{t0}^{tau} X(s) ds at each grid point tau.
std::vector<QMatrix> cumulativeIntegrals(const FunctionMatrix& x, double t0, const std::vector<double>& grid,
                                         double rtol = 1e-12);

}  // namespace qstab
