#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qstab/curve.hpp"
#include "qstab/expr.hpp"
#include "qstab/ode.hpp"
#include "qstab/system.hpp"

namespace qstab {

/// y' + f(t) y^2 + g(t) y + h(t) = 0,  y(t1) = y1.
struct RiccatiProblem {
    RealFn f;
    RealFn g;
    RealFn h;
    double t1 = 0.0;
    double y1 = 0.0;
};

enum class Regularity {
    Regular,     ///< exists up to the horizon (finite-horizon surrogate of t1-regular)
    Normal,      ///< regular and every probe in the delta-neighbourhood is regular
    Extremal,    ///< regular but some probe escapes
    NotRegular,  ///< escapes before the horizon
    Unresolved,  ///< integration failed without a clear escape
};

std::string toString(Regularity r);

inline constexpr double kEscapeThreshold = 1e8;

struct RiccatiSolution {
    std::vector<double> grid;
    std::vector<double> values;
    bool escaped = false;
    std::optional<double> escapeTime;
    Regularity classification = Regularity::Unresolved;
    ode::Status status = ode::Status::Completed;

    [[nodiscard]] bool regular() const { return !escaped && status == ode::Status::Completed; }
    [[nodiscard]] double end() const { return grid.back(); }
};

/// Adaptive Dormand-Prince integration of the Riccati equation up to `horizon`.
/// Escape is declared once |y| exceeds kEscapeThreshold (the step size collapses there).
RiccatiSolution integrateRiccati(const RiccatiProblem& p, double horizon, double tol = 1e-10);

/// Finite-horizon normal/extremal test: `probes` initial values spread over the open
/// interval (y1 - delta, y1 + delta) must all stay regular for a normal verdict.
Regularity classifySolution(const RiccatiProblem& p, double horizon, double delta = 1e-3, int probes = 8,
                            double tol = 1e-9);

/// Sup-norm relative residual of
///   y(t) phi0(t) = y(t1) exp{-int g} - int_{t1}^t exp{-int_tau^t g} h(tau) phi0(tau) dtau,
/// phi0(t) = exp{int_{t1}^t f y}, over [t1, sol.end()]. Requires a regular solution.
double cauchyIdentityResidual(const RiccatiProblem& p, const RiccatiSolution& sol);

struct Lemma21Result {
    double lhs = 0.0;  ///< int f y
    double rhs = 0.0;  ///< y(t1) int f exp{-int g} - int f(tau) int exp{-int_xi^tau g} h(xi) dxi dtau
    bool holds = false;
};

/// Upper bound on int f y for a regular solution with f >= 0, at t = sol.end().
/// Throws std::invalid_argument if f is negative on the solution grid.
Lemma21Result lemma21Check(const RiccatiProblem& p, const RiccatiSolution& sol, double tol = 1e-8);

struct Lemma22Result {
    double value = 0.0;  ///< int_{t0}^T exp{-int_tau^T g} |h(tau)| phi(tau) dtau
    ConditionCurve curve;
    bool gIntegralDiverges = false;  ///< int g -> +inf
    bool kernelBounded = false;      ///< int exp{-int_tau^t g} |h| dtau bounded
    [[nodiscard]] bool hypothesisHolds() const { return gIntegralDiverges && kernelBounded; }
};

/// Weighted kernel integral whose limit vanishes for phi -> 0 under the stated hypotheses.
Lemma22Result lemma22Check(const RealFn& g, const RealFn& h, const RealFn& phi, double t0, double horizon);

struct Theorem21Result {
    bool preconditionsHold = true;
    bool hypothesisHolds = false;  ///< integral expression non-negative on the grid
    bool orderingHolds = false;    ///< y0(t) >= y1(t) - tol
    double minHypothesis = 0.0;
    double minGap = 0.0;
    std::vector<std::string> violations;
};

/// Comparison of eq1 (solution y0 from eq1.y1) with eq2 (solution y1 from eq2.y1)
/// through the inequality solutions eta0 (for eq1) and eta1 (for eq2). Both equations
/// start at eq1.t1.
Theorem21Result theorem21Check(const RiccatiProblem& eq1, const RiccatiProblem& eq2, const RealFn& eta0,
                               const RealFn& eta1, double lambda, double horizon, double tol = 1e-8);

/// Solution (phi, psi) of the scalar comparison system with phi(t0) = 1, psi(t0) = 0,
/// built from y0 of  y' + ||B|| y^2 + E y - ||C|| = 0,  y0(t0) = 0.
struct SolutionPair {
    std::vector<double> grid;
    std::vector<double> phi;
    std::vector<double> psi;
    RiccatiSolution y0;
    bool applicable = true;          ///< false if y0 escaped
    double minY0 = 0.0;
    double representationResidual = 0.0;  ///< psi = y0 phi  vs  int exp{int d*} ||C|| phi
    double boundExcess = 0.0;        ///< max of log phi - (bounding exponent), <= 0 when the bound holds
    bool boundHolds = false;
};

SolutionPair constructSolutionPair(const ScalarComparisonSystem& s, double horizon, double tol = 1e-10);

/// The main Riccati equation of a scalar comparison system with initial value y(t1) = y1.
RiccatiProblem mainRiccati(const ScalarComparisonSystem& s, double t1, double y1);

/// D(t) = int_{t1}^t f (yA - yB) for two solutions of the same equation.
ConditionCurve integratedGap(const RiccatiProblem& p, double yA, double yB, double horizon, std::size_t samples = 1000);

}  // namespace qstab
