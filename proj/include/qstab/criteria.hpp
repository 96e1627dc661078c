#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qstab/curve.hpp"
#include "qstab/expr.hpp"
#include "qstab/system.hpp"

namespace qstab {

enum class Verdict { LyapunovStable, AsymptoticallyStable, Inconclusive };

std::string toString(Verdict v);

inline constexpr std::size_t kConditionSamples = 2000;
inline constexpr std::size_t kStructuralSamples = 20;

/// I1(t) = int_{t0}^t exp{int_tau^t d*} ||C(tau)|| dtau, computed from I1' = d* I1 + ||C||.
ConditionCurve evalCondition1(const ScalarComparisonSystem& s, double horizon, const TrendRule& rule = {},
                              std::size_t samples = kConditionSamples);

/// The inner kernel K(tau) = int_{t0}^tau exp{-int_xi^tau E} ||C(xi)|| dxi, K' = -E K + ||C||.
ConditionCurve evalKernel(const ScalarComparisonSystem& s, double horizon, const TrendRule& rule = {},
                          std::size_t samples = kConditionSamples);

/// J(t) = int_{t0}^t (a* + ||B|| K).
ConditionCurve evalCondition2(const ScalarComparisonSystem& s, double horizon, const TrendRule& rule = {},
                              std::size_t samples = kConditionSamples);

struct Condition2Prime {
    ConditionCurve eIntegral;  ///< int E
    ConditionCurve j;
    bool satisfied = false;    ///< int E -> +inf and J -> -inf
};

Condition2Prime evalCondition2Prime(const ScalarComparisonSystem& s, double horizon, const TrendRule& rule = {},
                                    std::size_t samples = kConditionSamples);

struct CriterionReport {
    ConditionResult condA;
    ConditionResult condB;
    std::optional<EnvelopeCheck> envelopeCheck;
    ConditionCurve cond1;
    ConditionCurve kernel;
    ConditionCurve cond2;
    Condition2Prime cond2prime;
    Verdict verdict = Verdict::Inconclusive;
    bool structuralOk = false;
    std::vector<std::string> notes;
};

/// Verdict from the curves alone (the structural conditions are assumed).
Verdict verdictFromCurves(const ConditionCurve& cond1, const ConditionCurve& cond2, const Condition2Prime& c2p);

/// Full pipeline: structural conditions, envelopes (derived when `env` is empty), scalar
/// comparison system, conditions 1, 2 and 2' and the verdict.
CriterionReport theorem31Verdict(const BlockSystem& sys, const std::optional<Envelopes>& env, double horizon,
                                 const TrendRule& rule = {});

/// Second-order equation (p phi')' + q phi' + r phi = 0 rewritten with psi = p phi':
///   phi' = psi / p,  psi' = -r phi - (q / p) psi.
BlockSystem secondOrderSystem(const TimeFunction& p, const TimeFunction& q, const TimeFunction& r);

struct SecondOrderReport {
    CriterionReport criterion;  ///< cond1 holds I1, cond2 holds the I2 integral
    /// true: asymptotic stability excluded; nullopt: preconditions (p > 0, r <= 0, q real) not met.
    std::optional<bool> asymptoticExcluded;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::string> notes;
};

/// Lyapunov-stable when both I1 and I2 are bounded; otherwise inconclusive.
/// Throws std::invalid_argument if p vanishes on the probe grid.
CriterionReport corollary31(const TimeFunction& p, const TimeFunction& q, const TimeFunction& r, double horizon,
                            const TrendRule& rule = {});

/// Returns true when p > 0, r <= 0 and q real on the probe grid (a positive non-decreasing
/// solution then exists); nullopt when these preconditions do not hold.
std::optional<bool> remark33Check(const TimeFunction& p, const TimeFunction& q, const TimeFunction& r,
                                  double horizon);

SecondOrderReport analyzeSecondOrder(const TimeFunction& p, const TimeFunction& q, const TimeFunction& r,
                                     double horizon, const TrendRule& rule = {});

}  // namespace qstab
