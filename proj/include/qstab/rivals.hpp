#pragma once

#include <string>
#include <vector>

#include "qstab/curve.hpp"
#include "qstab/qmatrix.hpp"
#include "qstab/system.hpp"

namespace qstab {

enum class LozinskiiKind { I, II, III };

/// Logarithmic norm of a square matrix.
///   I:   max_i  Re m_ii + sum_{j != i} |m_ij|   (row sums)
///   II:  max_j  Re m_jj + sum_{i != j} |m_ij|   (column sums)
///   III: largest eigenvalue of (M + M*) / 2
double lozinskiiNorm(const QMatrix& m, LozinskiiKind kind);

enum class RivalMethod { LozinskiiI, LozinskiiII, LozinskiiIII, Freezing, LyapunovBogdanov };

std::string toString(RivalMethod m);
RivalMethod rivalMethodFromString(const std::string& s);

enum class RivalVerdict { Stable, Inconclusive };

std::string toString(RivalVerdict v);

struct RivalReport {
    RivalMethod method = RivalMethod::LozinskiiI;
    bool applicable = false;
    RivalVerdict verdict = RivalVerdict::Inconclusive;
    ConditionCurve curve;      ///< the integral the method tests for boundedness (freezing: pointwise spectral abscissa)
    ConditionCurve pointwise;  ///< the integrand sampled on the same grid
    std::string summary;       ///< one-line outcome used by the table output
    std::vector<std::string> notes;
};

inline constexpr std::size_t kRivalSamples = 2000;

/// Integrates the chosen logarithmic norm of the full coefficient matrix; stable when
/// the integral is bounded above.
RivalReport lozinskiiVerdict(const BlockSystem& sys, LozinskiiKind kind, double horizon, const TrendRule& rule = {});

/// Spectral precondition of the freezing method: frozen spectra strictly in the left half-plane.
RivalReport freezingCheck(const BlockSystem& sys, double horizon);

/// Integral of the operator norm of the full matrix plus the per-entry absolute integrals.
RivalReport lyapunovBogdanovCheck(const BlockSystem& sys, double horizon, const TrendRule& rule = {});

RivalReport runRival(const BlockSystem& sys, RivalMethod method, double horizon, const TrendRule& rule = {});

}  // namespace qstab
