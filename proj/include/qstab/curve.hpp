#pragma once

#include <string>
#include <vector>

namespace qstab {

enum class Trend { Bounded, DivergesUp, DivergesDown, Unresolved };

std::string toString(Trend t);
Trend trendFromString(const std::string& s);

/// Knobs of the finite-horizon boundedness heuristic.
struct TrendRule {
    double windowFraction = 0.2;  ///< trailing part of the horizon used for the slope fit
    double slopeTol = 1e-3;       ///< |slope| <= slopeTol * max|value| counts as flat
    double sustainRatio = 0.9;    ///< slope kept at least this fraction of the previous window's
};

/// A sampled scalar curve on [t0, T] plus its boundedness classification.
struct ConditionCurve {
    std::string name;
    std::vector<double> grid;
    std::vector<double> values;
    double supValue = 0.0;
    Trend trend = Trend::Unresolved;
    /// Set when the underlying integration stopped before the requested horizon.
    bool truncated = false;

    [[nodiscard]] double finalValue() const { return values.empty() ? 0.0 : values.back(); }
    [[nodiscard]] bool boundedAbove() const { return trend == Trend::Bounded || trend == Trend::DivergesDown; }
};

/// Classifies the tail behaviour of a sampled curve.
///
/// A least-squares slope b is fitted over the trailing window and compared with the
/// slope of the window before it. The curve is bounded when |b| <= slopeTol * max|v|
/// and the drift is not sustained (same sign, not decelerating). Otherwise it diverges
/// in the direction of b provided the drift across the window exceeds the largest fit
/// residual there; anything else is unresolved.
Trend classifyTrend(const std::vector<double>& grid, const std::vector<double>& values, const TrendRule& rule = {});

/// Builds a curve, filling supValue and trend.
ConditionCurve makeCurve(std::string name, std::vector<double> grid, std::vector<double> values,
                         const TrendRule& rule = {});

}  // namespace qstab
