#include "qstab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qstab {

std::string toString(Trend t) {
    switch (t) {
        case Trend::Bounded: return "bounded";
        case Trend::DivergesUp: return "divergesUp";
        case Trend::DivergesDown: return "divergesDown";
        case Trend::Unresolved: return "unresolved";
    }
    return "unresolved";
}

Trend trendFromString(const std::string& s) {
    if (s == "bounded") return Trend::Bounded;
    if (s == "divergesUp") return Trend::DivergesUp;
    if (s == "divergesDown") return Trend::DivergesDown;
    if (s == "unresolved") return Trend::Unresolved;
    throw std::invalid_argument("unknown trend '" + s + "'");
}

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double maxResidual = 0.0;
    std::size_t count = 0;
};

LineFit fitLine(const std::vector<double>& t, const std::vector<double>& v, double lo, double hi) {
    LineFit fit;
    double st = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < lo || t[i] > hi) continue;
        st += t[i];
        sv += v[i];
        ++fit.count;
    }
    if (fit.count < 3) return fit;
    const double mt = st / static_cast<double>(fit.count);
    const double mv = sv / static_cast<double>(fit.count);
    double stt = 0.0, stv = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < lo || t[i] > hi) continue;
        stt += (t[i] - mt) * (t[i] - mt);
        stv += (t[i] - mt) * (v[i] - mv);
    }
    fit.slope = stt > 0.0 ? stv / stt : 0.0;
    fit.intercept = mv - fit.slope * mt;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < lo || t[i] > hi) continue;
        fit.maxResidual = std::max(fit.maxResidual, std::abs(v[i] - (fit.intercept + fit.slope * t[i])));
    }
    return fit;
}

}  // namespace

Trend classifyTrend(const std::vector<double>& grid, const std::vector<double>& values, const TrendRule& rule) {
    if (grid.size() != values.size()) throw std::invalid_argument("classifyTrend: size mismatch");
    if (grid.size() < 2) return Trend::Unresolved;
    for (double v : values)
        if (!std::isfinite(v)) return Trend::Unresolved;

    const double t0 = grid.front();
    const double T = grid.back();
    const double width = rule.windowFraction * (T - t0);
    const LineFit tail = fitLine(grid, values, T - width, T);
    if (tail.count < 3) return Trend::Unresolved;
    const LineFit prev = fitLine(grid, values, T - 2.0 * width, T - width);

    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    const double flatTol = rule.slopeTol * std::max(scale, 1e-12);
    const double noise = 1e-9 * std::max(scale, 1.0) / std::max(width, 1.0);

    const double b = tail.slope;
    const bool sustained = prev.count >= 3 && std::abs(b) > noise && b * prev.slope > 0.0 &&
                           std::abs(b) >= rule.sustainRatio * std::abs(prev.slope);

    if (!sustained && std::abs(b) <= flatTol) return Trend::Bounded;
    if (std::abs(b) * width >= tail.maxResidual && std::abs(b) > noise) {
        return b > 0.0 ? Trend::DivergesUp : Trend::DivergesDown;
    }
    return Trend::Unresolved;
}

ConditionCurve makeCurve(std::string name, std::vector<double> grid, std::vector<double> values,
                         const TrendRule& rule) {
    ConditionCurve c;
    c.name = std::move(name);
    c.trend = classifyTrend(grid, values, rule);
    c.supValue = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    c.grid = std::move(grid);
    c.values = std::move(values);
    return c;
}

}  // namespace qstab
