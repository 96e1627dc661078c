#include "qstab/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qstab {

namespace {

constexpr std::size_t kSamples = 2000;

ode::EscapePredicate escapeOn(std::vector<std::size_t> indices, double threshold = kEscapeThreshold) {
    return [indices = std::move(indices), threshold](double, std::span<const double> y) {
        return std::any_of(indices.begin(), indices.end(),
                           [&](std::size_t i) { return !(std::abs(y[i]) <= threshold); });
    };
}

double riccatiRhs(const RiccatiProblem& p, double t, double y) { return -(p.f(t) * y * y + p.g(t) * y + p.h(t)); }

double supRelative(const std::vector<double>& a, const std::vector<double>& b) {
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
        diff = std::max(diff, std::abs(a[i] - b[i]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

// Central difference (one-sided at the left end of the domain).
double derivative(const RealFn& fn, double t, double t1) {
    const double h = 1e-5 * std::max(1.0, std::abs(t));
    if (t - h < t1) return (-3.0 * fn(t) + 4.0 * fn(t + h) - fn(t + 2.0 * h)) / (2.0 * h);
    return (fn(t + h) - fn(t - h)) / (2.0 * h);
}

}  // namespace

std::string toString(Regularity r) {
    switch (r) {
        case Regularity::Regular: return "regular";
        case Regularity::Normal: return "normal";
        case Regularity::Extremal: return "extremal";
        case Regularity::NotRegular: return "not-regular";
        case Regularity::Unresolved: return "unresolved";
    }
    return "unknown";
}

RiccatiSolution integrateRiccati(const RiccatiProblem& p, double horizon, double tol) {
    if (!(horizon > p.t1)) throw std::invalid_argument("integrateRiccati: horizon must exceed t1");
    ode::Options opts;
    opts.rtol = tol;
    opts.atol = tol * 1e-4;
    opts.recordSteps = true;
    opts.escaped = escapeOn({0});
    const auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) { dy[0] = riccatiRhs(p, t, y[0]); };
    const auto res = ode::integrate(rhs, p.t1, {p.y1}, horizon, {}, opts);

    RiccatiSolution sol;
    sol.status = res.status;
    sol.grid = res.times;
    sol.values.reserve(res.states.size());
    for (const auto& s : res.states) sol.values.push_back(s[0]);
    switch (res.status) {
        case ode::Status::Completed: sol.classification = Regularity::Regular; break;
        case ode::Status::Escaped:
            sol.escaped = true;
            sol.escapeTime = res.tEnd;
            sol.classification = Regularity::NotRegular;
            break;
        default: sol.classification = Regularity::Unresolved; break;
    }
    return sol;
}

Regularity classifySolution(const RiccatiProblem& p, double horizon, double delta, int probes, double tol) {
    if (delta <= 0.0 || probes < 2) throw std::invalid_argument("classifySolution: need delta > 0 and probes >= 2");
    const auto base = integrateRiccati(p, horizon, tol);
    if (base.classification != Regularity::Regular) return base.classification;

    const int half = probes / 2;
    bool unresolved = false;
    for (int k = 1; k <= half; ++k) {
        const double off = delta * static_cast<double>(k) / static_cast<double>(half) * (1.0 - 1e-6);
        for (double sign : {-1.0, 1.0}) {
            RiccatiProblem q = p;
            q.y1 = p.y1 + sign * off;
            const auto r = integrateRiccati(q, horizon, tol).classification;
            if (r == Regularity::NotRegular) return Regularity::Extremal;
            if (r == Regularity::Unresolved) unresolved = true;
        }
    }
    return unresolved ? Regularity::Unresolved : Regularity::Normal;
}

double cauchyIdentityResidual(const RiccatiProblem& p, const RiccatiSolution& sol) {
    if (!sol.regular() || sol.grid.size() < 2) throw std::invalid_argument("cauchyIdentityResidual: solution not regular");
    // [y, phi0, exp{-int g}, int exp{-int_tau^t g} h phi0]
    const auto rhs = [&](double t, std::span<const double> s, std::span<double> d) {
        const double f = p.f(t), g = p.g(t), h = p.h(t);
        d[0] = -(f * s[0] * s[0] + g * s[0] + h);
        d[1] = f * s[0] * s[1];
        d[2] = -g * s[2];
        d[3] = -g * s[3] + h * s[1];
    };
    const auto outputs = ode::linspace(p.t1, sol.end(), kSamples);
    ode::Options opts;
    opts.rtol = 1e-11;
    opts.atol = 1e-14;
    opts.escaped = escapeOn({0, 1, 2, 3}, 1e150);
    const auto res = ode::integrate(rhs, p.t1, {p.y1, 1.0, 1.0, 0.0}, sol.end(), outputs, opts);
    if (!res.completed()) throw std::runtime_error("cauchyIdentityResidual: integration " + ode::toString(res.status));

    std::vector<double> lhs, rhsv;
    for (const auto& s : res.states) {
        lhs.push_back(s[0] * s[1]);
        rhsv.push_back(p.y1 * s[2] - s[3]);
    }
    return supRelative(lhs, rhsv);
}

Lemma21Result lemma21Check(const RiccatiProblem& p, const RiccatiSolution& sol, double tol) {
    if (!sol.regular()) throw std::invalid_argument("lemma21Check: solution not regular");
    for (double t : sol.grid) {
        if (p.f(t) < -1e-14) throw std::invalid_argument("lemma21Check: f is negative at t = " + std::to_string(t));
    }
    // [y, int f y, exp{-int g}, int f exp{-int g}, Z, int f Z]  with Z' = -g Z + h
    const auto rhs = [&](double t, std::span<const double> s, std::span<double> d) {
        const double f = p.f(t), g = p.g(t), h = p.h(t);
        d[0] = -(f * s[0] * s[0] + g * s[0] + h);
        d[1] = f * s[0];
        d[2] = -g * s[2];
        d[3] = f * s[2];
        d[4] = -g * s[4] + h;
        d[5] = f * s[4];
    };
    ode::Options opts;
    opts.rtol = 1e-11;
    opts.atol = 1e-14;
    const auto res = ode::integrate(rhs, p.t1, {p.y1, 0.0, 1.0, 0.0, 0.0, 0.0}, sol.end(), {}, opts);
    if (!res.completed()) throw std::runtime_error("lemma21Check: integration " + ode::toString(res.status));
    Lemma21Result out;
    out.lhs = res.yEnd[1];
    out.rhs = p.y1 * res.yEnd[3] - res.yEnd[5];
    out.holds = out.lhs <= out.rhs + tol * std::max(1.0, std::abs(out.rhs));
    return out;
}

Lemma22Result lemma22Check(const RealFn& g, const RealFn& h, const RealFn& phi, double t0, double horizon) {
    if (!(horizon > t0)) throw std::invalid_argument("lemma22Check: horizon must exceed t0");
    // [weighted integral, int g, unweighted kernel]
    const auto rhs = [&](double t, std::span<const double> s, std::span<double> d) {
        const double gv = g(t), ha = std::abs(h(t));
        d[0] = -gv * s[0] + ha * phi(t);
        d[1] = gv;
        d[2] = -gv * s[2] + ha;
    };
    const auto grid = ode::linspace(t0, horizon, kSamples);
    ode::Options opts;
    opts.rtol = 1e-11;
    opts.atol = 1e-16;
    const auto res = ode::integrate(rhs, t0, {0.0, 0.0, 0.0}, horizon, grid, opts);
    if (!res.completed()) throw std::runtime_error("lemma22Check: integration " + ode::toString(res.status));

    std::vector<double> w, gi, k;
    for (const auto& s : res.states) {
        w.push_back(s[0]);
        gi.push_back(s[1]);
        k.push_back(s[2]);
    }
    Lemma22Result out;
    out.value = w.back();
    out.curve = makeCurve("weighted-kernel", res.times, std::move(w));
    out.gIntegralDiverges = classifyTrend(res.times, gi) == Trend::DivergesUp;
    const Trend kt = classifyTrend(res.times, k);
    out.kernelBounded = kt == Trend::Bounded || kt == Trend::DivergesDown;
    return out;
}

Theorem21Result theorem21Check(const RiccatiProblem& eq1, const RiccatiProblem& eq2, const RealFn& eta0,
                               const RealFn& eta1, double lambda, double horizon, double tol) {
    const double t1 = eq1.t1;
    if (!(horizon > t1)) throw std::invalid_argument("theorem21Check: horizon must exceed t1");
    Theorem21Result out;
    const auto probe = ode::linspace(t1, horizon, 400);

    auto violation = [&](std::string what) {
        out.preconditionsHold = false;
        out.violations.push_back(std::move(what));
    };
    for (double t : probe) {
        if (eq1.f(t) < -tol) {
            violation("f negative at t = " + std::to_string(t));
            break;
        }
    }
    auto checkInequality = [&](const RiccatiProblem& eq, const RealFn& eta, const char* label) {
        for (double t : probe) {
            const double e = eta(t);
            const double lhs = derivative(eta, t, t1) + eq.f(t) * e * e + eq.g(t) * e + eq.h(t);
            const double scale = std::max({1.0, std::abs(e), std::abs(eq.h(t))});
            if (lhs < -1e-6 * scale) {
                violation(std::string(label) + " violates its differential inequality at t = " + std::to_string(t));
                return;
            }
        }
    };
    checkInequality(eq1, eta0, "eta0");
    checkInequality(eq2, eta1, "eta1");
    if (eta0(t1) < eq1.y1 - tol) violation("eta0(t1) < y0(t1)");
    if (eta1(t1) < eq1.y1 - tol) violation("eta1(t1) < y0(t1)");
    if (lambda < eq2.y1 - tol || lambda > eta0(t1) + tol) violation("lambda outside [y1(t1), eta0(t1)]");
    if (eq1.y1 < eq2.y1 - tol) violation("y0(t1) < y1(t1)");

    // [y0, y1, W]; W carries the hypothesis expression rescaled by exp{-int P}, which keeps its sign.
    const auto rhs = [&](double t, std::span<const double> s, std::span<double> d) {
        const double f = eq1.f(t), g = eq1.g(t), h = eq1.h(t);
        const double f1 = eq2.f(t), g1 = eq2.g(t), h1 = eq2.h(t);
        const double y1 = s[1];
        d[0] = -(f * s[0] * s[0] + g * s[0] + h);
        d[1] = -(f1 * y1 * y1 + g1 * y1 + h1);
        const double P = f * (eta0(t) + eta1(t)) + g;
        const double R = (f1 - f) * y1 * y1 + (g1 - g) * y1 + h1 - h;
        d[2] = -P * s[2] + R;
    };
    ode::Options opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-13;
    opts.escaped = escapeOn({0, 1});
    const auto grid = ode::linspace(t1, horizon, kSamples);
    const auto res = ode::integrate(rhs, t1, {eq1.y1, eq2.y1, lambda - eq2.y1}, horizon, grid, opts);

    out.minHypothesis = std::numeric_limits<double>::infinity();
    out.minGap = std::numeric_limits<double>::infinity();
    for (const auto& s : res.states) {
        out.minHypothesis = std::min(out.minHypothesis, s[2]);
        out.minGap = std::min(out.minGap, s[0] - s[1]);
    }
    const bool completed = res.completed();
    if (!completed) out.violations.push_back("integration stopped at t = " + std::to_string(res.tEnd) + " (" +
                                             ode::toString(res.status) + ")");
    out.hypothesisHolds = completed && out.minHypothesis >= -tol;
    out.orderingHolds = completed && out.minGap >= -tol;
    return out;
}

RiccatiProblem mainRiccati(const ScalarComparisonSystem& s, double t1, double y1) {
    RiccatiProblem p;
    p.f = s.normB;
    p.g = [s](double t) { return s.E(t); };
    p.h = [c = s.normC](double t) { return -c(t); };
    p.t1 = t1;
    p.y1 = y1;
    return p;
}

SolutionPair constructSolutionPair(const ScalarComparisonSystem& s, double horizon, double tol) {
    if (!(horizon > s.t0)) throw std::invalid_argument("constructSolutionPair: horizon must exceed t0");
    // [y0, ln phi, psi via the d*-kernel representation, K, bounding exponent]
    const auto rhs = [&](double t, std::span<const double> x, std::span<double> d) {
        const double a = s.aStar(t), dd = s.dStar(t), b = s.normB(t), c = s.normC(t);
        const double e = a - dd;
        d[0] = c - e * x[0] - b * x[0] * x[0];
        d[1] = b * x[0] + a;
        d[2] = dd * x[2] + c * std::exp(x[1]);
        d[3] = -e * x[3] + c;
        d[4] = a + b * x[3];
    };
    const auto grid = ode::linspace(s.t0, horizon, kSamples);
    ode::Options opts;
    opts.rtol = tol;
    opts.atol = tol * 1e-4;
    opts.escaped = escapeOn({0});
    const auto res = ode::integrate(rhs, s.t0, {0.0, 0.0, 0.0, 0.0, 0.0}, horizon, grid, opts);

    SolutionPair out;
    out.grid = res.times;
    out.y0.grid = res.times;
    out.y0.status = res.status;
    out.minY0 = std::numeric_limits<double>::infinity();
    std::vector<double> psiRep;
    double excess = -std::numeric_limits<double>::infinity();
    double scale = 1.0;
    for (const auto& x : res.states) {
        const double phi = std::exp(x[1]);
        out.y0.values.push_back(x[0]);
        out.phi.push_back(phi);
        out.psi.push_back(x[0] * phi);
        psiRep.push_back(x[2]);
        out.minY0 = std::min(out.minY0, x[0]);
        excess = std::max(excess, x[1] - x[4]);
        scale = std::max(scale, std::abs(x[4]));
    }
    switch (res.status) {
        case ode::Status::Completed: out.y0.classification = Regularity::Regular; break;
        case ode::Status::Escaped:
            out.y0.escaped = true;
            out.y0.escapeTime = res.tEnd;
            out.y0.classification = Regularity::NotRegular;
            break;
        default: out.y0.classification = Regularity::Unresolved; break;
    }
    out.applicable = res.completed();
    out.representationResidual = supRelative(out.psi, psiRep);
    out.boundExcess = excess;
    out.boundHolds = excess <= 1e-6 * scale;
    return out;
}

ConditionCurve integratedGap(const RiccatiProblem& p, double yA, double yB, double horizon, std::size_t samples) {
    const auto rhs = [&](double t, std::span<const double> s, std::span<double> d) {
        d[0] = riccatiRhs(p, t, s[0]);
        d[1] = riccatiRhs(p, t, s[1]);
        d[2] = p.f(t) * (s[0] - s[1]);
    };
    const auto grid = ode::linspace(p.t1, horizon, samples);
    ode::Options opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-13;
    opts.escaped = escapeOn({0, 1});
    const auto res = ode::integrate(rhs, p.t1, {yA, yB, 0.0}, horizon, grid, opts);
    std::vector<double> v;
    for (const auto& s : res.states) v.push_back(s[2]);
    auto curve = makeCurve("integrated-gap", res.times, std::move(v));
    curve.truncated = !res.completed();
    return curve;
}

}  // namespace qstab
