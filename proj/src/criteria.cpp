#include "qstab/criteria.hpp"

#include <cmath>
#include <stdexcept>

#include "qstab/ode.hpp"

namespace qstab {

namespace {

constexpr double kCurveEscape = 1e150;

// Integrates an augmented linear system from zero and turns the selected components into curves.
std::vector<ConditionCurve> integrateCurves(const ode::Rhs& rhs, std::size_t dim, double t0, double horizon,
                                            const std::vector<std::pair<std::size_t, std::string>>& picks,
                                            const TrendRule& rule, std::size_t samples) {
    if (!(horizon > t0)) throw std::invalid_argument("condition curves: horizon must exceed t0");
    ode::Options opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-13;
    opts.escaped = [](double, std::span<const double> y) {
        for (double v : y)
            if (!(std::abs(v) <= kCurveEscape)) return true;
        return false;
    };
    const auto grid = ode::linspace(t0, horizon, samples);
    const auto res = ode::integrate(rhs, t0, ode::State(dim, 0.0), horizon, grid, opts);

    std::vector<ConditionCurve> out;
    for (const auto& [index, name] : picks) {
        std::vector<double> v;
        v.reserve(res.states.size());
        for (const auto& s : res.states) v.push_back(s[index]);
        auto curve = makeCurve(name, res.times, std::move(v), rule);
        if (!res.completed()) {
            curve.truncated = true;
            const double last = curve.finalValue();
            if (res.status == ode::Status::Escaped && std::abs(last) > kCurveEscape)
                curve.trend = last > 0 ? Trend::DivergesUp : Trend::DivergesDown;
            else
                curve.trend = Trend::Unresolved;
        }
        out.push_back(std::move(curve));
    }
    return out;
}

}  // namespace

std::string toString(Verdict v) {
    switch (v) {
        case Verdict::LyapunovStable: return "LyapunovStable";
        case Verdict::AsymptoticallyStable: return "AsymptoticallyStable";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "unknown";
}

ConditionCurve evalCondition1(const ScalarComparisonSystem& s, double horizon, const TrendRule& rule,
                              std::size_t samples) {
    const auto rhs = [&](double t, std::span<const double> y, std::span<double> d) {
        d[0] = s.dStar(t) * y[0] + s.normC(t);
    };
    return integrateCurves(rhs, 1, s.t0, horizon, {{0, "I1"}}, rule, samples).front();
}

ConditionCurve evalKernel(const ScalarComparisonSystem& s, double horizon, const TrendRule& rule,
                          std::size_t samples) {
    const auto rhs = [&](double t, std::span<const double> y, std::span<double> d) {
        d[0] = -s.E(t) * y[0] + s.normC(t);
    };
    return integrateCurves(rhs, 1, s.t0, horizon, {{0, "K"}}, rule, samples).front();
}

ConditionCurve evalCondition2(const ScalarComparisonSystem& s, double horizon, const TrendRule& rule,
                              std::size_t samples) {
    const auto rhs = [&](double t, std::span<const double> y, std::span<double> d) {
        d[0] = -s.E(t) * y[0] + s.normC(t);
        d[1] = s.aStar(t) + s.normB(t) * y[0];
    };
    return integrateCurves(rhs, 2, s.t0, horizon, {{1, "J"}}, rule, samples).front();
}

Condition2Prime evalCondition2Prime(const ScalarComparisonSystem& s, double horizon, const TrendRule& rule,
                                    std::size_t samples) {
    const auto rhs = [&](double t, std::span<const double> y, std::span<double> d) {
        const double e = s.E(t);
        d[0] = -e * y[0] + s.normC(t);
        d[1] = s.aStar(t) + s.normB(t) * y[0];
        d[2] = e;
    };
    auto curves = integrateCurves(rhs, 3, s.t0, horizon, {{2, "intE"}, {1, "J"}}, rule, samples);
    Condition2Prime out;
    out.eIntegral = std::move(curves[0]);
    out.j = std::move(curves[1]);
    out.satisfied = out.eIntegral.trend == Trend::DivergesUp && out.j.trend == Trend::DivergesDown;
    return out;
}

Verdict verdictFromCurves(const ConditionCurve& cond1, const ConditionCurve& cond2, const Condition2Prime& c2p) {
    const bool c1 = cond1.trend == Trend::Bounded;
    if (c1 && c2p.satisfied) return Verdict::AsymptoticallyStable;
    if (c1 && cond2.boundedAbove()) return Verdict::LyapunovStable;
    return Verdict::Inconclusive;
}

CriterionReport theorem31Verdict(const BlockSystem& sys, const std::optional<Envelopes>& env, double horizon,
                                 const TrendRule& rule) {
    sys.validate();
    if (!(horizon > sys.t0)) throw std::invalid_argument("theorem31Verdict: horizon must exceed t0");
    CriterionReport rep;
    const auto grid = ode::linspace(sys.t0, horizon, kStructuralSamples);
    rep.condA = checkConditionA(sys, grid);
    rep.condB = checkConditionB(sys, grid);
    rep.structuralOk = rep.condA.passed && rep.condB.passed;
    for (const auto& n : rep.condB.notes) rep.notes.push_back(n);

    const Envelopes envelopes = env ? *env : deriveEnvelopes(sys);
    if (rep.structuralOk) {
        rep.envelopeCheck = verifyEnvelopes(sys, envelopes, grid);
        if (!rep.envelopeCheck->holds) {
            rep.notes.push_back("envelopes do not dominate the integrated diagonal blocks (max excess " +
                                std::to_string(rep.envelopeCheck->maxExcess) + ")");
        }
    } else {
        if (!rep.condA.passed) rep.notes.push_back("commutation condition on the diagonal blocks fails");
        if (!rep.condB.passed) rep.notes.push_back("diagonalizability condition on the diagonal blocks fails");
    }

    const auto scalar = buildScalarSystem(sys, envelopes);
    rep.cond1 = evalCondition1(scalar, horizon, rule);
    rep.kernel = evalKernel(scalar, horizon, rule);
    rep.cond2 = evalCondition2(scalar, horizon, rule);
    rep.cond2prime = evalCondition2Prime(scalar, horizon, rule);

    const bool envelopesOk = !rep.envelopeCheck || rep.envelopeCheck->holds;
    rep.verdict = (rep.structuralOk && envelopesOk) ? verdictFromCurves(rep.cond1, rep.cond2, rep.cond2prime)
                                                    : Verdict::Inconclusive;
    if (rep.cond1.trend == Trend::Unresolved || rep.cond2.trend == Trend::Unresolved)
        rep.notes.push_back("a condition curve has no resolvable trend at this horizon");
    return rep;
}

BlockSystem secondOrderSystem(const TimeFunction& p, const TimeFunction& q, const TimeFunction& r) {
    const double t0 = p.domainStart();
    const Expression one = Expression::constant(Quaternion{1.0, 0.0, 0.0, 0.0});
    BlockSystem sys;
    sys.m = 1;
    sys.n = 1;
    sys.t0 = t0;
    sys.A = FunctionMatrix::zero(1, 1, t0);
    sys.B = FunctionMatrix(1, 1, {TimeFunction(one / p.expression(), t0)});
    sys.C = FunctionMatrix(1, 1, {TimeFunction(-r.expression(), t0)});
    sys.D = FunctionMatrix(1, 1, {TimeFunction(-(q.expression() / p.expression()), t0)});
    return sys;
}

CriterionReport corollary31(const TimeFunction& p, const TimeFunction& q, const TimeFunction& r, double horizon,
                            const TrendRule& rule) {
    const double t0 = p.domainStart();
    std::optional<Quaternion> previous;
    for (double t : ode::linspace(t0, horizon, kConditionSamples)) {
        const Quaternion pv = p(t);
        if (pv.norm() <= 1e-12) throw std::invalid_argument("corollary31: p vanishes at t = " + std::to_string(t));
        if (previous && previous->w * pv.w + previous->x * pv.x + previous->y * pv.y + previous->z * pv.z <= 0.0)
            throw std::invalid_argument("corollary31: p crosses zero before t = " + std::to_string(t));
        previous = pv;
    }
    const auto sys = secondOrderSystem(p, q, r);
    Envelopes env;
    env.aStar = [](double) { return 0.0; };
    env.dStar = [q, p](double t) { return -(q(t) / p(t)).w; };
    env.source = EnvelopeSource::Derived;
    env.aStarDescription = "0";
    env.dStarDescription = "-Re(q/p)";
    const auto scalar = buildScalarSystem(sys, env);

    CriterionReport rep;
    rep.condA.passed = rep.condB.passed = true;
    rep.condA.condition = "a";
    rep.condB.condition = "b";
    rep.condB.witness = "scalar";
    rep.structuralOk = true;
    rep.cond1 = evalCondition1(scalar, horizon, rule);
    rep.kernel = evalKernel(scalar, horizon, rule);
    rep.cond2 = evalCondition2(scalar, horizon, rule);
    rep.cond2.name = "I2";
    rep.cond2prime = evalCondition2Prime(scalar, horizon, rule);
    const bool bounded = rep.cond1.trend == Trend::Bounded && rep.cond2.trend == Trend::Bounded;
    rep.verdict = bounded ? Verdict::LyapunovStable : Verdict::Inconclusive;
    return rep;
}

std::optional<bool> remark33Check(const TimeFunction& p, const TimeFunction& q, const TimeFunction& r,
                                  double horizon) {
    for (double t : ode::linspace(p.domainStart(), horizon, 400)) {
        const Quaternion pv = p(t), qv = q(t), rv = r(t);
        if (!pv.isReal(1e-12) || pv.w <= 0.0) return std::nullopt;
        if (!rv.isReal(1e-12) || rv.w > 0.0) return std::nullopt;
        if (!qv.isReal(1e-12)) return std::nullopt;
    }
    return true;
}

SecondOrderReport analyzeSecondOrder(const TimeFunction& p, const TimeFunction& q, const TimeFunction& r,
                                     double horizon, const TrendRule& rule) {
    SecondOrderReport rep;
    rep.criterion = corollary31(p, q, r, horizon, rule);
    rep.asymptoticExcluded = remark33Check(p, q, r, horizon);
    rep.verdict = rep.criterion.verdict;
    if (rep.asymptoticExcluded.value_or(false)) {
        if (rep.verdict == Verdict::AsymptoticallyStable) rep.verdict = Verdict::LyapunovStable;
        rep.notes.push_back("asymptotic stability excluded: p > 0, r <= 0 and q real admit a positive non-decreasing "
                            "solution");
        rep.notes.push_back("for p > 0, r <= 0 and q real the boundedness of I1 and I2 is also necessary for "
                            "Lyapunov stability");
    } else {
        rep.notes.push_back("asymptotic-exclusion check skipped: needs p > 0, r <= 0 and q real");
    }
    return rep;
}

}  // namespace qstab
