#include "qstab/rivals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qstab/ode.hpp"

namespace qstab {

namespace {

bool constantSystem(const BlockSystem& sys) {
    return sys.A.isConstant() && sys.B.isConstant() && sys.C.isConstant() && sys.D.isConstant();
}

struct IntegratedCurves {
    std::vector<double> grid;
    std::vector<std::vector<double>> integrals;
    std::vector<std::vector<double>> integrands;
    bool completed = true;
};

// Integrates several scalar integrands of the full matrix at once; the pointwise values are
// sampled on the same grid.
IntegratedCurves integrateIntegrands(const BlockSystem& sys, double horizon, std::size_t count,
                                     const std::function<void(const QMatrix&, std::span<double>)>& integrand) {
    if (!(horizon > sys.t0)) throw std::invalid_argument("rival: horizon must exceed t0");
    const auto rhs = [&](double t, std::span<const double>, std::span<double> d) { integrand(sys.full(t), d); };
    const auto grid = ode::linspace(sys.t0, horizon, kRivalSamples);
    ode::Options opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    const auto res = ode::integrate(rhs, sys.t0, ode::State(count, 0.0), horizon, grid, opts);

    IntegratedCurves out;
    out.grid = res.times;
    out.completed = res.completed();
    out.integrals.assign(count, {});
    out.integrands.assign(count, {});
    std::vector<double> buf(count);
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        integrand(sys.full(res.times[i]), buf);
        for (std::size_t k = 0; k < count; ++k) {
            out.integrals[k].push_back(res.states[i][k]);
            out.integrands[k].push_back(buf[k]);
        }
    }
    return out;
}

}  // namespace

double lozinskiiNorm(const QMatrix& m, LozinskiiKind kind) {
    if (m.rows() != m.cols() || m.rows() == 0) throw std::invalid_argument("lozinskiiNorm: square matrix required");
    const std::size_t n = m.rows();
    if (kind == LozinskiiKind::III) {
        const Eigen::MatrixXd e = realEmbedding(m);
        const Eigen::MatrixXd sym = 0.5 * (e + e.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw std::runtime_error("lozinskiiNorm: eigen-solve failed");
        return es.eigenvalues().maxCoeff();
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double s = m(i, i).w;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            s += kind == LozinskiiKind::I ? m(i, j).norm() : m(j, i).norm();
        }
        best = std::max(best, s);
    }
    return best;
}

std::string toString(RivalMethod m) {
    switch (m) {
        case RivalMethod::LozinskiiI: return "lozinskii-I";
        case RivalMethod::LozinskiiII: return "lozinskii-II";
        case RivalMethod::LozinskiiIII: return "lozinskii-III";
        case RivalMethod::Freezing: return "freezing";
        case RivalMethod::LyapunovBogdanov: return "lyapunov-bogdanov";
    }
    return "unknown";
}

RivalMethod rivalMethodFromString(const std::string& s) {
    for (auto m : {RivalMethod::LozinskiiI, RivalMethod::LozinskiiII, RivalMethod::LozinskiiIII, RivalMethod::Freezing,
                   RivalMethod::LyapunovBogdanov}) {
        if (toString(m) == s) return m;
    }
    throw std::invalid_argument("unknown rival method '" + s + "'");
}

std::string toString(RivalVerdict v) { return v == RivalVerdict::Stable ? "Stable" : "Inconclusive"; }

RivalReport lozinskiiVerdict(const BlockSystem& sys, LozinskiiKind kind, double horizon, const TrendRule& rule) {
    static const char* names[] = {"I", "II", "III"};
    const auto label = std::string(names[static_cast<int>(kind)]);
    auto ic = integrateIntegrands(sys, horizon, 1,
                                  [kind](const QMatrix& m, std::span<double> out) { out[0] = lozinskiiNorm(m, kind); });
    RivalReport rep;
    rep.method = kind == LozinskiiKind::I    ? RivalMethod::LozinskiiI
                 : kind == LozinskiiKind::II ? RivalMethod::LozinskiiII
                                             : RivalMethod::LozinskiiIII;
    rep.applicable = true;
    rep.curve = makeCurve("int gamma_" + label, ic.grid, std::move(ic.integrals[0]), rule);
    rep.pointwise = makeCurve("gamma_" + label, ic.grid, std::move(ic.integrands[0]), rule);
    rep.curve.truncated = !ic.completed;
    const bool ok = ic.completed && rep.curve.boundedAbove();
    rep.verdict = ok ? RivalVerdict::Stable : RivalVerdict::Inconclusive;
    rep.summary = ok ? "integral bounded above" : "integral not bounded above (" + toString(rep.curve.trend) + ")";
    return rep;
}

RivalReport freezingCheck(const BlockSystem& sys, double horizon) {
    if (!(horizon > sys.t0)) throw std::invalid_argument("freezingCheck: horizon must exceed t0");
    const auto grid = ode::linspace(sys.t0, horizon, kRivalSamples);
    std::vector<double> abscissa;
    abscissa.reserve(grid.size());
    for (double t : grid) abscissa.push_back(maxRealEigenvalue(sys.full(t)));

    RivalReport rep;
    rep.method = RivalMethod::Freezing;
    rep.curve = makeCurve("spectral abscissa", grid, abscissa);
    rep.pointwise = rep.curve;
    rep.applicable = rep.curve.supValue < 0.0;
    if (!rep.applicable) {
        rep.summary = "precondition failed";
        rep.notes.push_back("sup of the frozen spectral abscissa is " + std::to_string(rep.curve.supValue) + " >= 0");
    } else if (constantSystem(sys)) {
        rep.verdict = RivalVerdict::Stable;
        rep.summary = "precondition passed (time-invariant system)";
    } else {
        rep.summary = "precondition passed (full test not implemented)";
    }
    return rep;
}

RivalReport lyapunovBogdanovCheck(const BlockSystem& sys, double horizon, const TrendRule& rule) {
    const std::size_t k = sys.m + sys.n;
    auto ic = integrateIntegrands(sys, horizon, 1 + k * k, [k](const QMatrix& m, std::span<double> out) {
        out[0] = opNorm(m);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) out[1 + i * k + j] = m(i, j).norm();
    });
    RivalReport rep;
    rep.method = RivalMethod::LyapunovBogdanov;
    rep.applicable = true;
    rep.curve = makeCurve("int ||M||", ic.grid, std::move(ic.integrals[0]), rule);
    rep.pointwise = makeCurve("||M||", ic.grid, std::move(ic.integrands[0]), rule);
    rep.curve.truncated = !ic.completed;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const auto c = makeCurve("", ic.grid, ic.integrals[1 + i * k + j], rule);
            if (c.trend != Trend::Bounded) {
                rep.notes.push_back("int |m_" + std::to_string(i + 1) + std::to_string(j + 1) + "| " +
                                    toString(c.trend));
            }
        }
    }
    const bool ok = ic.completed && rep.curve.trend == Trend::Bounded;
    rep.verdict = ok ? RivalVerdict::Stable : RivalVerdict::Inconclusive;
    rep.summary = ok ? "norm integral bounded" : "norm integral " + toString(rep.curve.trend);
    return rep;
}

RivalReport runRival(const BlockSystem& sys, RivalMethod method, double horizon, const TrendRule& rule) {
    switch (method) {
        case RivalMethod::LozinskiiI: return lozinskiiVerdict(sys, LozinskiiKind::I, horizon, rule);
        case RivalMethod::LozinskiiII: return lozinskiiVerdict(sys, LozinskiiKind::II, horizon, rule);
        case RivalMethod::LozinskiiIII: return lozinskiiVerdict(sys, LozinskiiKind::III, horizon, rule);
        case RivalMethod::Freezing: return freezingCheck(sys, horizon);
        case RivalMethod::LyapunovBogdanov: return lyapunovBogdanovCheck(sys, horizon, rule);
    }
    throw std::invalid_argument("runRival: unknown method");
}

}  // namespace qstab
