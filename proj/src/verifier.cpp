#include "qstab/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "qstab/curve.hpp"

namespace qstab {

namespace {

double blockNorm(const ode::State& s, std::size_t from, std::size_t to) {
    double acc = 0.0;
    for (std::size_t i = from; i < to; ++i) acc += s[i] * s[i];
    return std::sqrt(acc);
}

ode::State embedInitial(const BlockSystem& sys, std::span<const Quaternion> phi0, std::span<const Quaternion> psi0) {
    if (phi0.size() != sys.m || psi0.size() != sys.n)
        throw std::invalid_argument("initial vectors must have sizes m and n");
    std::vector<Quaternion> all(phi0.begin(), phi0.end());
    all.insert(all.end(), psi0.begin(), psi0.end());
    const Eigen::VectorXd v = embedVector(all);
    return ode::State(v.data(), v.data() + v.size());
}

// Linear right-hand side x' = embed(M(t)) x.
ode::Rhs linearRhs(const BlockSystem& sys, std::size_t dim) {
    return [&sys, dim](double t, std::span<const double> y, std::span<double> d) {
        const Eigen::MatrixXd e = realEmbedding(sys.full(t));
        Eigen::Map<const Eigen::VectorXd> x(y.data(), static_cast<Eigen::Index>(dim));
        Eigen::Map<Eigen::VectorXd> dx(d.data(), static_cast<Eigen::Index>(dim));
        dx = e * x;
    };
}

TrajectorySet runEmbedded(const BlockSystem& sys, ode::State x0, double horizon, double tol, std::string label) {
    if (!(horizon > sys.t0)) throw std::invalid_argument("integrateBlockSystem: horizon must exceed t0");
    const std::size_t dim = 4 * (sys.m + sys.n);
    ode::Options opts;
    opts.rtol = tol;
    opts.atol = tol * 1e-3;
    const auto grid = ode::linspace(sys.t0, horizon, kTrajectorySamples);
    auto res = ode::integrate(linearRhs(sys, dim), sys.t0, std::move(x0), horizon, grid, opts);
    TrajectorySet out;
    out.times = std::move(res.times);
    out.states = std::move(res.states);
    out.m = sys.m;
    out.n = sys.n;
    out.initialBasis = std::move(label);
    out.status = res.status;
    return out;
}

int severity(EmpiricalClass c) {
    switch (c) {
        case EmpiricalClass::Decaying: return 0;
        case EmpiricalClass::Bounded: return 1;
        case EmpiricalClass::Unresolved: return 2;
        case EmpiricalClass::Growing: return 3;
    }
    return 2;
}

}  // namespace

double TrajectorySet::phiNorm(std::size_t i) const { return blockNorm(states[i], 0, 4 * m); }
double TrajectorySet::psiNorm(std::size_t i) const { return blockNorm(states[i], 4 * m, 4 * (m + n)); }
double TrajectorySet::norm(std::size_t i) const { return blockNorm(states[i], 0, 4 * (m + n)); }

TrajectorySet integrateBlockSystem(const BlockSystem& sys, std::span<const Quaternion> phi0,
                                   std::span<const Quaternion> psi0, double horizon, double tol) {
    sys.validate();
    return runEmbedded(sys, embedInitial(sys, phi0, psi0), horizon, tol, "custom");
}

std::vector<TrajectorySet> basisTrajectories(const BlockSystem& sys, double horizon, double tol) {
    sys.validate();
    const std::size_t dim = 4 * (sys.m + sys.n);
    std::vector<TrajectorySet> out(dim);
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(dim, std::thread::hardware_concurrency()));
    for (std::size_t start = 0; start < dim; start += workers) {
        std::vector<std::future<TrajectorySet>> batch;
        for (std::size_t k = start; k < std::min(dim, start + workers); ++k) {
            batch.push_back(std::async(std::launch::async, [&sys, dim, horizon, tol, k] {
                ode::State e(dim, 0.0);
                e[k] = 1.0;
                return runEmbedded(sys, std::move(e), horizon, tol, "e" + std::to_string(k + 1));
            }));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) out[start + i] = batch[i].get();
    }
    return out;
}

std::string toString(EmpiricalClass c) {
    switch (c) {
        case EmpiricalClass::Decaying: return "decaying";
        case EmpiricalClass::Bounded: return "bounded";
        case EmpiricalClass::Growing: return "growing";
        case EmpiricalClass::Unresolved: return "unresolved";
    }
    return "unknown";
}

EmpiricalVerdict classifyEmpirical(const TrajectorySet& traj, const EmpiricalThresholds& th) {
    if (traj.states.empty()) throw std::invalid_argument("classifyEmpirical: empty trajectory");
    EmpiricalVerdict v;
    std::vector<double> norms;
    norms.reserve(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) norms.push_back(traj.norm(i));
    const double n0 = norms.front();
    if (!(n0 > 0.0)) throw std::invalid_argument("classifyEmpirical: zero initial state");
    v.peakNorm = *std::max_element(norms.begin(), norms.end()) / n0;
    v.endRatio = norms.back() / n0;
    if (traj.status != ode::Status::Completed) {
        v.classification = v.peakNorm > th.peakGrowth ? EmpiricalClass::Growing : EmpiricalClass::Unresolved;
        return v;
    }
    const Trend trend = classifyTrend(traj.times, norms);
    if (v.endRatio < th.decay)
        v.classification = EmpiricalClass::Decaying;
    else if (v.endRatio > th.growth || v.peakNorm > th.peakGrowth)
        v.classification = EmpiricalClass::Growing;
    else if (v.peakNorm <= th.boundedPeak && (trend == Trend::Bounded || trend == Trend::DivergesDown))
        v.classification = EmpiricalClass::Bounded;
    else
        v.classification = EmpiricalClass::Unresolved;
    return v;
}

EmpiricalVerdict aggregateEmpirical(const std::vector<EmpiricalVerdict>& verdicts) {
    if (verdicts.empty()) throw std::invalid_argument("aggregateEmpirical: no verdicts");
    EmpiricalVerdict out = verdicts.front();
    for (const auto& v : verdicts) {
        if (severity(v.classification) > severity(out.classification)) out.classification = v.classification;
        out.peakNorm = std::max(out.peakNorm, v.peakNorm);
        out.endRatio = std::max(out.endRatio, v.endRatio);
    }
    return out;
}

DominationResult dominationCheck(const BlockSystem& sys, const Envelopes& env, std::span<const Quaternion> phi0,
                                 std::span<const Quaternion> psi0, double horizon, double tol) {
    sys.validate();
    if (!(horizon > sys.t0)) throw std::invalid_argument("dominationCheck: horizon must exceed t0");
    const auto structural = ode::linspace(sys.t0, horizon, 20);
    if (!checkConditionA(sys, structural).passed || !checkConditionB(sys, structural).passed)
        throw std::invalid_argument("dominationCheck: structural conditions fail");

    const std::size_t dim = 4 * (sys.m + sys.n);
    const auto scalar = buildScalarSystem(sys, env);
    const auto linear = linearRhs(sys, dim);
    const auto rhs = [&](double t, std::span<const double> y, std::span<double> d) {
        linear(t, y.subspan(0, dim), d.subspan(0, dim));
        const double p = y[dim], q = y[dim + 1];
        d[dim] = scalar.aStar(t) * p + scalar.normB(t) * q;
        d[dim + 1] = scalar.normC(t) * p + scalar.dStar(t) * q;
    };
    ode::State x0 = embedInitial(sys, phi0, psi0);
    const double p0 = blockNorm(x0, 0, 4 * sys.m), q0 = blockNorm(x0, 4 * sys.m, dim);
    x0.push_back(p0);
    x0.push_back(q0);

    ode::Options opts;
    opts.rtol = 1e-12;
    opts.atol = 1e-15 * std::max(1.0, p0 + q0);
    const auto grid = ode::linspace(sys.t0, horizon, kTrajectorySamples);
    const auto res = ode::integrate(rhs, sys.t0, x0, horizon, grid, opts);
    if (!res.completed()) throw std::runtime_error("dominationCheck: integration " + ode::toString(res.status));

    // Round-off floor for components that start at zero on both sides.
    const double floor = 1e-13 * std::max(1.0, p0 + q0);
    DominationResult out;
    out.maxViolation = -std::numeric_limits<double>::infinity();
    bool holds = true;
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        const auto& s = res.states[i];
        const double pn = blockNorm(s, 0, 4 * sys.m), qn = blockNorm(s, 4 * sys.m, dim);
        const double pm = s[dim], qm = s[dim + 1];
        out.times.push_back(res.times[i]);
        out.phiNorm.push_back(pn);
        out.psiNorm.push_back(qn);
        out.phiMajorant.push_back(pm);
        out.psiMajorant.push_back(qm);
        if (pn > pm * (1.0 + tol) + floor || qn > qm * (1.0 + tol) + floor) holds = false;
        if (pm > floor) out.maxViolation = std::max(out.maxViolation, pn / pm - 1.0);
        if (qm > floor) out.maxViolation = std::max(out.maxViolation, qn / qm - 1.0);
    }
    out.holds = holds;
    return out;
}

}  // namespace qstab
