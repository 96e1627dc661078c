#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "support/random.hpp"
#include "qstab/analysis.hpp"
#include "qstab/builtins.hpp"
#include "qstab/criteria.hpp"
#include "qstab/ode.hpp"
#include "qstab/riccati.hpp"
#include "qstab/rivals.hpp"
#include "qstab/verifier.hpp"

using namespace qstab;
using qstab::testing::Rng;
using qstab::testing::uniform;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

std::string literal(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return "(" + os.str() + ")";
}

std::string quaternionLiteral(const Quaternion& q) {
    return "(" + literal(q.w) + " + " + literal(q.x) + "*qi + " + literal(q.y) + "*qj + " + literal(q.z) + "*qk)";
}

double seconds(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

EmpiricalVerdict empirical(const BlockSystem& sys, double horizon) {
    std::vector<EmpiricalVerdict> vs;
    for (const auto& tr : basisTrajectories(sys, horizon)) vs.push_back(classifyEmpirical(tr));
    return aggregateEmpirical(vs);
}

const RivalReport& rival(const std::vector<RivalReport>& rs, RivalMethod m) {
    for (const auto& r : rs)
        if (r.method == m) return r;
    throw std::logic_error("rival not run");
}

// Random scalar comparison system built from bounded expressions; normB, normC >= 0.
ScalarComparisonSystem randomScalarSystem(Rng& rng) {
    auto fmt = [](double v) { return literal(v); };
    const std::string w1 = fmt(uniform(rng, 0.2, 3)), w2 = fmt(uniform(rng, 0.2, 3)), w3 = fmt(uniform(rng, 0.2, 3));
    const std::string a = fmt(uniform(rng, -2, 0.5)) + " + " + fmt(uniform(rng, 0, 1)) + "*sin(" + w1 + "*t)";
    const std::string d = fmt(uniform(rng, -2, 0.5)) + " + " + fmt(uniform(rng, 0, 1)) + "*cos(" + w2 + "*t)";
    const std::string b = fmt(uniform(rng, 0, 2)) + " + " + fmt(uniform(rng, 0, 1)) + "*(1 + sin(" + w3 + "*t))/2";
    const std::string c = fmt(uniform(rng, 0, 2)) + "*(1 + cos(" + w1 + "*t))/2 + " + fmt(uniform(rng, 0, 1)) + "*exp(-t)";
    ScalarComparisonSystem s;
    s.aStar = TimeFunction::parse(a, 0.0).realPart();
    s.dStar = TimeFunction::parse(d, 0.0).realPart();
    s.normB = TimeFunction::parse(b, 0.0).realPart();
    s.normC = TimeFunction::parse(c, 0.0).realPart();
    s.t0 = 0.0;
    return s;
}

// Block system in the commuting normal class: A = a0(t) I + a1(t) V, D likewise, with V J-normal.
BlockSystem randomStructuredSystem(Rng& rng, std::size_t m, std::size_t n) {
    auto normalFamily = [&](std::size_t k, const std::string& c0, const std::string& c1) {
        const auto J = testing::randomImaginaryUnit(rng);
        const auto U = testing::randomUnitary(rng, k, J);
        std::vector<Quaternion> d;
        for (std::size_t i = 0; i < k; ++i) d.push_back(Quaternion(uniform(rng, -1, 0.5)) + J * uniform(rng, -2, 2));
        const auto V = U * QMatrix::diagonal(d) * U.adjoint();
        std::vector<std::string> out;
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t col = 0; col < k; ++col)
                out.push_back((r == col ? "(" + c0 + ") + " : std::string()) + "(" + c1 + ")*" + quaternionLiteral(V(r, col)));
        return out;
    };
    auto coupling = [&](std::size_t r, std::size_t c) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < r * c; ++i)
            out.push_back(quaternionLiteral(testing::randomQuaternion(rng, 0.7)) + "*(1 + 0.5*sin(" +
                          literal(uniform(rng, 0.2, 2)) + "*t))");
        return out;
    };
    const std::string a0 = literal(uniform(rng, -1.5, 0)) + " + 0.3*sin(t)", a1 = "1 + 0.5*cos(" + literal(uniform(rng, 0.1, 2)) + "*t)";
    const std::string d0 = literal(uniform(rng, -1.5, 0)), d1 = "exp(-0.05*t)";
    return testing::blockSystem(m, n, 0.0, normalFamily(m, a0, a1), coupling(m, n), coupling(n, m), normalFamily(n, d0, d1));
}

Outcome criterion1() {
    Outcome o;
    const auto margin = couplingMargin(-1.0, -1.5, 2.0, 0.2, 1.0);
    o.detail << "margin " << margin.margin << "; ";
    o.require(std::abs(margin.margin + 0.2) < 1e-12 && margin.asymptotic(), "coupling margin -0.2 < 0");
    const auto start = std::chrono::steady_clock::now();
    const Json report = runExample("example-3.15", {{"lambda1", "-1"}, {"lambda2", "-1.5"}, {"mu1", "2"}, {"mu2", "0.2"}}, 100.0);
    const double elapsed = seconds(start);
    const std::string verdict = report.at("verdict");
    o.detail << "C = " << report.at("system").at("parameters").at("C").get<std::string>() << ", verdict " << verdict
             << ", cond2 " << report.at("cond2").at("trend").get<std::string>() << ", " << elapsed << " s";
    o.require(verdict == "AsymptoticallyStable", "verdict AsymptoticallyStable");
    o.require(elapsed < 5.0, "runtime < 5 s");
    return o;
}

Outcome criterion2() {
    Outcome o;
    for (const char* c : {"1", "3"}) {
        const auto ex = makeBuiltin("example-3.15", {{"C", c}});
        std::vector<RivalReport> rs;
        for (auto m : allRivalMethods()) rs.push_back(runRival(ex.system, m, 100.0));
        const auto& g2 = rival(rs, RivalMethod::LozinskiiII);
        double minG2 = 1e300;
        for (double v : g2.pointwise.values) minG2 = std::min(minG2, v);
        o.detail << "C=" << c << ": min gamma_II " << minG2 << ", I " << toString(rival(rs, RivalMethod::LozinskiiI).verdict)
                 << ", II " << toString(g2.verdict) << ", freezing '" << rival(rs, RivalMethod::Freezing).summary
                 << "', norm-integral " << toString(rival(rs, RivalMethod::LyapunovBogdanov).verdict) << "; ";
        o.require(minG2 >= 0.5, std::string("gamma_II >= 0.5 at C=") + c);
        o.require(rival(rs, RivalMethod::LozinskiiI).verdict == RivalVerdict::Inconclusive, "Lozinskii-I Inconclusive");
        o.require(g2.verdict == RivalVerdict::Inconclusive, "Lozinskii-II Inconclusive");
        o.require(rival(rs, RivalMethod::LyapunovBogdanov).verdict == RivalVerdict::Inconclusive,
                  "Lyapunov/Bogdanov Inconclusive");
        if (std::string(c) == "3")
            o.require(rival(rs, RivalMethod::Freezing).summary == "precondition failed", "freezing precondition fails at C=3");
    }
    return o;
}

Outcome criterion3() {
    Outcome o;
    {
        const auto ex = makeBuiltin("example-3.14", {{"nu", "0"}, {"mu", "2"}});
        const auto r = theorem31Verdict(ex.system, ex.envelopes, 1000.0);
        const auto e = empirical(ex.system, 1000.0);
        const auto g1 = lozinskiiVerdict(ex.system, LozinskiiKind::I, 1000.0);
        double minG1 = 1e300;
        for (double v : g1.pointwise.values) minG1 = std::min(minG1, v);
        o.detail << "nu=0,mu=2: verdict " << toString(r.verdict) << ", peak " << e.peakNorm << ", min gamma_I " << minG1
                 << ", Lozinskii-I " << toString(g1.verdict) << "; ";
        o.require(r.verdict == Verdict::LyapunovStable, "LyapunovStable");
        o.require(e.peakNorm <= 10.0 * (1.0 + 1e-6), "peak norm <= 10x initial at T = 1000");
        o.require(minG1 >= 2.0, "gamma_I >= 2 throughout");
        o.require(g1.verdict == RivalVerdict::Inconclusive, "Lozinskii-I Inconclusive");
    }
    {
        const auto ex = makeBuiltin("example-3.14", {{"nu", "-1"}, {"mu", "1"}});
        const auto r = theorem31Verdict(ex.system, ex.envelopes, 50.0);
        const auto e = empirical(ex.system, 50.0);
        o.detail << "nu=-1,mu=1: cond2' " << (r.cond2prime.satisfied ? "satisfied" : "not satisfied") << ", verdict "
                 << toString(r.verdict) << ", endRatio " << e.endRatio;
        o.require(r.cond2prime.satisfied, "condition 2' satisfied");
        o.require(r.verdict == Verdict::AsymptoticallyStable, "AsymptoticallyStable");
        o.require(e.endRatio < 1e-3, "endRatio < 1e-3 at T = 50");
    }
    return o;
}

Outcome criterion4() {
    Outcome o;
    Rng rng(2024);
    double worst = 1e300;
    int escaped = 0;
    for (int k = 0; k < 100; ++k) {
        const auto pair = constructSolutionPair(randomScalarSystem(rng), 30.0);
        if (!pair.applicable) ++escaped;
        worst = std::min(worst, pair.minY0);
    }
    o.detail << "100 systems, min y0 " << worst << ", escaped " << escaped;
    o.require(worst >= -1e-10, "min y0 >= -1e-10");
    o.require(escaped == 0, "no escapes");
    return o;
}

Outcome criterion5() {
    Outcome o;
    Rng rng(2024);
    double cauchy = 0.0, representation = 0.0, excess = -1e300;
    int regular = 0, boundFailures = 0;
    for (int k = 0; k < 100; ++k) {
        const auto s = randomScalarSystem(rng);
        const auto pair = constructSolutionPair(s, 30.0);
        if (!pair.y0.regular()) continue;
        ++regular;
        cauchy = std::max(cauchy, cauchyIdentityResidual(mainRiccati(s, s.t0, 0.0), pair.y0));
        representation = std::max(representation, pair.representationResidual);
        excess = std::max(excess, pair.boundExcess);
        if (!pair.boundHolds) ++boundFailures;
    }
    for (double f : {0.0, 1.0}) {
        for (double g : {0.5, 1.0}) {
            const RiccatiProblem p{[f](double) { return f; }, [g](double) { return g; }, [](double) { return -1.0; }, 0.0, 0.0};
            const auto sol = integrateRiccati(p, 5.0);
            ++regular;
            cauchy = std::max(cauchy, cauchyIdentityResidual(p, sol));
        }
    }
    o.detail << regular << " regular solutions, max identity residual " << cauchy << ", max representation residual "
             << representation << ", max bound excess " << excess;
    o.require(cauchy < 1e-6, "identity residual < 1e-6");
    o.require(representation < 1e-6, "representation residual < 1e-6");
    o.require(boundFailures == 0, "bound holds on every solution");
    return o;
}

Outcome criterion6() {
    Outcome o;
    Rng rng(6);
    double worst = -1e300;
    for (int k = 0; k < 200; ++k) {
        const auto n = static_cast<std::size_t>(1 + k % 4);
        const auto J = testing::randomImaginaryUnit(rng);
        const auto U = testing::randomUnitary(rng, n, J);
        std::vector<Quaternion> m;
        for (std::size_t i = 0; i < n; ++i) m.push_back(Quaternion(uniform(rng, -3, 3)) + J * uniform(rng, -5, 5));
        const auto b = expNormBound(U, m);
        worst = std::max(worst, b.norm - b.bound);
        o.require(b.norm <= b.bound + 1e-9, "matrix " + std::to_string(k));
    }
    o.detail << "200 matrices, max (norm - bound) " << worst;
    return o;
}

Outcome criterion7() {
    Outcome o;
    Rng rng(7);
    double worst = -1e300;
    int structural = 0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t m = 1 + static_cast<std::size_t>(k % 2), n = 1 + static_cast<std::size_t>((k / 2) % 2);
        const auto sys = randomStructuredSystem(rng, m, n);
        const auto grid = ode::linspace(sys.t0, sys.t0 + 50.0, kStructuralSamples);
        if (!checkConditionA(sys, grid).passed || !checkConditionB(sys, grid).passed) {
            ++structural;
            continue;
        }
        std::vector<Quaternion> phi0, psi0;
        for (std::size_t i = 0; i < m; ++i) phi0.push_back(testing::randomQuaternion(rng));
        for (std::size_t i = 0; i < n; ++i) psi0.push_back(testing::randomQuaternion(rng));
        const auto d = dominationCheck(sys, deriveEnvelopes(sys), phi0, psi0, sys.t0 + 50.0, 1e-6);
        worst = std::max(worst, d.maxViolation);
        o.require(d.holds, "system " + std::to_string(k));
    }
    o.detail << "50 systems up to m=n=2, max relative violation " << worst << ", structural rejects " << structural;
    o.require(structural == 0, "every generated system satisfies a) and b)");
    return o;
}

Outcome criterion8() {
    Outcome o;
    const auto tf = [](const char* s) { return TimeFunction::parse(s, 1.0); };
    const auto r = corollary31(tf("1"), tf("1"), tf("1/t^2"), 200.0);
    const auto damped = corollary31(TimeFunction::parse("1", 0.0), TimeFunction::parse("3", 0.0),
                                    TimeFunction::parse("2", 0.0), 100.0);
    o.detail << "I2 sup " << r.cond2.supValue << ", verdict " << toString(r.verdict) << "; damped verdict "
             << toString(damped.verdict);
    o.require(std::abs(r.cond2.supValue - 1.0) <= 0.01, "I2 sup within 1% of 1");
    o.require(r.verdict == Verdict::LyapunovStable, "LyapunovStable");
    o.require(damped.verdict == Verdict::Inconclusive, "damped case Inconclusive");
    return o;
}

Outcome criterion9() {
    using boost::math::quadrature::gauss_kronrod;
    Outcome o;
    Rng rng(9);
    const double T = 10.0;
    auto integral = [](const std::function<double(double)>& f, double a, double b) {
        if (b <= a) return 0.0;
        return gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-11);
    };
    double worst1 = 0.0, worst2 = 0.0;
    for (int k = 0; k < 20; ++k) {
        const auto s = randomScalarSystem(rng);
        const double t0 = s.t0;
        const std::function<double(double)> E = [&s](double t) { return s.E(t); };
        const std::function<double(double)> dStar = [&s](double t) { return s.dStar(t); };
        const auto cumE = [&](double x) { return integral(E, t0, x); };
        const auto cumD = [&](double x) { return integral(dStar, t0, x); };
        const double dT = cumD(T);
        const double i1 = integral([&](double tau) { return std::exp(dT - cumD(tau)) * s.normC(tau); }, t0, T);
        const auto K = [&](double tau) {
            const double eTau = cumE(tau);
            return integral([&](double xi) { return std::exp(cumE(xi) - eTau) * s.normC(xi); }, t0, tau);
        };
        const double j = integral([&](double tau) { return s.aStar(tau) + s.normB(tau) * K(tau); }, t0, T);
        const double c1 = evalCondition1(s, T).finalValue();
        const double c2 = evalCondition2(s, T).finalValue();
        const double e1 = std::abs(c1 - i1) / std::abs(i1), e2 = std::abs(c2 - j) / std::abs(j);
        worst1 = std::max(worst1, e1);
        worst2 = std::max(worst2, e2);
        o.require(e1 <= 1e-6, "condition 1, system " + std::to_string(k));
        o.require(e2 <= 1e-6, "condition 2, system " + std::to_string(k));
    }
    o.detail << "20 systems, max relative deviation cond1 " << worst1 << ", cond2 " << worst2;
    return o;
}

Outcome criterion10() {
    Outcome o;
    // phi' = -phi, psi' = -2 psi
    const ode::Rhs rhs = [](double, std::span<const double> y, std::span<double> d) {
        d[0] = -y[0];
        d[1] = -2.0 * y[1];
    };
    const std::vector<double> outputs{2.5, 5.0, 7.5, 10.0};
    auto error = [&](double tol) {
        ode::Options opts;
        opts.rtol = tol;
        opts.atol = tol * 1e-3;
        const auto res = ode::integrate(rhs, 0.0, {1.0, 1.0}, 10.0, outputs, opts);
        double e = 0.0;
        for (std::size_t i = 0; i < res.times.size(); ++i) {
            const double t = res.times[i];
            e = std::max({e, std::abs(res.states[i][0] - std::exp(-t)), std::abs(res.states[i][1] - std::exp(-2.0 * t))});
        }
        return e;
    };
    double minRatio = 1e300;
    for (double tol : {1e-4, 1e-6, 1e-8}) {
        const double coarse = error(tol), fine = error(tol / 2.0);
        const double ratio = coarse / fine;
        minRatio = std::min(minRatio, ratio);
        o.detail << "tol " << tol << ": " << coarse << " -> " << fine << " (x" << ratio << "); ";
    }
    o.require(minRatio >= 4.0, "error reduction >= 4x when halving tol");
    return o;
}

const std::vector<std::pair<const char*, Outcome (*)()>> kCriteria{
    {"two-block example certified asymptotically stable", criterion1},
    {"two-block example rival methods", criterion2},
    {"single-coupling example verdicts and rivals", criterion3},
    {"Riccati solution positivity", criterion4},
    {"Cauchy identity and exponential bound residuals", criterion5},
    {"exponential norm bound", criterion6},
    {"domination by the scalar majorant", criterion7},
    {"second-order reduction", criterion8},
    {"augmented states against nested quadrature", criterion9},
    {"integration order", criterion10},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> which;
    for (int i = 1; i < argc; ++i) which.push_back(static_cast<std::size_t>(std::atoi(argv[i])));
    if (which.empty())
        for (std::size_t i = 1; i <= kCriteria.size(); ++i) which.push_back(i);
    bool all = true;
    for (std::size_t n : which) {
        if (n < 1 || n > kCriteria.size()) {
            std::cerr << "unknown criterion " << n << "\n";
            return 2;
        }
        const auto& [name, fn] = kCriteria[n - 1];
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::cout << "criterion " << n << " (" << name << "): " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail.str()
                  << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
