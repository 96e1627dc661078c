#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "support/random.hpp"
#include "qstab/builtins.hpp"
#include "qstab/riccati.hpp"

using namespace qstab;

namespace {

RealFn constant(double c) {
    return [c](double) { return c; };
}

RiccatiProblem problem(double f, double g, double h, double y1, double t1 = 0.0) {
    return {constant(f), constant(g), constant(h), t1, y1};
}

// y' = -2y^2 - 0.5y + 0.2, the main equation of the two-block example with its default parameters.
RiccatiProblem exampleEquation(double y1 = 0.0) { return problem(2.0, 0.5, -0.2, y1); }

const double kEquilibrium = (-0.5 + std::sqrt(0.25 + 1.6)) / 4.0;

ScalarComparisonSystem scalarSystem(RealFn a, RealFn d, RealFn b, RealFn c, double t0 = 0.0) {
    return {std::move(a), std::move(d), std::move(b), std::move(c), t0};
}

}  // namespace

TEST_SUITE("riccati") {

TEST_CASE("pure quadrature") {
    const auto sol = integrateRiccati(problem(0, 0, -1, 0), 5.0);
    REQUIRE(sol.regular());
    for (std::size_t i = 0; i < sol.grid.size(); ++i) CHECK(sol.values[i] == doctest::Approx(sol.grid[i]).epsilon(1e-9));
}

TEST_CASE("monotone approach to the positive equilibrium") {
    CHECK(kEquilibrium == doctest::Approx(0.21504).epsilon(1e-4));
    const auto sol = integrateRiccati(exampleEquation(), 30.0);
    REQUIRE(sol.regular());
    for (std::size_t i = 1; i < sol.values.size(); ++i) CHECK(sol.values[i] >= sol.values[i - 1] - 1e-12);
    CHECK(sol.values.back() == doctest::Approx(kEquilibrium).epsilon(1e-8));
    CHECK(sol.values.back() <= kEquilibrium + 1e-10);
}

TEST_CASE("finite-time escape") {
    const auto sol = integrateRiccati(problem(-1, 0, 0, 1), 3.0);
    CHECK(sol.escaped);
    REQUIRE(sol.escapeTime);
    CHECK(*sol.escapeTime == doctest::Approx(1.0).epsilon(0.01));
    CHECK(*sol.escapeTime < 3.0);
    CHECK(sol.classification == Regularity::NotRegular);
    CHECK_FALSE(sol.regular());
}

TEST_CASE("horizon precondition") { CHECK_THROWS_AS(integrateRiccati(problem(0, 0, 0, 0), 0.0), std::invalid_argument); }

TEST_CASE("normal, extremal and not regular") {
    // y' = 1 - y^2
    CHECK(classifySolution(problem(1, 0, -1, 1.0), 20.0) == Regularity::Normal);
    // y' = -y^2 from 0: probes y0 < 0 blow down at t = -1/y0
    CHECK(classifySolution(problem(1, 0, 0, 0.0), 1500.0) == Regularity::Extremal);
    CHECK(classifySolution(problem(1, 0, 0, 0.0), 100.0) == Regularity::Normal);
    const auto below = problem(1, 0, -1, -2.0);
    CHECK(classifySolution(below, 5.0) == Regularity::NotRegular);
    const auto sol = integrateRiccati(below, 5.0);
    REQUIRE(sol.escapeTime);
    CHECK(*sol.escapeTime < 2.0);
    // closed form: y = -coth(t + atanh(1/2)) escapes at t = atanh(1/2)
    CHECK(*sol.escapeTime == doctest::Approx(std::atanh(0.5)).epsilon(1e-3));
}

TEST_CASE("Cauchy identity residual") {
    const auto trivial = problem(0, 0, 0, 3.0);
    CHECK(cauchyIdentityResidual(trivial, integrateRiccati(trivial, 5.0)) <= 1e-14);
    CHECK(cauchyIdentityResidual(exampleEquation(), integrateRiccati(exampleEquation(), 30.0)) < 1e-6);
    const auto p = problem(1, 1, -1, 0);
    CHECK(cauchyIdentityResidual(p, integrateRiccati(p, 5.0)) < 1e-6);
    const auto escaping = problem(-1, 0, 0, 1);
    CHECK_THROWS(cauchyIdentityResidual(escaping, integrateRiccati(escaping, 3.0)));
}

TEST_CASE("upper bound on the weighted integral") {
    const auto zero = problem(1, 1, 0, 0);
    auto r = lemma21Check(zero, integrateRiccati(zero, 5.0));
    CHECK(r.lhs == doctest::Approx(0.0));
    CHECK(r.rhs == doctest::Approx(0.0));
    CHECK(r.holds);

    r = lemma21Check(exampleEquation(), integrateRiccati(exampleEquation(), 10.0));
    CHECK(r.holds);
    CHECK(r.lhs > 0.0);

    const auto p = problem(1, 1, -1, 1);
    r = lemma21Check(p, integrateRiccati(p, 5.0));
    CHECK(r.holds);

    const auto negative = problem(-1, 0, 0, 0);
    CHECK_THROWS_AS(lemma21Check(negative, integrateRiccati(negative, 1.0)), std::invalid_argument);
}

TEST_CASE("weighted kernel integral vanishes") {
    const auto one = constant(1.0);
    auto r = lemma22Check(one, one, constant(0.0), 0.0, 30.0);
    CHECK(r.value == doctest::Approx(0.0));

    r = lemma22Check(one, one, [](double t) { return std::exp(-t); }, 0.0, 30.0);
    CHECK(r.value == doctest::Approx(30.0 * std::exp(-30.0)).epsilon(1e-4));
    CHECK(r.value == doctest::Approx(2.8e-12).epsilon(0.02));
    CHECK(r.hypothesisHolds());

    r = lemma22Check(one, one, [](double t) { return 1.0 / (1.0 + t); }, 0.0, 100.0);
    CHECK(r.value < 0.05);
    CHECK(r.curve.trend != Trend::DivergesUp);
    CHECK(r.curve.values.back() < r.curve.values[r.curve.values.size() / 2]);
    CHECK(r.hypothesisHolds());

    // int g bounded: the hypothesis fails
    r = lemma22Check([](double t) { return std::exp(-t); }, one, constant(0.0), 0.0, 50.0);
    CHECK_FALSE(r.hypothesisHolds());
}

TEST_CASE("comparison bound for rescaled equations") {
    SUBCASE("self comparison") {
        const auto p = problem(1, 0, -1, 0);
        const RealFn tanhFn = [](double t) { return std::tanh(t); };
        const auto r = theorem21Check(p, p, tanhFn, tanhFn, 0.0, 10.0);
        CHECK(r.preconditionsHold);
        CHECK(r.hypothesisHolds);
        CHECK(r.orderingHolds);
        CHECK(std::abs(r.minHypothesis) <= 1e-8);
        CHECK(std::abs(r.minGap) <= 1e-8);
    }
    SUBCASE("positivity through the homogeneous pairing") {
        const auto eq1 = exampleEquation();
        const auto eq2 = problem(2.0, 0.5, 0.0, 0.0);
        const auto r = theorem21Check(eq1, eq2, constant(kEquilibrium), constant(0.0), 0.0, 20.0);
        CHECK(r.preconditionsHold);
        CHECK(r.hypothesisHolds);
        CHECK(r.orderingHolds);
        CHECK(r.minGap >= -1e-10);
    }
    SUBCASE("forced equation dominates the unforced one") {
        const auto r = theorem21Check(problem(1, 0, -1, 0), problem(1, 0, 0, 0), constant(1.0), constant(0.0), 0.0, 10.0);
        CHECK(r.preconditionsHold);
        CHECK(r.hypothesisHolds);
        CHECK(r.orderingHolds);
    }
    SUBCASE("violations are itemized") {
        const auto r = theorem21Check(problem(-1, 0, 0, 0), problem(1, 0, 0, 0), constant(-1.0), constant(0.0), 2.0, 1.0);
        CHECK_FALSE(r.preconditionsHold);
        CHECK(r.violations.size() >= 3);
    }
}

TEST_CASE("solution pair without coupling") {
    const auto s = scalarSystem(constant(-1.0), constant(-2.0), constant(1.0), constant(0.0));
    const auto pair = constructSolutionPair(s, 10.0);
    REQUIRE(pair.applicable);
    for (std::size_t i = 0; i < pair.grid.size(); ++i) {
        CHECK(pair.psi[i] == 0.0);
        CHECK(pair.y0.values[i] == 0.0);
        CHECK(pair.phi[i] == doctest::Approx(std::exp(-pair.grid[i])).epsilon(1e-8));
    }
    CHECK(pair.boundHolds);
}

TEST_CASE("solution pair of the two-block example") {
    const auto ex = makeBuiltin("example-3.15", {{"C", "0"}});
    const auto s = buildScalarSystem(ex.system, ex.envelopes ? *ex.envelopes : deriveEnvelopes(ex.system));
    const auto pair = constructSolutionPair(s, 40.0);
    REQUIRE(pair.applicable);
    CHECK(pair.phi.back() < 1e-2 * pair.phi.front());
    CHECK(std::abs(pair.psi.back()) < 1e-2);
    CHECK(pair.y0.values.back() == doctest::Approx(kEquilibrium).epsilon(1e-6));
    CHECK(pair.boundHolds);
    CHECK(pair.representationResidual < 1e-6);
    CHECK(pair.minY0 >= -1e-10);
}

TEST_CASE("solution pair of the single-coupling example") {
    const auto ex = makeBuiltin("example-3.14", {});
    const auto s = buildScalarSystem(ex.system, ex.envelopes ? *ex.envelopes : deriveEnvelopes(ex.system));
    const auto pair = constructSolutionPair(s, 200.0);
    REQUIRE(pair.applicable);
    CHECK(pair.boundHolds);
    CHECK(pair.boundExcess <= 1e-6);
    for (double v : pair.phi) CHECK(v > 0.0);
}

TEST_CASE("positivity and identities on random scalar systems") {
    testing::Rng rng(41);
    for (int k = 0; k < 40; ++k) {
        const double a0 = testing::uniform(rng, -2, 1), d0 = testing::uniform(rng, -2, 1);
        const double b0 = testing::uniform(rng, 0, 2), c0 = testing::uniform(rng, 0, 2);
        const double w1 = testing::uniform(rng, 0.1, 3), w2 = testing::uniform(rng, 0.1, 3);
        const auto s = scalarSystem([=](double t) { return a0 + 0.5 * std::sin(w1 * t); }, constant(d0),
                                    [=](double t) { return b0 * (1.0 + 0.5 * std::cos(w2 * t)); },
                                    [=](double t) { return c0 * std::abs(std::sin(w1 * t + 0.3)); });
        const auto pair = constructSolutionPair(s, 20.0);
        REQUIRE(pair.applicable);
        CHECK(pair.minY0 >= -1e-10);
        CHECK(pair.boundHolds);
        const auto p = mainRiccati(s, 0.0, 0.0);
        CHECK(cauchyIdentityResidual(p, pair.y0) < 1e-6);
    }
}

TEST_CASE("gap between two normal solutions settles") {
    const auto p = exampleEquation();
    const auto gap = integratedGap(p, 0.0, 0.5, 80.0);
    CHECK(gap.trend == Trend::Bounded);
    double supAt20 = 0.0, supAt40 = 0.0, supAt80 = 0.0;
    for (std::size_t i = 0; i < gap.grid.size(); ++i) {
        const double v = std::abs(gap.values[i]);
        if (gap.grid[i] <= 20.0) supAt20 = std::max(supAt20, v);
        if (gap.grid[i] <= 40.0) supAt40 = std::max(supAt40, v);
        supAt80 = std::max(supAt80, v);
    }
    CHECK(supAt40 == doctest::Approx(supAt20).epsilon(1e-8));
    CHECK(supAt80 == doctest::Approx(supAt40).epsilon(1e-10));
}

}
