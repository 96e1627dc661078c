#include "qstab/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qstab/ode.hpp"

namespace qstab {

FunctionMatrix::FunctionMatrix(std::size_t rows, std::size_t cols, std::vector<TimeFunction> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) throw std::invalid_argument("FunctionMatrix: entry count mismatch");
}

FunctionMatrix FunctionMatrix::parse(std::size_t rows, std::size_t cols, const std::vector<std::string>& sources,
                                     double domainStart) {
    if (sources.size() != rows * cols) {
        throw std::invalid_argument("FunctionMatrix: expected " + std::to_string(rows * cols) + " entries, got " +
                                    std::to_string(sources.size()));
    }
    std::vector<TimeFunction> entries;
    entries.reserve(sources.size());
    for (const auto& s : sources) entries.push_back(TimeFunction::parse(s, domainStart));
    return {rows, cols, std::move(entries)};
}

FunctionMatrix FunctionMatrix::zero(std::size_t rows, std::size_t cols, double domainStart) {
    return {rows, cols, std::vector<TimeFunction>(rows * cols, TimeFunction::constant(0.0, domainStart))};
}

QMatrix FunctionMatrix::at(double t) const {
    std::vector<Quaternion> v(entries_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = entries_[i].eval(t);
    return {rows_, cols_, std::move(v)};
}

bool FunctionMatrix::isConstant() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const TimeFunction& f) { return f.expression().isConstant(); });
}

void BlockSystem::validate() const {
    if (m == 0 || n == 0) throw std::invalid_argument("BlockSystem: block sizes must be positive");
    auto need = [](const FunctionMatrix& x, std::size_t r, std::size_t c, const char* name) {
        if (x.rows() != r || x.cols() != c) {
            throw std::invalid_argument(std::string("BlockSystem: block ") + name + " must be " + std::to_string(r) +
                                        "x" + std::to_string(c));
        }
    };
    need(A, m, m, "A");
    need(B, m, n, "B");
    need(C, n, m, "C");
    need(D, n, n, "D");
}

QMatrix BlockSystem::full(double t) const {
    const QMatrix a = A.at(t), b = B.at(t), c = C.at(t), d = D.at(t);
    QMatrix out(m + n, m + n);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t k = 0; k < m; ++k) out(r, k) = a(r, k);
        for (std::size_t k = 0; k < n; ++k) out(r, m + k) = b(r, k);
    }
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < m; ++k) out(m + r, k) = c(r, k);
        for (std::size_t k = 0; k < n; ++k) out(m + r, m + k) = d(r, k);
    }
    return out;
}

namespace {

void requireGrid(const std::vector<double>& grid, double t0) {
    if (grid.empty()) throw std::invalid_argument("grid is empty");
    if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("grid must be sorted");
    if (grid.front() < t0) throw std::invalid_argument("grid starts before t0");
}

void writeComponents(const QMatrix& q, std::span<double> out) {
    std::size_t i = 0;
    for (const auto& e : q.entries()) {
        out[i++] = e.w;
        out[i++] = e.x;
        out[i++] = e.y;
        out[i++] = e.z;
    }
}

QMatrix readComponents(std::size_t rows, std::size_t cols, std::span<const double> in) {
    std::vector<Quaternion> v(rows * cols);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = {in[4 * i], in[4 * i + 1], in[4 * i + 2], in[4 * i + 3]};
    return {rows, cols, std::move(v)};
}

double relativeCommutator(const QMatrix& a, const QMatrix& b) {
    const double scale = opNorm(a) * opNorm(b);
    if (scale == 0.0) return 0.0;
    return opNorm(a * b - b * a) / scale;
}

struct BlockCheck {
    double violation = 0.0;
    std::vector<std::pair<double, double>> failing;
};

BlockCheck commutationCheck(const FunctionMatrix& x, double t0, const std::vector<double>& grid, double tol,
                            CommutationMode mode) {
    const std::vector<QMatrix> integrals = cumulativeIntegrals(x, t0, grid);
    std::vector<QMatrix> values;
    values.reserve(grid.size());
    for (double t : grid) values.push_back(x.at(t));

    BlockCheck out;
    for (std::size_t it = 0; it < grid.size(); ++it) {
        for (std::size_t itau = 0; itau < grid.size(); ++itau) {
            if (mode == CommutationMode::SameTime && itau != it) continue;
            const double v = relativeCommutator(values[it], integrals[itau]);
            out.violation = std::max(out.violation, v);
            if (v > tol && out.failing.size() < 8) out.failing.emplace_back(grid[itau], grid[it]);
        }
    }
    return out;
}

}  // namespace

std::vector<QMatrix> cumulativeIntegrals(const FunctionMatrix& x, double t0, const std::vector<double>& grid,
                                         double rtol) {
    requireGrid(grid, t0);
    const std::size_t dim = 4 * x.rows() * x.cols();
    auto rhs = [&x](double t, std::span<const double>, std::span<double> dydt) { writeComponents(x.at(t), dydt); };
    ode::Options opts;
    opts.rtol = rtol;
    opts.atol = rtol * 1e-2;
    const auto res = ode::integrate(rhs, t0, ode::State(dim, 0.0), grid.back(), grid, opts);
    if (!res.completed()) {
        throw std::runtime_error("cumulativeIntegrals: quadrature did not converge (" + ode::toString(res.status) + ")");
    }
    std::vector<QMatrix> out;
    out.reserve(grid.size());
    for (const auto& s : ode::samplesAt(res, grid)) out.push_back(readComponents(x.rows(), x.cols(), s));
    return out;
}

ConditionResult checkConditionA(const BlockSystem& sys, const std::vector<double>& grid, double tol,
                                CommutationMode mode) {
    sys.validate();
    requireGrid(grid, sys.t0);
    ConditionResult res;
    res.condition = mode == CommutationMode::Pairwise ? "a" : "a'";
    const BlockCheck a = commutationCheck(sys.A, sys.t0, grid, tol, mode);
    const BlockCheck d = commutationCheck(sys.D, sys.t0, grid, tol, mode);
    res.maxViolation = std::max(a.violation, d.violation);
    res.passed = res.maxViolation <= tol;
    res.failingPairs = a.failing;
    res.failingPairs.insert(res.failingPairs.end(), d.failing.begin(), d.failing.end());
    if (a.violation > tol) res.notes.push_back("A(t) does not commute with its running integral");
    if (d.violation > tol) res.notes.push_back("D(t) does not commute with its running integral");
    return res;
}

namespace {

struct FamilyCheck {
    bool passed = true;
    double violation = 0.0;
    std::string witness;
    std::vector<std::string> notes;
};

FamilyCheck normalFamilyCheck(const FunctionMatrix& x, double t0, const std::vector<double>& grid, double tol,
                              const char* name) {
    FamilyCheck out;
    if (x.rows() == 1) {
        out.witness = "scalar";
        return out;
    }
    std::vector<QMatrix> values;
    values.reserve(grid.size());
    for (double t : grid) values.push_back(x.at(t));
    const std::vector<QMatrix> integrals = cumulativeIntegrals(x, t0, grid);

    auto normality = [](const QMatrix& m) {
        const double s = opNorm(m);
        if (s == 0.0) return 0.0;
        const QMatrix adj = m.adjoint();
        return opNorm(m * adj - adj * m) / (s * s);
    };
    double normalV = 0.0, commuteV = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        normalV = std::max({normalV, normality(values[i]), normality(integrals[i])});
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            commuteV = std::max(commuteV, relativeCommutator(values[i], values[j]));
        }
    }
    out.violation = std::max(normalV, commuteV);
    out.passed = out.violation <= tol;
    if (normalV > tol) out.notes.push_back(std::string(name) + ": family is not normal");
    if (commuteV > tol) out.notes.push_back(std::string(name) + ": family members do not commute");
    if (out.passed) {
        if (const auto J = commonImaginaryUnit(values, tol)) {
            out.witness = "Omega(J,V): commuting normal family over C_J, J = " + toString(*J);
        } else {
            out.witness = "commuting normal quaternionic family";
        }
    }
    return out;
}

}  // namespace

ConditionResult checkConditionB(const BlockSystem& sys, const std::vector<double>& grid, double tol) {
    sys.validate();
    requireGrid(grid, sys.t0);
    ConditionResult res;
    res.condition = "b";
    const FamilyCheck a = normalFamilyCheck(sys.A, sys.t0, grid, tol, "A");
    const FamilyCheck d = normalFamilyCheck(sys.D, sys.t0, grid, tol, "D");
    res.passed = a.passed && d.passed;
    res.maxViolation = std::max(a.violation, d.violation);
    res.notes = a.notes;
    res.notes.insert(res.notes.end(), d.notes.begin(), d.notes.end());
    if (res.passed) res.witness = "A: " + a.witness + "; D: " + d.witness;
    res.notes.push_back("the D-block diagonalization is checked on the integral of D");
    return res;
}

Envelopes deriveEnvelopes(const BlockSystem& sys) {
    sys.validate();
    Envelopes env;
    env.source = EnvelopeSource::Derived;
    env.aStar = [A = sys.A](double t) { return maxRealEigenvalue(A.at(t)); };
    env.dStar = [D = sys.D](double t) { return maxRealEigenvalue(D.at(t)); };
    env.aStarDescription = "max Re spec A(t)";
    env.dStarDescription = "max Re spec D(t)";
    return env;
}

Envelopes userEnvelopes(const TimeFunction& aStar, const TimeFunction& dStar) {
    Envelopes env;
    env.source = EnvelopeSource::UserSupplied;
    env.aStar = aStar.realPart();
    env.dStar = dStar.realPart();
    env.aStarDescription = aStar.render();
    env.dStarDescription = dStar.render();
    return env;
}

EnvelopeCheck verifyEnvelopes(const BlockSystem& sys, const Envelopes& env, const std::vector<double>& grid,
                              double tol) {
    sys.validate();
    requireGrid(grid, sys.t0);
    const std::size_t na = 4 * sys.m * sys.m;
    const std::size_t nd = 4 * sys.n * sys.n;
    auto rhs = [&](double t, std::span<const double>, std::span<double> dydt) {
        writeComponents(sys.A.at(t), dydt.subspan(0, na));
        writeComponents(sys.D.at(t), dydt.subspan(na, nd));
        dydt[na + nd] = env.aStar(t);
        dydt[na + nd + 1] = env.dStar(t);
    };
    ode::Options opts;
    opts.rtol = 1e-12;
    opts.atol = 1e-14;
    const auto res = ode::integrate(rhs, sys.t0, ode::State(na + nd + 2, 0.0), grid.back(), grid, opts);
    if (!res.completed()) throw std::runtime_error("verifyEnvelopes: quadrature did not converge");
    const auto samples = ode::samplesAt(res, grid);

    EnvelopeCheck out;
    out.maxExcess = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        for (std::size_t i = 0; i <= j; ++i) {
            std::vector<double> diff(samples[j].size());
            for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = samples[j][k] - samples[i][k];
            const std::span<const double> d(diff);
            const double ea = maxRealEigenvalue(readComponents(sys.m, sys.m, d.subspan(0, na))) - diff[na + nd];
            const double ed = maxRealEigenvalue(readComponents(sys.n, sys.n, d.subspan(na, nd))) - diff[na + nd + 1];
            out.maxExcess = std::max({out.maxExcess, ea, ed});
        }
    }
    out.holds = out.maxExcess <= tol;
    return out;
}

ScalarComparisonSystem buildScalarSystem(const BlockSystem& sys, const Envelopes& env) {
    sys.validate();
    ScalarComparisonSystem s;
    s.aStar = env.aStar;
    s.dStar = env.dStar;
    s.normB = [B = sys.B](double t) { return opNorm(B.at(t)); };
    s.normC = [C = sys.C](double t) { return opNorm(C.at(t)); };
    s.t0 = sys.t0;
    return s;
}

}  // namespace qstab
