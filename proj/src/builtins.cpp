#include "qstab/builtins.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qstab {

namespace {

ParamMap withDefaults(const std::string& name, const ParamMap& defaults, const ParamMap& given) {
    ParamMap out = defaults;
    for (const auto& [k, v] : given) {
        if (!defaults.count(k)) throw std::invalid_argument(name + ": unknown parameter '" + k + "'");
        out[k] = v;
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

BlockSystem scalarBlocks(double t0, const std::string& a, const std::string& b, const std::string& c,
                         const std::string& d) {
    BlockSystem sys;
    sys.m = sys.n = 1;
    sys.t0 = t0;
    sys.A = FunctionMatrix::parse(1, 1, {a}, t0);
    sys.B = FunctionMatrix::parse(1, 1, {b}, t0);
    sys.C = FunctionMatrix::parse(1, 1, {c}, t0);
    sys.D = FunctionMatrix::parse(1, 1, {d}, t0);
    sys.validate();
    return sys;
}

BuiltinExample forcedPair(const ParamMap& given) {
    BuiltinExample ex;
    ex.name = "example-3.15";
    ex.parameters = withDefaults(
        ex.name, {{"lambda1", "-1"}, {"lambda2", "-1.5"}, {"mu1", "2"}, {"mu2", "0.2"}, {"C", "1"}}, given);
    const double l1 = constantParameter(ex.parameters["lambda1"]);
    const double l2 = constantParameter(ex.parameters["lambda2"]);
    const double m1 = constantParameter(ex.parameters["mu1"]);
    const double m2 = constantParameter(ex.parameters["mu2"]);
    const double c = constantParameter(ex.parameters["C"]);
    ex.system = scalarBlocks(0.0, "(" + fmt(l1) + ") - (" + fmt(c) + ")*sin(t)", fmt(m1), fmt(m2), fmt(l2));
    ex.defaultHorizon = 100.0;

    const auto margin = couplingMargin(l1, l2, m1, m2, c);
    ex.notes.push_back("coupling margin lambda1 + mu1*mu2/(lambda1 - lambda2) = " + fmt(margin.margin));
    ex.notes.push_back(margin.restrictionsHold
                           ? (margin.asymptotic() ? "closed-form restrictions met with strict margin"
                                                  : (margin.lyapunov() ? "closed-form restrictions met (margin zero)"
                                                                       : "closed-form margin is positive"))
                           : "sign restrictions on lambda_k, mu_k, C are not met");
    if (c >= std::abs(l1 + l2)) ex.notes.push_back("C >= |lambda1 + lambda2|: frozen spectra reach the right half-plane");
    return ex;
}

BuiltinExample slowCoupling(const ParamMap& given) {
    BuiltinExample ex;
    ex.name = "example-3.14";
    ex.parameters = withDefaults(ex.name, {{"nu", "0"}, {"mu", "2"}}, given);
    const std::string nu = "(" + ex.parameters["nu"] + ")";
    const std::string mu = "(" + ex.parameters["mu"] + ")";
    ex.system = scalarBlocks(std::numbers::e, nu, mu + "/(t*ln(t)^2)", mu, nu + " - 1");
    for (const auto* fm : {&ex.system.A, &ex.system.C}) {
        if (!(*fm)(0, 0).eval(std::numbers::e).isReal(1e-12))
            throw std::invalid_argument("example-3.14: nu and mu must be real-valued");
    }
    ex.defaultHorizon = 1000.0;
    ex.notes.push_back("the asymptotic clause on int(eps - nu) is not used; condition 2' is evaluated directly");
    return ex;
}

BuiltinExample zeroSystem(const ParamMap& given) {
    BuiltinExample ex;
    ex.name = "zero";
    ex.parameters = withDefaults(ex.name, {}, given);
    ex.system = scalarBlocks(0.0, "0", "0", "0", "0");
    ex.defaultHorizon = 100.0;
    return ex;
}

}  // namespace

std::vector<std::string> builtinNames() { return {"example-3.14", "example-3.15", "zero"}; }

BuiltinExample makeBuiltin(const std::string& name, const ParamMap& params) {
    if (name == "example-3.15") return forcedPair(params);
    if (name == "example-3.14") return slowCoupling(params);
    if (name == "zero") return zeroSystem(params);
    throw std::invalid_argument("unknown builtin '" + name + "'");
}

CouplingMargin couplingMargin(double lambda1, double lambda2, double mu1, double mu2, double c) {
    CouplingMargin out;
    out.restrictionsHold = lambda1 < 0 && lambda2 < 0 && lambda1 > lambda2 && mu1 > 0 && mu2 > 0 && c > 0;
    out.margin = lambda1 > lambda2 ? lambda1 + mu1 * mu2 / (lambda1 - lambda2) : std::nan("");
    return out;
}

double constantParameter(const std::string& source) {
    const auto e = Expression::parse(source);
    if (!e.isConstant()) throw std::invalid_argument("parameter '" + source + "' must not depend on t");
    const Quaternion q = e.eval(0.0);
    if (!q.isReal(1e-15) || !std::isfinite(q.w)) throw std::invalid_argument("parameter '" + source + "' must be real");
    return q.w;
}

}  // namespace qstab
