#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qstab/system.hpp"

namespace qstab {

using ParamMap = std::map<std::string, std::string>;

struct BuiltinExample {
    std::string name;
    BlockSystem system;
    std::optional<Envelopes> envelopes;
    double defaultHorizon = 100.0;
    ParamMap parameters;  ///< resolved parameters, defaults filled in
    std::vector<std::string> notes;
};

/// Names accepted by makeBuiltin.
std::vector<std::string> builtinNames();

/// Parameterized template systems:
///   example-3.15  phi' = (lambda1 - C sin t) phi + mu1 psi,  psi' = mu2 phi + lambda2 psi,  t >= 0
///   example-3.14  phi' = nu phi + mu / (t ln^2 t) psi,      psi' = mu phi + (nu - 1) psi,   t >= e
///   zero          the 1 + 1 system with all blocks zero
/// Throws std::invalid_argument for unknown names or parameters.
BuiltinExample makeBuiltin(const std::string& name, const ParamMap& params = {});

/// The damped-coupling margin lambda1 + mu1 mu2 / (lambda1 - lambda2) of the first template
/// together with the sign restrictions on its constants.
struct CouplingMargin {
    double margin = 0.0;
    bool restrictionsHold = false;  ///< lambda_k < 0, lambda1 > lambda2, mu_k > 0, C > 0
    [[nodiscard]] bool lyapunov() const { return restrictionsHold && margin <= 0.0; }
    [[nodiscard]] bool asymptotic() const { return restrictionsHold && margin < 0.0; }
};

CouplingMargin couplingMargin(double lambda1, double lambda2, double mu1, double mu2, double c);

/// Evaluates a constant real parameter written as an expression ("-3/2", "pi").
double constantParameter(const std::string& source);

}  // namespace qstab
