#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "qstab/config.hpp"
#include "qstab/report.hpp"

namespace qstab {

/// Criterion, rival methods and empirical check for one system, as a report document.
Json analyzeSystem(const ResolvedSystem& sys, const AnalysisConfig& cfg);

Json runAnalyze(const AnalysisConfig& cfg);

Json runSecondOrder(const SecondOrderConfig& cfg);

/// A builtin with default run settings; `horizon` overrides the builtin's default.
Json runExample(const std::string& name, const ParamMap& params, std::optional<double> horizon = std::nullopt);

/// Writes the JSON / CSV outputs requested and the table to `console` when enabled.
void writeOutputs(const Json& report, const OutputOptions& out, std::ostream& console);

}  // namespace qstab
