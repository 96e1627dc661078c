#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "qstab/builtins.hpp"
#include "qstab/rivals.hpp"
#include "qstab/system.hpp"

namespace qstab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OutputOptions {
    std::optional<std::string> json;    ///< report path
    std::optional<std::string> csvDir;  ///< one t,value file per series
    bool table = true;                  ///< summary table on stdout
};

/// INI document with sections [system], [params], [envelopes], [run], [output].
///
///   [system]   builtin = example-3.15            (or)  m, n, t0, A, B, C, D
///              block entries are row-major, ',' between columns and ';' between rows
///   [params]   builtin parameters, e.g. lambda1 = -1
///   [envelopes] aStar, dStar (optional expression strings)
///   [run]      horizon, tolerance, rivals (comma list or "all"/"none"), empirical, domination
///   [output]   json, csv, table
struct AnalysisConfig {
    std::optional<std::string> builtin;
    ParamMap params;
    std::size_t m = 0;
    std::size_t n = 0;
    std::string t0 = "0";
    std::string A, B, C, D;
    std::optional<std::string> aStar;
    std::optional<std::string> dStar;
    std::optional<double> horizon;
    double tolerance = 1e-9;
    std::vector<RivalMethod> rivals;
    bool empirical = true;
    bool domination = true;
    OutputOptions output;
};

/// [equation] p, q, r, t0;  [run] horizon;  [output] as above.
struct SecondOrderConfig {
    std::string p, q, r;
    std::string t0 = "0";
    std::optional<double> horizon;
    OutputOptions output;
};

AnalysisConfig parseAnalysisConfig(std::istream& in);
AnalysisConfig loadAnalysisConfig(const std::string& path);
SecondOrderConfig parseSecondOrderConfig(std::istream& in);
SecondOrderConfig loadSecondOrderConfig(const std::string& path);

/// Splits "a,b;c,d" into row-major entries and checks the shape.
std::vector<std::string> splitMatrix(const std::string& source, std::size_t rows, std::size_t cols);

std::vector<RivalMethod> allRivalMethods();

/// The system described by a config, with envelopes when given and the horizon resolved.
struct ResolvedSystem {
    std::string name;
    BlockSystem system;
    std::optional<Envelopes> envelopes;
    double horizon = 0.0;
    ParamMap parameters;
    std::vector<std::string> notes;
};

ResolvedSystem resolveSystem(const AnalysisConfig& cfg);

}  // namespace qstab
