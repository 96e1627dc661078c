#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qstab/criteria.hpp"
#include "qstab/curve.hpp"
#include "qstab/rivals.hpp"
#include "qstab/system.hpp"
#include "qstab/verifier.hpp"

namespace qstab {

using Json = nlohmann::ordered_json;

/// Accumulates curve summaries and their (t, value) series.
///
/// Every curve object carries a "series" id; the samples live under the report's
/// top-level "series" map so that each can be written as its own CSV file.
class ReportBuilder {
public:
    Json curve(const std::string& id, const ConditionCurve& c);
    void series(const std::string& id, const std::vector<double>& t, const std::vector<double>& v);

    Json condition(const ConditionResult& r) const;
    Json criterion(const CriterionReport& r);
    Json rival(const RivalReport& r);

    /// Moves the collected series into report["series"].
    void finish(Json& report);

private:
    Json series_ = Json::object();
};

enum class EmitFormat { Json, Csv, Table };

EmitFormat emitFormatFromString(const std::string& s);

void emitJson(const Json& report, std::ostream& out);

/// Writes <dir>/<series id>.csv (columns t,value) for every series; returns the paths written.
std::vector<std::string> emitCsv(const Json& report, const std::string& dir);

/// One line per verdict: the criterion, each rival method and the empirical check.
void emitTable(const Json& report, std::ostream& out);

Json loadReport(const std::string& path);

}  // namespace qstab
