#include "qstab/report.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace qstab {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

void curveRow(std::ostream& out, const std::string& label, const Json& c) {
    out << label << ": " << c.at("trend").get<std::string>() << ", sup " << num(c.at("sup").get<double>())
        << ", final " << num(c.at("final").get<double>());
    if (c.at("truncated").get<bool>()) out << " (truncated)";
    out << "\n";
}

void conditionRow(std::ostream& out, const std::string& label, const Json& c) {
    out << label << ": " << (c.at("passed").get<bool>() ? "passed" : "failed");
    if (c.contains("witness") && !c.at("witness").is_null()) out << " (" << c.at("witness").get<std::string>() << ")";
    out << "\n";
}

}  // namespace

Json ReportBuilder::curve(const std::string& id, const ConditionCurve& c) {
    series(id, c.grid, c.values);
    Json j;
    j["name"] = c.name;
    j["sup"] = c.supValue;
    j["final"] = c.finalValue();
    j["trend"] = toString(c.trend);
    j["truncated"] = c.truncated;
    j["series"] = id;
    return j;
}

void ReportBuilder::series(const std::string& id, const std::vector<double>& t, const std::vector<double>& v) {
    if (t.size() != v.size()) throw std::invalid_argument("series '" + id + "': size mismatch");
    if (series_.contains(id)) throw std::invalid_argument("series '" + id + "' already recorded");
    series_[id] = Json{{"t", t}, {"value", v}};
}

Json ReportBuilder::condition(const ConditionResult& r) const {
    Json j;
    j["condition"] = r.condition;
    j["passed"] = r.passed;
    j["maxViolation"] = r.maxViolation;
    j["witness"] = r.witness ? Json(*r.witness) : Json(nullptr);
    j["notes"] = r.notes;
    return j;
}

Json ReportBuilder::criterion(const CriterionReport& r) {
    Json j;
    j["verdict"] = toString(r.verdict);
    j["structural"]["ok"] = r.structuralOk;
    j["structural"]["condA"] = condition(r.condA);
    j["structural"]["condB"] = condition(r.condB);
    if (r.envelopeCheck) {
        j["structural"]["envelopes"] = Json{{"holds", r.envelopeCheck->holds}, {"maxExcess", r.envelopeCheck->maxExcess}};
    }
    j["cond1"] = curve("cond1", r.cond1);
    j["kernel"] = curve("kernel", r.kernel);
    j["cond2"] = curve("cond2", r.cond2);
    j["cond2prime"]["satisfied"] = r.cond2prime.satisfied;
    j["cond2prime"]["intE"] = curve("cond2prime.intE", r.cond2prime.eIntegral);
    j["cond2prime"]["J"] = curve("cond2prime.J", r.cond2prime.j);
    j["notes"] = r.notes;
    return j;
}

Json ReportBuilder::rival(const RivalReport& r) {
    const std::string id = "rivals." + toString(r.method);
    Json j;
    j["method"] = toString(r.method);
    j["applicable"] = r.applicable;
    j["verdict"] = toString(r.verdict);
    j["summary"] = r.summary;
    j["curve"] = curve(id, r.curve);
    if (r.method != RivalMethod::Freezing) j["pointwise"] = curve(id + ".pointwise", r.pointwise);
    j["notes"] = r.notes;
    return j;
}

void ReportBuilder::finish(Json& report) {
    report["series"] = std::move(series_);
    series_ = Json::object();
}

EmitFormat emitFormatFromString(const std::string& s) {
    if (s == "json") return EmitFormat::Json;
    if (s == "csv") return EmitFormat::Csv;
    if (s == "table") return EmitFormat::Table;
    throw std::invalid_argument("unknown format '" + s + "' (json, csv, table)");
}

void emitJson(const Json& report, std::ostream& out) { out << report.dump(2) << "\n"; }

std::vector<std::string> emitCsv(const Json& report, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> written;
    for (const auto& [id, s] : report.at("series").items()) {
        const auto path = (fs::path(dir) / (id + ".csv")).string();
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << "t,value\n" << std::setprecision(17);
        const auto& t = s.at("t");
        const auto& v = s.at("value");
        for (std::size_t i = 0; i < t.size(); ++i) out << t[i].get<double>() << "," << v[i].get<double>() << "\n";
        if (!out) throw std::runtime_error("write failed for '" + path + "'");
        written.push_back(path);
    }
    return written;
}

void emitTable(const Json& report, std::ostream& out) {
    const std::string kind = report.value("kind", "analyze");
    if (report.contains("system")) out << "system: " << report.at("system").value("name", "custom") << "\n";
    out << "verdict: " << report.at("verdict").get<std::string>() << "\n";
    if (kind == "second-order") {
        curveRow(out, "I1", report.at("cond1"));
        curveRow(out, "I2", report.at("cond2"));
        const auto& ex = report.at("asymptoticExcluded");
        out << "asymptotic stability: "
            << (ex.is_null() ? "not decided (needs p > 0, r <= 0, q real)" : (ex.get<bool>() ? "excluded" : "not excluded"))
            << "\n";
        return;
    }
    const auto& st = report.at("structural");
    conditionRow(out, "condition a", st.at("condA"));
    conditionRow(out, "condition b", st.at("condB"));
    if (st.contains("envelopes"))
        out << "envelopes: " << (st.at("envelopes").at("holds").get<bool>() ? "dominate" : "do not dominate") << "\n";
    curveRow(out, "cond1", report.at("cond1"));
    curveRow(out, "cond2", report.at("cond2"));
    out << "cond2': " << (report.at("cond2prime").at("satisfied").get<bool>() ? "satisfied" : "not satisfied") << "\n";
    for (const auto& r : report.at("rivals")) {
        out << r.at("method").get<std::string>() << ": " << r.at("summary").get<std::string>() << " ["
            << r.at("verdict").get<std::string>() << "]\n";
    }
    if (report.contains("empirical") && !report.at("empirical").is_null()) {
        const auto& e = report.at("empirical");
        out << "empirical: " << e.at("classification").get<std::string>() << " (peak "
            << num(e.at("peakNorm").get<double>()) << ", end ratio " << num(e.at("endRatio").get<double>()) << ")\n";
        if (e.contains("domination")) {
            const auto& d = e.at("domination");
            out << "domination: " << (d.at("holds").get<bool>() ? "holds" : "violated") << " (max violation "
                << num(d.at("maxViolation").get<double>()) << ")\n";
        }
    }
}

Json loadReport(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("report '" + path + "': " + e.what());
    }
}

}  // namespace qstab
