#include "qstab/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace qstab {

namespace {

using boost::property_tree::ptree;

std::string unquote(std::string s) {
    boost::algorithm::trim(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
    return s;
}

ptree readIni(std::istream& in) {
    ptree pt;
    try {
        boost::property_tree::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    return pt;
}

void requireKnown(const ptree& section, const std::string& name, const std::set<std::string>& keys) {
    for (const auto& [k, v] : section) {
        if (!keys.count(k)) throw ConfigError("config: unknown key '" + k + "' in [" + name + "]");
    }
}

void requireSections(const ptree& pt, const std::set<std::string>& sections) {
    for (const auto& [k, v] : pt) {
        if (!sections.count(k)) throw ConfigError("config: unknown section [" + k + "]");
    }
}

std::optional<std::string> text(const ptree& section, const std::string& key) {
    if (auto v = section.get_optional<std::string>(key)) return unquote(*v);
    return std::nullopt;
}

double number(const std::string& key, const std::string& value) {
    try {
        return constantParameter(value);
    } catch (const std::exception& e) {
        throw ConfigError("config: '" + key + "': " + e.what());
    }
}

bool flag(const std::string& key, std::string value) {
    boost::algorithm::to_lower(value);
    if (value == "true" || value == "yes" || value == "on" || value == "1") return true;
    if (value == "false" || value == "no" || value == "off" || value == "0") return false;
    throw ConfigError("config: '" + key + "' must be a boolean");
}

std::size_t dimension(const std::string& key, const std::string& value) {
    const double d = number(key, value);
    if (d < 1 || d != static_cast<double>(static_cast<std::size_t>(d)))
        throw ConfigError("config: '" + key + "' must be a positive integer");
    return static_cast<std::size_t>(d);
}

OutputOptions parseOutput(const ptree& pt) {
    OutputOptions out;
    if (auto s = pt.get_child_optional("output")) {
        requireKnown(*s, "output", {"json", "csv", "table"});
        out.json = text(*s, "json");
        out.csvDir = text(*s, "csv");
        if (auto t = text(*s, "table")) out.table = flag("table", *t);
    }
    return out;
}

std::optional<double> parseHorizon(const ptree& run) {
    if (auto h = text(run, "horizon")) return number("horizon", *h);
    return std::nullopt;
}

std::ifstream openConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return in;
}

}  // namespace

std::vector<RivalMethod> allRivalMethods() {
    return {RivalMethod::LozinskiiI, RivalMethod::LozinskiiII, RivalMethod::LozinskiiIII, RivalMethod::Freezing,
            RivalMethod::LyapunovBogdanov};
}

std::vector<std::string> splitMatrix(const std::string& source, std::size_t rows, std::size_t cols) {
    std::vector<std::string> rowParts;
    boost::algorithm::split(rowParts, source, boost::is_any_of(";"));
    if (rowParts.size() != rows)
        throw ConfigError("matrix '" + source + "': expected " + std::to_string(rows) + " rows");
    std::vector<std::string> out;
    for (const auto& row : rowParts) {
        std::vector<std::string> cells;
        boost::algorithm::split(cells, row, boost::is_any_of(","));
        if (cells.size() != cols)
            throw ConfigError("matrix '" + source + "': expected " + std::to_string(cols) + " columns per row");
        for (auto& c : cells) {
            boost::algorithm::trim(c);
            if (c.empty()) throw ConfigError("matrix '" + source + "': empty entry");
            out.push_back(c);
        }
    }
    return out;
}

AnalysisConfig parseAnalysisConfig(std::istream& in) {
    const ptree pt = readIni(in);
    requireSections(pt, {"system", "params", "envelopes", "run", "output"});
    AnalysisConfig cfg;

    const auto sys = pt.get_child_optional("system");
    if (!sys) throw ConfigError("config: missing [system] section");
    requireKnown(*sys, "system", {"builtin", "m", "n", "t0", "A", "B", "C", "D"});
    cfg.builtin = text(*sys, "builtin");
    if (cfg.builtin) {
        for (const char* k : {"m", "n", "t0", "A", "B", "C", "D"}) {
            if (sys->count(k)) throw ConfigError(std::string("config: '") + k + "' conflicts with builtin");
        }
    } else {
        const auto m = text(*sys, "m"), n = text(*sys, "n");
        if (!m || !n) throw ConfigError("config: [system] needs m and n (or builtin)");
        cfg.m = dimension("m", *m);
        cfg.n = dimension("n", *n);
        cfg.t0 = text(*sys, "t0").value_or("0");
        auto block = [&](const char* key, std::size_t r, std::size_t c) -> std::string {
            auto v = text(*sys, key);
            if (!v) throw ConfigError(std::string("config: missing block ") + key);
            splitMatrix(*v, r, c);
            return *v;
        };
        cfg.A = block("A", cfg.m, cfg.m);
        cfg.B = block("B", cfg.m, cfg.n);
        cfg.C = block("C", cfg.n, cfg.m);
        cfg.D = block("D", cfg.n, cfg.n);
    }
    if (auto p = pt.get_child_optional("params")) {
        if (!cfg.builtin && !p->empty()) throw ConfigError("config: [params] requires a builtin system");
        for (const auto& [k, v] : *p) cfg.params[k] = unquote(v.data());
    }
    if (auto e = pt.get_child_optional("envelopes")) {
        requireKnown(*e, "envelopes", {"aStar", "dStar"});
        cfg.aStar = text(*e, "aStar");
        cfg.dStar = text(*e, "dStar");
        if (cfg.aStar.has_value() != cfg.dStar.has_value())
            throw ConfigError("config: envelopes need both aStar and dStar");
    }
    cfg.rivals = allRivalMethods();
    if (auto r = pt.get_child_optional("run")) {
        requireKnown(*r, "run", {"horizon", "tolerance", "rivals", "empirical", "domination"});
        cfg.horizon = parseHorizon(*r);
        if (auto t = text(*r, "tolerance")) {
            cfg.tolerance = number("tolerance", *t);
            if (!(cfg.tolerance > 0.0)) throw ConfigError("config: tolerance must be positive");
        }
        if (auto list = text(*r, "rivals")) {
            cfg.rivals.clear();
            if (*list != "none") {
                if (*list == "all") {
                    cfg.rivals = allRivalMethods();
                } else {
                    std::vector<std::string> names;
                    boost::algorithm::split(names, *list, boost::is_any_of(","));
                    for (auto& nm : names) {
                        boost::algorithm::trim(nm);
                        try {
                            cfg.rivals.push_back(rivalMethodFromString(nm));
                        } catch (const std::invalid_argument& e) {
                            throw ConfigError(std::string("config: ") + e.what());
                        }
                    }
                }
            }
        }
        if (auto v = text(*r, "empirical")) cfg.empirical = flag("empirical", *v);
        if (auto v = text(*r, "domination")) cfg.domination = flag("domination", *v);
    }
    cfg.output = parseOutput(pt);
    return cfg;
}

AnalysisConfig loadAnalysisConfig(const std::string& path) {
    auto in = openConfig(path);
    return parseAnalysisConfig(in);
}

SecondOrderConfig parseSecondOrderConfig(std::istream& in) {
    const ptree pt = readIni(in);
    requireSections(pt, {"equation", "run", "output"});
    SecondOrderConfig cfg;
    const auto eq = pt.get_child_optional("equation");
    if (!eq) throw ConfigError("config: missing [equation] section");
    requireKnown(*eq, "equation", {"p", "q", "r", "t0"});
    auto need = [&](const char* key) {
        auto v = text(*eq, key);
        if (!v) throw ConfigError(std::string("config: missing coefficient ") + key);
        return *v;
    };
    cfg.p = need("p");
    cfg.q = need("q");
    cfg.r = need("r");
    cfg.t0 = text(*eq, "t0").value_or("0");
    if (auto r = pt.get_child_optional("run")) {
        requireKnown(*r, "run", {"horizon"});
        cfg.horizon = parseHorizon(*r);
    }
    cfg.output = parseOutput(pt);
    return cfg;
}

SecondOrderConfig loadSecondOrderConfig(const std::string& path) {
    auto in = openConfig(path);
    return parseSecondOrderConfig(in);
}

ResolvedSystem resolveSystem(const AnalysisConfig& cfg) {
    ResolvedSystem out;
    if (cfg.builtin) {
        auto ex = makeBuiltin(*cfg.builtin, cfg.params);
        out.name = ex.name;
        out.system = std::move(ex.system);
        out.envelopes = std::move(ex.envelopes);
        out.horizon = ex.defaultHorizon;
        out.parameters = std::move(ex.parameters);
        out.notes = std::move(ex.notes);
    } else {
        const double t0 = number("t0", cfg.t0);
        out.name = "custom";
        out.system.m = cfg.m;
        out.system.n = cfg.n;
        out.system.t0 = t0;
        out.system.A = FunctionMatrix::parse(cfg.m, cfg.m, splitMatrix(cfg.A, cfg.m, cfg.m), t0);
        out.system.B = FunctionMatrix::parse(cfg.m, cfg.n, splitMatrix(cfg.B, cfg.m, cfg.n), t0);
        out.system.C = FunctionMatrix::parse(cfg.n, cfg.m, splitMatrix(cfg.C, cfg.n, cfg.m), t0);
        out.system.D = FunctionMatrix::parse(cfg.n, cfg.n, splitMatrix(cfg.D, cfg.n, cfg.n), t0);
        out.system.validate();
        out.horizon = t0 + 100.0;
    }
    if (cfg.aStar) {
        const double t0 = out.system.t0;
        out.envelopes = userEnvelopes(TimeFunction::parse(*cfg.aStar, t0), TimeFunction::parse(*cfg.dStar, t0));
    }
    if (cfg.horizon) out.horizon = *cfg.horizon;
    if (!(out.horizon > out.system.t0)) throw ConfigError("config: horizon must exceed t0");
    return out;
}

}  // namespace qstab
