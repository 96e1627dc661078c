#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "qstab/analysis.hpp"
#include "qstab/config.hpp"
#include "qstab/report.hpp"

using namespace qstab;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

std::string cliPath() {
    const char* p = std::getenv("QSTAB_CLI");
    return p ? p : "qstab";
}

std::string configDir() {
    const char* p = std::getenv("QSTAB_CONFIGS");
    return p ? p : "configs";
}

Run run(const std::string& args) {
    Run r;
    const std::string cmd = cliPath() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("qstab-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    [[nodiscard]] std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

AnalysisConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parseAnalysisConfig(in);
}

void collectSeriesRefs(const Json& j, std::vector<std::string>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (k == "series" && v.is_string()) out.push_back(v.get<std::string>());
            else if (k != "series") collectSeriesRefs(v, out);
        }
    } else if (j.is_array()) {
        for (const auto& v : j) collectSeriesRefs(v, out);
    }
}

const char* kCustom = R"(
[system]
m = 2
n = 1
A = -1, 0; 0, -1 - sin(t)
B = 0.1; qj
C = 0.5, 0
D = -2

[run]
horizon = 30
rivals = freezing, lozinskii-III
)";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("configuration parsing") {
    auto cfg = parse(kCustom);
    CHECK_FALSE(cfg.builtin);
    CHECK(cfg.m == 2);
    CHECK(cfg.n == 1);
    REQUIRE(cfg.horizon);
    CHECK(*cfg.horizon == 30.0);
    CHECK(cfg.rivals == std::vector<RivalMethod>{RivalMethod::Freezing, RivalMethod::LozinskiiIII});
    const auto rs = resolveSystem(cfg);
    CHECK(rs.system.A.at(0.0)(1, 1).w == doctest::Approx(-1.0));
    CHECK(rs.system.B.at(0.0)(1, 0).y == doctest::Approx(1.0));
    CHECK(rs.horizon == 30.0);

    cfg = parse("[system]\nbuiltin = example-3.15\n[params]\nC = 3\n[run]\nrivals = none\nempirical = off\n");
    REQUIRE(cfg.builtin);
    CHECK(cfg.params.at("C") == "3");
    CHECK(cfg.rivals.empty());
    CHECK_FALSE(cfg.empirical);
    CHECK(resolveSystem(cfg).horizon == 100.0);

    cfg = parse("[system]\nbuiltin = zero\n[envelopes]\naStar = 0\ndStar = -1\n[output]\njson = out.json\ntable = no\n");
    REQUIRE(resolveSystem(cfg).envelopes);
    CHECK(resolveSystem(cfg).envelopes->source == EnvelopeSource::UserSupplied);
    CHECK(cfg.output.json == std::optional<std::string>("out.json"));
    CHECK_FALSE(cfg.output.table);
}

TEST_CASE("configuration errors") {
    const char* bad[] = {
        "[system]\nbuiltin = zero\nfoo = 1\n",
        "[sys]\nbuiltin = zero\n",
        "[system]\nm = 1\n",
        "[system]\nm = 1\nn = 1\nA = 0\nB = 0\nC = 0\n",
        "[system]\nm = 2\nn = 1\nA = 0, 0\nB = 0; 0\nC = 0, 0\nD = 0\n",
        "[system]\nm = 1.5\nn = 1\nA = 0\nB = 0\nC = 0\nD = 0\n",
        "[system]\nbuiltin = zero\nm = 1\n",
        "[system]\nm = 1\nn = 1\nA = 0\nB = 0\nC = 0\nD = 0\n[params]\nC = 1\n",
        "[system]\nbuiltin = zero\n[envelopes]\naStar = 0\n",
        "[system]\nbuiltin = zero\n[run]\ntolerance = -1\n",
        "[system]\nbuiltin = zero\n[run]\nrivals = gershgorin\n",
        "[system]\nbuiltin = zero\n[run]\nempirical = maybe\n",
        "[system]\nbuiltin = zero\n[run]\nhorizon = -5\n",
    };
    for (const char* text : bad) {
        INFO(text);
        CHECK_THROWS(resolveSystem(parse(text)));
    }
    CHECK_THROWS_AS(parse("[system\nbuiltin = zero\n"), ConfigError);
    CHECK_THROWS_AS(resolveSystem(parse("[system]\nm = 1\nn = 1\nA = 1 +\nB = 0\nC = 0\nD = 0\n")), ParseError);

    std::istringstream so("[equation]\np = 1\nq = 0\n");
    CHECK_THROWS_AS(parseSecondOrderConfig(so), ConfigError);
}

TEST_CASE("report schema") {
    TempDir dir;
    const auto r = run("example example-3.15 --json " + (dir / "report.json"));
    REQUIRE(r.code == 0);
    const auto report = loadReport(dir / "report.json");
    CHECK(report.at("verdict").is_string());
    CHECK(report.at("cond1").at("sup").get<double>() == doctest::Approx(2.0 / 15.0).epsilon(1e-6));
    CHECK(report.at("cond2").at("trend").is_string());
    for (const char* key : {"kind", "system", "structural", "kernel", "cond2prime", "notes", "rivals", "empirical", "series"})
        CHECK(report.contains(key));
    CHECK(report.at("rivals").size() == 5);

    std::vector<std::string> refs;
    collectSeriesRefs(report, refs);
    CHECK(refs.size() >= 14);
    for (const auto& id : refs) {
        INFO(id);
        REQUIRE(report.at("series").contains(id));
        const auto& s = report.at("series").at(id);
        CHECK(s.at("t").size() == s.at("value").size());
        CHECK(s.at("t").size() > 1);
    }
    for (const auto& rv : report.at("rivals")) CHECK(rv.at("curve").contains("series"));
}

TEST_CASE("csv series") {
    TempDir dir;
    const auto r = run("example example-3.15 --csv " + (dir / "csv"));
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "csv/cond1.csv");
    REQUIRE(in);
    std::string line, last;
    std::getline(in, line);
    CHECK(line == "t,value");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        last = line;
        ++rows;
    }
    CHECK(rows == kConditionSamples + 1);
    const double value = std::stod(last.substr(last.find(',') + 1));
    CHECK(value == doctest::Approx(0.1333).epsilon(1e-3));
    CHECK(fs::exists(dir / "csv/cond2.csv"));
    CHECK(fs::exists(dir / "csv/rivals.freezing.csv"));
    CHECK(fs::exists(dir / "csv/empirical.max-norm.csv"));
}

TEST_CASE("table rows") {
    auto r = run("example example-3.15 --param C=3");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("freezing: precondition failed") != std::string::npos);
    CHECK(r.out.find("verdict: ") != std::string::npos);
    CHECK(r.out.find("lozinskii-II: ") != std::string::npos);
    CHECK(r.out.find("empirical: ") != std::string::npos);

    r = run("example zero --horizon 20");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("verdict: LyapunovStable") != std::string::npos);
    CHECK(r.out.find("lozinskii-I: integral bounded above [Stable]") != std::string::npos);
    CHECK(r.out.find("lyapunov-bogdanov:") != std::string::npos);

    r = run("example example-3.14");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("verdict: LyapunovStable") != std::string::npos);
    CHECK(r.out.find("lozinskii-I: integral not bounded above") != std::string::npos);
}

TEST_CASE("identical inputs give byte-identical reports") {
    TempDir dir;
    REQUIRE(run("example example-3.15 --json " + (dir / "a.json")).code == 0);
    REQUIRE(run("example example-3.15 --json " + (dir / "b.json")).code == 0);
    const auto a = slurp(dir / "a.json");
    CHECK(!a.empty());
    CHECK(a == slurp(dir / "b.json"));

    const std::string cfg = configDir() + "/quaternion-2x1.ini";
    const auto x = run("analyze " + cfg), y = run("analyze " + cfg);
    CHECK(x.code == 0);
    CHECK(x.out == y.out);
}

TEST_CASE("analyze and emit") {
    TempDir dir;
    std::ofstream(dir / "cfg.ini") << kCustom << "\n[output]\njson = " << (dir / "r.json") << "\ncsv = " << (dir / "series")
                                   << "\n";
    const auto r = run("analyze " + (dir / "cfg.ini"));
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(dir / "r.json"));
    CHECK(fs::exists(dir / "series/cond1.csv"));

    const auto table = run("emit --format table " + (dir / "r.json"));
    CHECK(table.code == 0);
    CHECK(table.out == r.out);

    const auto json = run("emit --format json " + (dir / "r.json"));
    CHECK(json.code == 0);
    CHECK(json.out == slurp(dir / "r.json"));

    CHECK(run("emit --format csv " + (dir / "r.json") + " --out " + (dir / "again")).code == 0);
    CHECK(slurp(dir / "again/cond2.csv") == slurp(dir / "series/cond2.csv"));
}

TEST_CASE("second-order subcommand") {
    TempDir dir;
    auto write = [&](const std::string& name, const std::string& p, const std::string& q, const std::string& r,
                     const std::string& t0, const std::string& horizon) {
        std::ofstream(dir / name) << "[equation]\np = " << p << "\nq = " << q << "\nr = " << r << "\nt0 = " << t0
                                  << "\n[run]\nhorizon = " << horizon << "\n[output]\njson = " << (dir / (name + ".json"))
                                  << "\n";
        return dir / name;
    };
    auto res = run("second-order " + write("a.ini", "1", "1", "1/t^2", "1", "200"));
    REQUIRE(res.code == 0);
    auto rep = loadReport(dir / "a.ini.json");
    CHECK(rep.at("verdict") == "LyapunovStable");
    CHECK(rep.at("cond2").at("sup").get<double>() == doctest::Approx(1.0).epsilon(0.01));

    res = run("second-order " + write("b.ini", "1", "0", "-1", "0", "20"));
    REQUIRE(res.code == 0);
    rep = loadReport(dir / "b.ini.json");
    CHECK(rep.at("asymptoticExcluded") == true);
    CHECK(rep.at("verdict") == "Inconclusive");
    CHECK(res.out.find("asymptotic stability: excluded") != std::string::npos);

    res = run("second-order " + write("c.ini", "1", "1", "0", "0", "50"));
    REQUIRE(res.code == 0);
    rep = loadReport(dir / "c.ini.json");
    CHECK(rep.at("verdict") == "LyapunovStable");
    CHECK(rep.at("cond1").at("sup").get<double>() == 0.0);
    CHECK(rep.at("cond2").at("sup").get<double>() == 0.0);

    res = run("second-order " + write("d.ini", "t - 2", "1", "0", "0", "10"));
    CHECK(res.code != 0);
    CHECK(res.out.find("error:") != std::string::npos);
}

TEST_CASE("errors exit nonzero") {
    TempDir dir;
    std::ofstream(dir / "bad.ini") << "[system]\nbuiltin = zero\nunknown = 1\n";
    auto r = run("analyze " + (dir / "bad.ini"));
    CHECK(r.code != 0);
    CHECK(r.out.find("error:") != std::string::npos);
    CHECK(run("example no-such-system").code != 0);
    CHECK(run("example example-3.15 --param bogus=1").code != 0);
    CHECK(run("example example-3.15 --param C").code != 0);
    CHECK(run("analyze " + (dir / "missing.ini")).code != 0);
}

}
