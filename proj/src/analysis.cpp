#include "qstab/analysis.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <stdexcept>

#include "qstab/criteria.hpp"
#include "qstab/rivals.hpp"
#include "qstab/verifier.hpp"

namespace qstab {

namespace {

struct EmpiricalRun {
    std::vector<TrajectorySet> basis;
    std::vector<EmpiricalVerdict> verdicts;
    EmpiricalVerdict aggregate;
    std::optional<DominationResult> domination;
};

EmpiricalRun runEmpirical(const BlockSystem& sys, const std::optional<Envelopes>& env, double horizon, double tol,
                          bool domination) {
    EmpiricalRun run;
    run.basis = basisTrajectories(sys, horizon, tol);
    for (const auto& tr : run.basis) run.verdicts.push_back(classifyEmpirical(tr));
    run.aggregate = aggregateEmpirical(run.verdicts);
    if (domination) {
        const std::vector<Quaternion> phi0(sys.m, Quaternion{1.0, 0.0, 0.0, 0.0});
        const std::vector<Quaternion> psi0(sys.n, Quaternion{1.0, 0.0, 0.0, 0.0});
        run.domination = dominationCheck(sys, env ? *env : deriveEnvelopes(sys), phi0, psi0, horizon);
    }
    return run;
}

Json blocksJson(const BlockSystem& sys) {
    auto render = [](const FunctionMatrix& fm) {
        Json rows = Json::array();
        for (std::size_t r = 0; r < fm.rows(); ++r) {
            Json row = Json::array();
            for (std::size_t c = 0; c < fm.cols(); ++c) row.push_back(fm(r, c).render());
            rows.push_back(row);
        }
        return rows;
    };
    return Json{{"A", render(sys.A)}, {"B", render(sys.B)}, {"C", render(sys.C)}, {"D", render(sys.D)}};
}

}  // namespace

Json analyzeSystem(const ResolvedSystem& rs, const AnalysisConfig& cfg) {
    const BlockSystem& sys = rs.system;
    const double horizon = rs.horizon;

    auto criterion = std::async(std::launch::async, [&] { return theorem31Verdict(sys, rs.envelopes, horizon); });
    std::vector<std::future<RivalReport>> rivals;
    for (auto method : cfg.rivals) {
        rivals.push_back(std::async(std::launch::async, [&sys, method, horizon] { return runRival(sys, method, horizon); }));
    }
    std::future<EmpiricalRun> empirical;
    if (cfg.empirical) {
        empirical = std::async(std::launch::async, [&] {
            return runEmpirical(sys, rs.envelopes, horizon, cfg.tolerance, cfg.domination);
        });
    }

    const CriterionReport crit = criterion.get();
    ReportBuilder rb;
    Json report;
    report["kind"] = "analyze";
    report["system"] = Json{{"name", rs.name},
                            {"m", sys.m},
                            {"n", sys.n},
                            {"t0", sys.t0},
                            {"horizon", horizon},
                            {"parameters", rs.parameters},
                            {"blocks", blocksJson(sys)}};
    if (rs.envelopes) {
        report["system"]["envelopes"] = Json{{"source", "user"},
                                             {"aStar", rs.envelopes->aStarDescription},
                                             {"dStar", rs.envelopes->dStarDescription}};
    } else {
        report["system"]["envelopes"] = Json{{"source", "derived"}};
    }
    Json c = rb.criterion(crit);
    for (auto& [k, v] : c.items()) report[k] = v;

    report["rivals"] = Json::array();
    for (auto& f : rivals) report["rivals"].push_back(rb.rival(f.get()));

    if (cfg.empirical) {
        const EmpiricalRun run = empirical.get();
        Json e;
        e["classification"] = toString(run.aggregate.classification);
        e["peakNorm"] = run.aggregate.peakNorm;
        e["endRatio"] = run.aggregate.endRatio;
        e["horizon"] = horizon;
        e["basis"] = Json::array();
        for (std::size_t k = 0; k < run.basis.size(); ++k) {
            e["basis"].push_back(Json{{"initial", run.basis[k].initialBasis},
                                      {"classification", toString(run.verdicts[k].classification)},
                                      {"peakNorm", run.verdicts[k].peakNorm},
                                      {"endRatio", run.verdicts[k].endRatio}});
        }
        const auto& times = run.basis.front().times;
        std::vector<double> worst(times.size(), 0.0);
        for (const auto& tr : run.basis) {
            if (tr.times.size() != times.size()) continue;
            for (std::size_t i = 0; i < times.size(); ++i) worst[i] = std::max(worst[i], tr.norm(i));
        }
        rb.series("empirical.max-norm", times, worst);
        e["series"] = "empirical.max-norm";
        if (run.domination) {
            const auto& d = *run.domination;
            e["domination"] = Json{{"holds", d.holds}, {"maxViolation", d.maxViolation}};
            rb.series("empirical.domination.phi", d.times, d.phiNorm);
            rb.series("empirical.domination.phi-majorant", d.times, d.phiMajorant);
            rb.series("empirical.domination.psi", d.times, d.psiNorm);
            rb.series("empirical.domination.psi-majorant", d.times, d.psiMajorant);
        }
        report["empirical"] = e;
    } else {
        report["empirical"] = nullptr;
    }
    for (const auto& n : rs.notes) report["notes"].push_back(n);
    rb.finish(report);
    return report;
}

Json runAnalyze(const AnalysisConfig& cfg) { return analyzeSystem(resolveSystem(cfg), cfg); }

Json runSecondOrder(const SecondOrderConfig& cfg) {
    const double t0 = constantParameter(cfg.t0);
    const auto p = TimeFunction::parse(cfg.p, t0);
    const auto q = TimeFunction::parse(cfg.q, t0);
    const auto r = TimeFunction::parse(cfg.r, t0);
    const double horizon = cfg.horizon.value_or(t0 + 100.0);
    if (!(horizon > t0)) throw ConfigError("config: horizon must exceed t0");
    const auto rep = analyzeSecondOrder(p, q, r, horizon);

    ReportBuilder rb;
    Json report;
    report["kind"] = "second-order";
    report["system"] = Json{{"name", "second-order"},
                            {"p", p.render()},
                            {"q", q.render()},
                            {"r", r.render()},
                            {"t0", t0},
                            {"horizon", horizon}};
    report["verdict"] = toString(rep.verdict);
    report["cond1"] = rb.curve("I1", rep.criterion.cond1);
    report["kernel"] = rb.curve("kernel", rep.criterion.kernel);
    report["cond2"] = rb.curve("I2", rep.criterion.cond2);
    report["asymptoticExcluded"] = rep.asymptoticExcluded ? Json(*rep.asymptoticExcluded) : Json(nullptr);
    report["notes"] = rep.notes;
    rb.finish(report);
    return report;
}

Json runExample(const std::string& name, const ParamMap& params, std::optional<double> horizon) {
    AnalysisConfig cfg;
    cfg.builtin = name;
    cfg.params = params;
    cfg.horizon = horizon;
    cfg.rivals = allRivalMethods();
    return runAnalyze(cfg);
}

void writeOutputs(const Json& report, const OutputOptions& out, std::ostream& console) {
    if (out.json) {
        std::ofstream f(*out.json);
        if (!f) throw std::runtime_error("cannot write '" + *out.json + "'");
        emitJson(report, f);
    }
    if (out.csvDir) emitCsv(report, *out.csvDir);
    if (out.table) emitTable(report, console);
}

}  // namespace qstab
