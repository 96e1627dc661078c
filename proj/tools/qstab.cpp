#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qstab/analysis.hpp"
#include "qstab/builtins.hpp"

namespace {

qstab::ParamMap parseParams(const std::vector<std::string>& items) {
    qstab::ParamMap out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--param expects k=v, got '" + item + "'");
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability certification for two-block quaternionic linear time-varying systems"};
    app.require_subcommand(1);

    std::string configPath;
    auto* analyze = app.add_subcommand("analyze", "Run the criterion, rival methods and empirical check");
    analyze->add_option("config", configPath, "INI configuration")->required()->check(CLI::ExistingFile);

    std::string secondPath;
    auto* second = app.add_subcommand("second-order", "Analyze (p phi')' + q phi' + r phi = 0");
    second->add_option("config", secondPath, "INI configuration")->required()->check(CLI::ExistingFile);

    std::string exampleName;
    std::vector<std::string> params;
    double horizon = 0.0;
    std::string exampleJson, exampleCsv;
    auto* example = app.add_subcommand("example", "Analyze a builtin system");
    example->add_option("name", exampleName, "builtin name")->required()->check(CLI::IsMember(qstab::builtinNames()));
    example->add_option("--param", params, "builtin parameter k=v (repeatable)");
    example->add_option("--horizon", horizon, "integration horizon");
    example->add_option("--json", exampleJson, "write the report to this path");
    example->add_option("--csv", exampleCsv, "write one CSV per series into this directory");

    std::string format = "table";
    std::string reportPath, outDir = ".";
    auto* emit = app.add_subcommand("emit", "Re-emit a saved report");
    emit->add_option("--format", format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
    emit->add_option("report", reportPath, "report produced by analyze/example")->required()->check(CLI::ExistingFile);
    emit->add_option("--out", outDir, "directory for csv output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) {
            const auto cfg = qstab::loadAnalysisConfig(configPath);
            qstab::writeOutputs(qstab::runAnalyze(cfg), cfg.output, std::cout);
        } else if (*second) {
            const auto cfg = qstab::loadSecondOrderConfig(secondPath);
            qstab::writeOutputs(qstab::runSecondOrder(cfg), cfg.output, std::cout);
        } else if (*example) {
            std::optional<double> h;
            if (example->count("--horizon")) h = horizon;
            qstab::OutputOptions out;
            if (!exampleJson.empty()) out.json = exampleJson;
            if (!exampleCsv.empty()) out.csvDir = exampleCsv;
            qstab::writeOutputs(qstab::runExample(exampleName, parseParams(params), h), out, std::cout);
        } else if (*emit) {
            const auto report = qstab::loadReport(reportPath);
            switch (qstab::emitFormatFromString(format)) {
                case qstab::EmitFormat::Json: qstab::emitJson(report, std::cout); break;
                case qstab::EmitFormat::Table: qstab::emitTable(report, std::cout); break;
                case qstab::EmitFormat::Csv:
                    for (const auto& p : qstab::emitCsv(report, outDir)) std::cout << p << "\n";
                    break;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
