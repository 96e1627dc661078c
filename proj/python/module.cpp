#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qstab/analysis.hpp"
#include "qstab/builtins.hpp"
#include "qstab/config.hpp"
#include "qstab/expr.hpp"
#include "qstab/qmatrix.hpp"
#include "qstab/quaternion.hpp"

namespace py = pybind11;
using namespace qstab;

namespace {

py::object toPython(const Json& report) {
    return py::module_::import("json").attr("loads")(report.dump());
}

QMatrix toMatrix(const std::vector<std::vector<Quaternion>>& rows) {
    const std::size_t r = rows.size(), c = rows.empty() ? 0 : rows.front().size();
    std::vector<Quaternion> entries;
    for (const auto& row : rows) {
        if (row.size() != c) throw std::invalid_argument("ragged matrix rows");
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return {r, c, std::move(entries)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stability certification for two-block quaternionic linear time-varying systems";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<EvalError>(m, "EvalError", PyExc_ArithmeticError);

    py::class_<Quaternion>(m, "Quaternion")
        .def(py::init<double, double, double, double>(), py::arg("w") = 0.0, py::arg("x") = 0.0, py::arg("y") = 0.0,
             py::arg("z") = 0.0)
        .def_readwrite("w", &Quaternion::w)
        .def_readwrite("x", &Quaternion::x)
        .def_readwrite("y", &Quaternion::y)
        .def_readwrite("z", &Quaternion::z)
        .def("conj", &Quaternion::conj)
        .def("norm", &Quaternion::norm)
        .def("inverse", &Quaternion::inverse)
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def(py::self * py::self)
        .def(py::self * double())
        .def(double() * py::self)
        .def(py::self / py::self)
        .def(-py::self)
        .def("__eq__", [](const Quaternion& a, const Quaternion& b) {
            return a.w == b.w && a.x == b.x && a.y == b.y && a.z == b.z;
        })
        .def("__repr__", [](const Quaternion& q) { return toString(q); });
    py::implicitly_convertible<py::float_, Quaternion>();
    py::implicitly_convertible<py::int_, Quaternion>();

    m.def("qexp", [](const Quaternion& q) { return qstab::exp(q); }, py::arg("q"));
    m.def("evaluate", [](const std::string& source, double t) { return Expression::parse(source).eval(t); },
          py::arg("expression"), py::arg("t") = 0.0, "Evaluates an expression in t to a quaternion.");

    m.def("op_norm", [](const std::vector<std::vector<Quaternion>>& rows) { return opNorm(toMatrix(rows)); },
          py::arg("matrix"), "Largest singular value of the real embedding.");
    m.def("eigenvalues",
          [](const std::vector<std::vector<Quaternion>>& rows) { return embeddedEigenvalues(toMatrix(rows)); },
          py::arg("matrix"), "Eigenvalues of the real embedding.");
    m.def("is_normal", [](const std::vector<std::vector<Quaternion>>& rows) { return isNormal(toMatrix(rows)); },
          py::arg("matrix"));

    m.def("builtin_names", &builtinNames);
    m.def(
        "run_example",
        [](const std::string& name, const ParamMap& params, std::optional<double> horizon) {
            Json r;
            {
                py::gil_scoped_release release;
                r = runExample(name, params, horizon);
            }
            return toPython(r);
        },
        py::arg("name"), py::arg("params") = ParamMap{}, py::arg("horizon") = std::nullopt,
        "Analyzes a builtin system and returns the report.");
    m.def(
        "analyze",
        [](const std::string& config) {
            std::istringstream in(config);
            const auto cfg = parseAnalysisConfig(in);
            Json r;
            {
                py::gil_scoped_release release;
                r = runAnalyze(cfg);
            }
            return toPython(r);
        },
        py::arg("config"), "Analyzes the system described by INI text and returns the report.");
    m.def(
        "analyze_file",
        [](const std::string& path) {
            const auto cfg = loadAnalysisConfig(path);
            Json r;
            {
                py::gil_scoped_release release;
                r = runAnalyze(cfg);
            }
            return toPython(r);
        },
        py::arg("path"));
    m.def(
        "second_order",
        [](const std::string& config) {
            std::istringstream in(config);
            const auto cfg = parseSecondOrderConfig(in);
            Json r;
            {
                py::gil_scoped_release release;
                r = runSecondOrder(cfg);
            }
            return toPython(r);
        },
        py::arg("config"), "Analyzes a second-order equation described by INI text.");
}
