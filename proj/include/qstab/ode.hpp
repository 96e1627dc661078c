#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace qstab::ode {

using State = std::vector<double>;

/// dy/dt = f(t, y), written into dydt.
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Returns true once the state has escaped (finite-time blow-up).
using EscapePredicate = std::function<bool(double t, std::span<const double> y)>;

struct Options {
    double rtol = 1e-9;
    double atol = 1e-12;
    double initialStep = 0.0;  ///< 0 selects a step automatically
    double maxStep = std::numeric_limits<double>::infinity();
    std::size_t maxSteps = 5'000'000;
    bool recordSteps = false;  ///< keep every accepted step, not only the requested outputs
    EscapePredicate escaped;
};

enum class Status {
    Completed,
    Escaped,        ///< escape predicate fired
    StepUnderflow,  ///< step size collapsed below round-off without escape
    MaxSteps,
    NonFinite,      ///< derivative became non-finite and step reduction did not help
};

std::string toString(Status s);

struct Result {
    Status status = Status::Completed;
    double tEnd = 0.0;  ///< last time reached
    State yEnd;
    std::vector<double> times;  ///< sample times (outputs and/or accepted steps), increasing
    std::vector<State> states;
    std::size_t acceptedSteps = 0;
    std::size_t rejectedSteps = 0;
    double lastStep = 0.0;

    [[nodiscard]] bool completed() const { return status == Status::Completed; }
};

/// Dormand-Prince 5(4) with local extrapolation and standard step-size control.
/// The solution is sampled exactly at every element of `outputs` inside [t0, t1]
/// (steps are shortened to land on them); t0 and t1 are always sampled.
Result integrate(const Rhs& f, double t0, State y0, double t1, std::span<const double> outputs,
                 const Options& opts = {});

/// States recorded at exactly the given times (each must be a sample of `res`).
/// Throws std::out_of_range if a time was not reached.
std::vector<State> samplesAt(const Result& res, std::span<const double> times);

/// n+1 evenly spaced points on [a, b].
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace qstab::ode
