#include "qstab/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace qstab::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

bool allFinite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

class Stepper {
public:
    Stepper(const Rhs& f, std::size_t n) : f_(f), n_(n) {
        for (auto& k : k_) k.resize(n);
        tmp_.resize(n);
        err_.resize(n);
    }

    // Attempts one step from (t, y) with derivative k1 already in k_[0].
    // Writes the 5th-order solution to ynew and its derivative to k_[6] (FSAL).
    void step(double t, std::span<const double> y, double h, std::span<double> ynew) {
        auto stage = [&](std::size_t out, double c, std::initializer_list<std::pair<std::size_t, double>> terms) {
            for (std::size_t i = 0; i < n_; ++i) {
                double acc = 0.0;
                for (const auto& [idx, a] : terms) acc += a * k_[idx][i];
                tmp_[i] = y[i] + h * acc;
            }
            f_(t + c * h, tmp_, k_[out]);
        };
        stage(1, c2, {{0, a21}});
        stage(2, c3, {{0, a31}, {1, a32}});
        stage(3, c4, {{0, a41}, {1, a42}, {2, a43}});
        stage(4, c5, {{0, a51}, {1, a52}, {2, a53}, {3, a54}});
        stage(5, 1.0, {{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}});
        for (std::size_t i = 0; i < n_; ++i) {
            ynew[i] = y[i] + h * (b1 * k_[0][i] + b3 * k_[2][i] + b4 * k_[3][i] + b5 * k_[4][i] + b6 * k_[5][i]);
        }
        f_(t + h, ynew, k_[6]);
        for (std::size_t i = 0; i < n_; ++i) {
            err_[i] = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] + e6 * k_[5][i] +
                           e7 * k_[6][i]);
        }
    }

    double errorNorm(std::span<const double> y, std::span<const double> ynew, const Options& o) const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sc = o.atol + o.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double r = err_[i] / sc;
            s += r * r;
        }
        return std::sqrt(s / static_cast<double>(n_));
    }

    std::vector<double>& k(std::size_t i) { return k_[i]; }

private:
    const Rhs& f_;
    std::size_t n_;
    std::array<std::vector<double>, 7> k_;
    std::vector<double> tmp_;
    std::vector<double> err_;
};

double initialStep(const Rhs& f, double t0, std::span<const double> y0, std::span<const double> f0, double span,
                   const Options& o) {
    // Hairer, Norsett & Wanner, II.4.
    const std::size_t n = y0.size();
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = o.atol + o.rtol * std::abs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        d1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / static_cast<double>(n));
    d1 = std::sqrt(d1 / static_cast<double>(n));
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    std::vector<double> y1(n), f1(n);
    for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h0 * f0[i];
    f(t0 + h0, y1, f1);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = o.atol + o.rtol * std::abs(y0[i]);
        const double r = (f1[i] - f0[i]) / sc;
        d2 += r * r;
    }
    d2 = std::sqrt(d2 / static_cast<double>(n)) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, span, o.maxStep});
}

}  // namespace

std::string toString(Status s) {
    switch (s) {
        case Status::Completed: return "completed";
        case Status::Escaped: return "escaped";
        case Status::StepUnderflow: return "step-underflow";
        case Status::MaxSteps: return "max-steps";
        case Status::NonFinite: return "non-finite";
    }
    return "unknown";
}

std::vector<State> samplesAt(const Result& res, std::span<const double> times) {
    std::vector<State> out;
    out.reserve(times.size());
    for (double t : times) {
        const auto it = std::lower_bound(res.times.begin(), res.times.end(), t);
        if (it == res.times.end() || *it != t) throw std::out_of_range("samplesAt: time not sampled");
        out.push_back(res.states[static_cast<std::size_t>(it - res.times.begin())]);
    }
    return out;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        out[i] = i == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
    }
    return out;
}

Result integrate(const Rhs& f, double t0, State y0, double t1, std::span<const double> outputs, const Options& opts) {
    if (!(t1 >= t0)) throw std::invalid_argument("integrate: t1 must not precede t0");
    if (y0.empty()) throw std::invalid_argument("integrate: empty state");

    std::vector<double> stops;
    stops.reserve(outputs.size() + 1);
    for (double s : outputs)
        if (s > t0 && s < t1) stops.push_back(s);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    if (t1 > t0) stops.push_back(t1);

    const std::size_t n = y0.size();
    Result res;
    res.times.push_back(t0);
    res.states.push_back(y0);

    double t = t0;
    State y = std::move(y0);
    State ynew(n);
    Stepper stepper(f, n);
    f(t, y, stepper.k(0));

    if (opts.escaped && opts.escaped(t, y)) {
        res.status = Status::Escaped;
        res.tEnd = t;
        res.yEnd = y;
        return res;
    }
    if (stops.empty()) {
        res.tEnd = t;
        res.yEnd = y;
        return res;
    }

    const double span = t1 - t0;
    double h = opts.initialStep > 0.0 ? opts.initialStep : initialStep(f, t, y, stepper.k(0), span, opts);
    std::size_t next = 0;
    double errPrev = 1e-4;

    while (next < stops.size()) {
        if (res.acceptedSteps + res.rejectedSteps >= opts.maxSteps) {
            res.status = Status::MaxSteps;
            break;
        }
        const double target = stops[next];
        h = std::min(h, opts.maxStep);
        bool landing = false;
        double hTry = h;
        if (t + hTry >= target || target - (t + hTry) < 1e-12 * std::max(1.0, std::abs(target))) {
            hTry = target - t;
            landing = true;
        }
        if (hTry <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            res.status = Status::StepUnderflow;
            break;
        }

        stepper.step(t, y, hTry, ynew);
        double err = stepper.errorNorm(y, ynew, opts);
        if (!std::isfinite(err) || !allFinite(ynew) || !allFinite(stepper.k(6))) {
            ++res.rejectedSteps;
            h = hTry * 0.1;
            if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
                res.status = Status::NonFinite;
                break;
            }
            continue;
        }

        if (err <= 1.0) {
            // PI controller (Hairer's DOPRI5 defaults).
            double fac = 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(errPrev, 0.4 / 5.0);
            if (err == 0.0) fac = 5.0;
            fac = std::clamp(fac, 0.2, 5.0);
            errPrev = std::max(err, 1e-4);
            t = landing ? target : t + hTry;
            std::swap(y, ynew);
            std::swap(stepper.k(0), stepper.k(6));
            ++res.acceptedSteps;
            res.lastStep = hTry;
            // A step shortened to land on an output says little about the next one.
            const double hNew = fac * hTry;
            h = (landing && hTry < h) ? std::max(h, hNew) : hNew;

            const bool isOutput = landing;
            if (isOutput) ++next;
            if (isOutput || opts.recordSteps) {
                res.times.push_back(t);
                res.states.push_back(y);
            }
            if (opts.escaped && opts.escaped(t, y)) {
                res.status = Status::Escaped;
                break;
            }
        } else {
            ++res.rejectedSteps;
            h = hTry * std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
        }
    }

    res.tEnd = t;
    res.yEnd = y;
    if (res.times.back() != t) {
        res.times.push_back(t);
        res.states.push_back(y);
    }
    return res;
}

}  // namespace qstab::ode
