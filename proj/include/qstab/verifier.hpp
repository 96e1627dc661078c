#pragma once

#include <span>
#include <string>
#include <vector>

#include "qstab/ode.hpp"
#include "qstab/quaternion.hpp"
#include "qstab/system.hpp"

namespace qstab {

/// Trajectories of the block system in the real embedding: each state holds the 4m
/// components of Phi followed by the 4n components of Psi.
struct TrajectorySet {
    std::vector<double> times;
    std::vector<ode::State> states;
    std::size_t m = 0;
    std::size_t n = 0;
    std::string initialBasis;
    ode::Status status = ode::Status::Completed;

    [[nodiscard]] double phiNorm(std::size_t i) const;
    [[nodiscard]] double psiNorm(std::size_t i) const;
    [[nodiscard]] double norm(std::size_t i) const;
};

inline constexpr std::size_t kTrajectorySamples = 1000;
inline constexpr double kDefaultHorizonLength = 100.0;

TrajectorySet integrateBlockSystem(const BlockSystem& sys, std::span<const Quaternion> phi0,
                                   std::span<const Quaternion> psi0, double horizon, double tol = 1e-9);

/// One trajectory per embedded unit vector (4(m + n) in total), integrated concurrently.
std::vector<TrajectorySet> basisTrajectories(const BlockSystem& sys, double horizon, double tol = 1e-9);

enum class EmpiricalClass { Decaying, Bounded, Growing, Unresolved };

std::string toString(EmpiricalClass c);

struct EmpiricalThresholds {
    double decay = 1e-3;
    double growth = 1e3;
    double peakGrowth = 1e6;
    double boundedPeak = 10.0;
};

struct EmpiricalVerdict {
    EmpiricalClass classification = EmpiricalClass::Unresolved;
    double peakNorm = 0.0;  ///< max_t ||x(t)|| / ||x(t0)||
    double endRatio = 0.0;  ///< ||x(T)|| / ||x(t0)||
};

EmpiricalVerdict classifyEmpirical(const TrajectorySet& traj, const EmpiricalThresholds& th = {});

/// Worst case over the set (growing > unresolved > bounded > decaying); peak and end ratios are maxima.
EmpiricalVerdict aggregateEmpirical(const std::vector<EmpiricalVerdict>& verdicts);

struct DominationResult {
    double maxViolation = 0.0;  ///< max of ||Phi|| / phi0 - 1 and ||Psi|| / psi0 - 1 over the grid
    bool holds = false;
    std::vector<double> times;
    std::vector<double> phiNorm, psiNorm, phiMajorant, psiMajorant;
};

/// Integrates the block system and the scalar comparison system with matched initial
/// norms; holds iff ||Phi|| <= phi0 (1 + tol) and ||Psi|| <= psi0 (1 + tol) on the grid.
/// Throws std::invalid_argument when the structural conditions fail.
DominationResult dominationCheck(const BlockSystem& sys, const Envelopes& env, std::span<const Quaternion> phi0,
                                 std::span<const Quaternion> psi0, double horizon, double tol = 1e-6);

}  // namespace qstab
