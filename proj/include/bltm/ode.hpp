#pragma once

#include <span>

#include "bltm/types.hpp"

namespace bltm {

/// States with any component beyond this magnitude count as blown up.
inline constexpr double kBlowupBound = 1e10;

/// Steps below this fraction of the domain length halt the adaptive loop.
inline constexpr double kMinStepFraction = 1e-12;

/// Cap on accepted steps per adaptive solve. Orders of magnitude above any
/// well-posed solve in this domain; reining in only the runaway iterates
/// whose solutions oscillate ever faster as the scaling parameter grows.
inline constexpr long kDefaultMaxSteps = 1'000'000;

struct IntegrationLimits {
    long max_steps = kDefaultMaxSteps;
    /// When false, only the initial and final samples are stored. The
    /// numerics are identical either way.
    bool store_samples = true;
};

/// Classical fourth-order Runge-Kutta with a fixed step. The grid is
/// i * step with the final step shrunk to land exactly on domain_end, so
/// stats.steps == ceil(domain_end / step) on a full run. Blow-up marks the
/// trajectory halted_early at the last finite sample.
Trajectory rk4_fixed(const IvpProblem& problem, double step);

/// Embedded Runge-Kutta 5(4) pair with a standard step controller and
/// per-component error weights rtol * |y| + atol. Checkpoints (each in
/// (0, domain_end]) and domain_end are landed on exactly, never
/// interpolated. Blow-up, step underflow, or an exhausted step budget
/// returns a partial trajectory with halted_early set instead of throwing.
Trajectory integrate_adaptive(const IvpProblem& problem, double rtol, double atol,
                              std::span<const double> checkpoints = {},
                              const IntegrationLimits& limits = {});

}  // namespace bltm
