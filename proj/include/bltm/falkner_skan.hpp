#pragma once

#include <span>
#include <vector>

#include "bltm/itm.hpp"

namespace bltm {

/// Wedge-flow equation right-hand side: f''' = -f f'' - beta (1 - f'^2).
double fs_phi(double eta, double f, double fp, double fpp, double beta);

enum class Flow { normal, reverse };

/// Starting secant iterates that work across the multiple-solution range.
inline constexpr double kNormalSeeds[2] = {1.0, 5.0};
inline constexpr double kReverseSeeds[2] = {15.0, 25.0};

struct FalknerSkanCase {
    double beta = 0.0;
    Flow flow = Flow::normal;
    ItmConfig config;
};

/// A case with branch-default seeds and the standard truncated boundary.
FalknerSkanCase make_case(double beta, Flow flow);

/// Scaling embedding of the wedge-flow problem: delta = -1, sigma = 4,
/// d = +1 (normal) or -1 (reverse).
ScalingProblem make_problem(const FalknerSkanCase& fs_case);

ItmResult solve_case(const FalknerSkanCase& fs_case);

struct BranchPoint {
    double beta = 0.0;
    double fpp0 = 0.0;  ///< NaN when not converged
    int iterations = 0;
    bool converged = false;
};

enum class SeedMode {
    warm_start,   ///< chain each point from the previous converged root
    independent,  ///< fixed seeds per point; order-free, parallelizable
};

struct SweepOptions {
    SeedMode mode = SeedMode::warm_start;
    double h0 = 0.0;  ///< 0 selects the branch default
    double h1 = 0.0;
    bool parallel = false;  ///< independent mode only
    ItmConfig base;         ///< tolerances, eta_inf, max_iter (seeds ignored)
};

/// Solve a list of parameter values on one branch. Non-convergence is
/// recorded per point, never thrown.
std::vector<BranchPoint> sweep_beta(std::span<const double> betas, Flow flow,
                                    const SweepOptions& options);

struct BetaMinResult {
    double beta_min = 0.0;
    double fpp0_normal = 0.0;
    double fpp0_reverse = 0.0;
    double bracket_lo = 0.0;  ///< deepest probe bracketing the limit from below
    double bracket_hi = 0.0;  ///< last parameter where both branches converge
};

/// The continuation could not solve both branches at its starting parameter.
struct BadStartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// March the parameter downward from -0.1988 with geometrically shrinking
/// steps until both branch skin frictions fall below threshold or the
/// convergence/failure bracket is narrower than 1e-9. The truncated
/// boundary shrinks from 20 to 1 for probes within 1e-4 of -0.1988.
BetaMinResult find_beta_min(const ItmConfig& base, double threshold);

}  // namespace bltm
