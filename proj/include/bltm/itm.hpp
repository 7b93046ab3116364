#pragma once

#include <functional>
#include <vector>

#include "bltm/errors.hpp"
#include "bltm/ode.hpp"
#include "bltm/types.hpp"

namespace bltm {

/// Original-class right-hand side f''' = phi(eta, f, f', f'').
using ClassRhs = std::function<double(double, double, double, double)>;

/// BVP class f''' = phi(...), f(0) = a, f'(0) = b, f'(inf) = c, embedded in
/// a scaling group with exponents (delta, sigma) and prescribed starred
/// initial shear d. Requires c != 0, delta != 1, sigma != 0, d != 0.
struct ScalingProblem {
    ClassRhs phi;
    double a = 0.0;
    double b = 0.0;
    double c = 1.0;
    double delta = -1.0;
    double sigma = 4.0;
    double d = 1.0;
};

struct ItmConfig {
    double h0 = 0.0;  ///< first secant iterate (> 0)
    double h1 = 0.0;  ///< second secant iterate (> 0, != h0)
    double eta_inf = 20.0;
    double tol = 1e-6;    ///< bound on |Gamma|
    double tol_r = 1e-6;  ///< relative part of the iterate-change bound
    double tol_a = 1e-6;  ///< absolute part of the iterate-change bound
    int max_iter = 50;
    double rtol = 1e-6;
    double atol = 1e-6;
    long max_steps = kDefaultMaxSteps;  ///< per-solve step budget
};

/// One secant iterate, mirroring one row of the iteration tables.
/// gamma == -1 marks a failed iterate (IVP halted early or wrong-sign
/// terminal velocity); lambda-derived fields are NaN there.
struct IterationRecord {
    int j = 0;
    double h_star = 0.0;
    double gamma = 0.0;
    double rel_change = 0.0;     ///< |h_j - h_{j-1}| / |h_j|, NaN for j <= 1
    double fpp0_physical = 0.0;  ///< lambda^(2 delta - 1) * d at this iterate
    bool halted_early = false;
};

struct ItmResult {
    double h_star_root = 0.0;
    double lambda = 0.0;
    double fpp0 = 0.0;
    std::vector<IterationRecord> iterations;
    Trajectory starred;
    std::vector<Sample> physical;

    int iteration_count() const { return iterations.empty() ? 0 : iterations.back().j; }
};

struct ItmIterationError : std::runtime_error {
    ItmIterationError(const std::string& what, std::vector<IterationRecord> hist)
        : std::runtime_error(what), history(std::move(hist)) {}
    std::vector<IterationRecord> history;
};

/// Two successive iterates failed (the overflow situation of a plain
/// secant method on this class of problems).
struct DoubleBlowupError : ItmIterationError {
    using ItmIterationError::ItmIterationError;
};

/// Gamma repeated exactly away from a root; the secant step is undefined.
struct StalledSecantError : ItmIterationError {
    using ItmIterationError::ItmIterationError;
};

/// Iteration cap reached before the termination criterion held.
struct NoConvergenceError : ItmIterationError {
    using ItmIterationError::ItmIterationError;
};

/// Starred IVP for iterate h_star: rhs and initial values of the modified
/// problem in starred variables, with f*''(0) = d.
IvpProblem modified_ivp(const ScalingProblem& problem, double h_star, double eta_inf);

/// Group parameter lambda = (fp_terminal / c)^(1 / (1 - delta)).
/// Throws BranchError when fp_terminal / c <= 0.
double group_parameter(const ScalingProblem& problem, double fp_terminal);

/// Transformation function Gamma = lambda^(-sigma) * h_star - 1.
double transformation_function(const ScalingProblem& problem, double h_star, double lambda);

/// Physical missing initial condition lambda^(2 delta - 1) * d.
double rescale_missing_condition(double lambda, double d, double delta);

struct GammaEvaluation {
    double gamma = -1.0;
    double lambda = 0.0;  ///< NaN when failed
    Trajectory trajectory;
    bool failed = true;
};

/// Integrate the starred IVP to eta_inf and evaluate (Gamma, lambda).
/// Early halts and wrong-sign terminal velocities are not errors: they
/// yield gamma = -1 with lambda marked NaN.
GammaEvaluation evaluate_gamma(const ScalingProblem& problem, double h_star,
                               const ItmConfig& config);

/// Secant iteration on Gamma from (h0, h1). Stops when both
/// |Gamma(h_j)| <= tol and |h_j - h_{j-1}| <= tol_r |h_j| + tol_a hold,
/// then rescales the final starred trajectory to physical variables.
ItmResult secant_solve(const ScalingProblem& problem, const ItmConfig& config);

}  // namespace bltm
