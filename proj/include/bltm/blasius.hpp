#pragma once

#include <vector>

#include "bltm/errors.hpp"
#include "bltm/ode.hpp"
#include "bltm/types.hpp"

namespace bltm {

/// Flat-plate boundary-layer equation: f''' = -f f'' / 2.
double blasius_rhs(double eta, const StateVector& state);

/// Skin-friction coefficient from the terminal starred velocity ratio:
/// lambda = fp_terminal^(-3/2). Throws DomainError for fp_terminal <= 0.
double lambda_from_terminal(double fp_terminal);

struct LambdaCheckpoint {
    double eta_star;
    double lambda;
};

struct BlasiusSolution {
    double lambda = 0.0;
    std::vector<LambdaCheckpoint> lambda_checkpoints;
    Trajectory starred;
    std::vector<Sample> physical;  ///< rescaled profile (eta, f, f', f'')
};

enum class IntegratorKind { fixed, adaptive };

struct ToepferConfig {
    std::vector<double> checkpoints{6.0, 8.0, 10.0};
    double agreement_tol = 1e-9;
    IntegratorKind integrator = IntegratorKind::adaptive;
    double step = 0.1;   ///< fixed-step size (IntegratorKind::fixed)
    double rtol = 1e-9;  ///< adaptive tolerances
    double atol = 1e-9;
};

/// Two subsequent checkpoint values of lambda never agreed within the
/// requested accuracy; carries every (eta*, lambda_j) pair for diagnosis.
struct ToepferNoConvergence : std::runtime_error {
    explicit ToepferNoConvergence(std::vector<LambdaCheckpoint> cps)
        : std::runtime_error("no two consecutive checkpoint lambdas agree"),
          checkpoints(std::move(cps)) {}
    std::vector<LambdaCheckpoint> checkpoints;
};

/// Solve the flat-plate problem without iteration: integrate the unit-shear
/// IVP once up to the largest checkpoint, extract lambda_j at each
/// checkpoint, accept the first consecutive pair agreeing within
/// agreement_tol, and rescale the trajectory to physical variables.
BlasiusSolution solve_toepfer(const ToepferConfig& config);

/// Truncated power-series solution f = sum C_n eta^n. Only the powers
/// eta^2, eta^5, eta^8, ... carry nonzero coefficients.
struct SeriesExpansion {
    double lambda = 0.0;
    std::vector<double> coefficients;  ///< C_0 .. C_n_max
};

/// Coefficients through eta^n_max from the convolution recurrence
/// n(n-1)(n-2) C_n = -1/2 sum_k C_k (n-1-k)(n-2-k) C_{n-1-k}, C_2 = lambda/2.
SeriesExpansion series_coefficients(double lambda, int n_max);

struct SeriesValue {
    double f;
    double fp;
    double fpp;
};

/// Evaluate the truncated series and its first two derivatives. Restricted
/// to |eta| <= 2 where the alternating series is safely inside its
/// convergence region.
SeriesValue series_eval(const SeriesExpansion& series, double eta);

}  // namespace bltm
