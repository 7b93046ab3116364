#include "bltm/blasius.hpp"

#include <algorithm>
#include <cmath>

namespace bltm {

double blasius_rhs(double, const StateVector& state) { return -0.5 * state.f * state.fpp; }

double lambda_from_terminal(double fp_terminal) {
    if (!(fp_terminal > 0.0))
        throw DomainError("lambda_from_terminal: terminal velocity must be positive");
    return std::pow(fp_terminal, -1.5);
}

namespace {

void validate(const ToepferConfig& cfg) {
    if (cfg.checkpoints.size() < 2)
        throw InvalidConfigError("toepfer: need at least two checkpoints");
    for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i) {
        if (!(cfg.checkpoints[i] > 0.0))
            throw InvalidConfigError("toepfer: checkpoints must be positive");
        if (i > 0 && !(cfg.checkpoints[i] > cfg.checkpoints[i - 1]))
            throw InvalidConfigError("toepfer: checkpoints must be strictly increasing");
    }
    if (!(cfg.agreement_tol > 0.0))
        throw InvalidConfigError("toepfer: agreement_tol must be positive");
    if (cfg.integrator == IntegratorKind::fixed && !(cfg.step > 0.0))
        throw InvalidConfigError("toepfer: step must be positive");
    if (cfg.integrator == IntegratorKind::adaptive && (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0)))
        throw InvalidConfigError("toepfer: rtol and atol must be positive");
}

// Sample lookup for the fixed-step path; checkpoints must sit on the grid.
const Sample& sample_at(const Trajectory& traj, double eta) {
    const double tol = 1e-9 * std::max(1.0, std::abs(eta));
    auto it = std::lower_bound(traj.samples.begin(), traj.samples.end(), eta - tol,
                               [](const Sample& s, double v) { return s.eta < v; });
    if (it == traj.samples.end() || std::abs(it->eta - eta) > tol)
        throw InvalidConfigError("toepfer: checkpoint does not lie on the integration grid");
    return *it;
}

}  // namespace

BlasiusSolution solve_toepfer(const ToepferConfig& cfg) {
    validate(cfg);

    IvpProblem ivp{blasius_rhs, {0.0, 0.0, 1.0}, cfg.checkpoints.back()};
    Trajectory starred;
    if (cfg.integrator == IntegratorKind::fixed)
        starred = rk4_fixed(ivp, cfg.step);
    else
        starred = integrate_adaptive(ivp, cfg.rtol, cfg.atol, cfg.checkpoints);
    if (starred.halted_early)
        throw BlowupError("toepfer: integration halted before the last checkpoint");

    std::vector<LambdaCheckpoint> lambdas;
    lambdas.reserve(cfg.checkpoints.size());
    for (double cp : cfg.checkpoints)
        lambdas.push_back({cp, lambda_from_terminal(sample_at(starred, cp).state.fp)});

    std::size_t accepted = lambdas.size();
    for (std::size_t j = 1; j < lambdas.size(); ++j) {
        if (std::abs(lambdas[j].lambda - lambdas[j - 1].lambda) <= cfg.agreement_tol) {
            accepted = j;
            break;
        }
    }
    if (accepted == lambdas.size()) throw ToepferNoConvergence(lambdas);

    const double lambda = lambdas[accepted].lambda;
    const double s_eta = std::pow(lambda, -1.0 / 3.0);
    const double s_f = std::pow(lambda, 1.0 / 3.0);
    const double s_fp = std::pow(lambda, 2.0 / 3.0);

    BlasiusSolution sol;
    sol.lambda = lambda;
    sol.lambda_checkpoints = std::move(lambdas);
    sol.physical.reserve(starred.samples.size());
    for (const Sample& s : starred.samples)
        sol.physical.push_back(
            {s_eta * s.eta, {s_f * s.state.f, s_fp * s.state.fp, lambda * s.state.fpp}});
    sol.starred = std::move(starred);
    return sol;
}

SeriesExpansion series_coefficients(double lambda, int n_max) {
    if (n_max < 2) throw InvalidConfigError("series_coefficients: n_max must be >= 2");

    std::vector<double> c(static_cast<std::size_t>(n_max) + 1, 0.0);
    c[2] = lambda / 2.0;
    for (int n = 3; n <= n_max; ++n) {
        double sum = 0.0;
        for (int k = 0; k <= n - 3; ++k)
            sum += c[k] * static_cast<double>(n - 1 - k) * static_cast<double>(n - 2 - k) *
                   c[n - 1 - k];
        c[n] = -0.5 * sum /
               (static_cast<double>(n) * static_cast<double>(n - 1) * static_cast<double>(n - 2));
    }
    return {lambda, std::move(c)};
}

SeriesValue series_eval(const SeriesExpansion& series, double eta) {
    if (!(std::abs(eta) <= 2.0))
        throw DomainError("series_eval: eta outside the enforced radius |eta| <= 2");

    const auto& c = series.coefficients;
    const int n = static_cast<int>(c.size()) - 1;
    double f = 0.0, fp = 0.0, fpp = 0.0;
    for (int k = n; k >= 0; --k) {
        f = f * eta + c[k];
        if (k >= 1) fp = fp * eta + static_cast<double>(k) * c[k];
        if (k >= 2) fpp = fpp * eta + static_cast<double>(k) * static_cast<double>(k - 1) * c[k];
    }
    return {f, fp, fpp};
}

}  // namespace bltm
