#include "bltm/itm.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace bltm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_problem(const ScalingProblem& p) {
    if (!p.phi) throw InvalidProblemError("itm: phi is empty");
    if (p.c == 0.0) throw InvalidProblemError("itm: asymptotic value c must be nonzero");
    if (p.delta == 1.0) throw InvalidProblemError("itm: group exponent delta must differ from 1");
    if (p.sigma == 0.0) throw InvalidProblemError("itm: group exponent sigma must be nonzero");
    if (p.d == 0.0) throw InvalidProblemError("itm: prescribed starred shear d must be nonzero");
}

void validate_config(const ItmConfig& c) {
    if (!(c.h0 > 0.0) || !(c.h1 > 0.0))
        throw InvalidConfigError("itm: initial iterates must be positive");
    if (c.h0 == c.h1) throw InvalidConfigError("itm: initial iterates must differ");
    if (!(c.eta_inf > 0.0)) throw InvalidConfigError("itm: eta_inf must be positive");
    if (!(c.tol > 0.0) || !(c.tol_r > 0.0) || !(c.tol_a > 0.0))
        throw InvalidConfigError("itm: tolerances must be positive");
    if (c.max_iter < 2) throw InvalidConfigError("itm: max_iter must be at least 2");
    if (!(c.rtol > 0.0) || !(c.atol > 0.0))
        throw InvalidConfigError("itm: rtol and atol must be positive");
    if (c.max_steps < 1) throw InvalidConfigError("itm: max_steps must be positive");
}

}  // namespace

IvpProblem modified_ivp(const ScalingProblem& problem, double h_star, double eta_inf) {
    if (!(h_star > 0.0)) throw DomainError("modified_ivp: h_star must be positive");
    validate_problem(problem);

    const double delta = problem.delta, sigma = problem.sigma;
    const double p_rhs = std::pow(h_star, (1.0 - 3.0 * delta) / sigma);
    const double p_eta = std::pow(h_star, -delta / sigma);
    const double p_f = std::pow(h_star, -1.0 / sigma);
    const double p_fp = std::pow(h_star, (delta - 1.0) / sigma);
    const double p_fpp = std::pow(h_star, (2.0 * delta - 1.0) / sigma);

    IvpProblem ivp;
    ivp.rhs = [phi = problem.phi, p_rhs, p_eta, p_f, p_fp, p_fpp](double eta,
                                                                  const StateVector& s) {
        return p_rhs * phi(p_eta * eta, p_f * s.f, p_fp * s.fp, p_fpp * s.fpp);
    };
    ivp.initial = {std::pow(h_star, 1.0 / sigma) * problem.a,
                   std::pow(h_star, (1.0 - delta) / sigma) * problem.b, problem.d};
    ivp.domain_end = eta_inf;
    return ivp;
}

double group_parameter(const ScalingProblem& problem, double fp_terminal) {
    const double ratio = fp_terminal / problem.c;
    if (!(ratio > 0.0))
        throw BranchError("group_parameter: terminal velocity has the wrong sign");
    return std::pow(ratio, 1.0 / (1.0 - problem.delta));
}

double transformation_function(const ScalingProblem& problem, double h_star, double lambda) {
    return std::pow(lambda, -problem.sigma) * h_star - 1.0;
}

double rescale_missing_condition(double lambda, double d, double delta) {
    return std::pow(lambda, 2.0 * delta - 1.0) * d;
}

namespace {

GammaEvaluation evaluate_gamma_impl(const ScalingProblem& problem, double h_star,
                                    const ItmConfig& config, bool store_samples) {
    GammaEvaluation ev;
    ev.trajectory = integrate_adaptive(modified_ivp(problem, h_star, config.eta_inf), config.rtol,
                                       config.atol, {}, {config.max_steps, store_samples});
    if (ev.trajectory.halted_early) {
        ev.gamma = -1.0;
        ev.lambda = kNaN;
        ev.failed = true;
        return ev;
    }
    double lambda;
    try {
        lambda = group_parameter(problem, ev.trajectory.back().state.fp);
    } catch (const BranchError&) {
        ev.gamma = -1.0;
        ev.lambda = kNaN;
        ev.failed = true;
        return ev;
    }
    ev.gamma = transformation_function(problem, h_star, lambda);
    ev.lambda = lambda;
    ev.failed = false;
    return ev;
}

}  // namespace

GammaEvaluation evaluate_gamma(const ScalingProblem& problem, double h_star,
                               const ItmConfig& config) {
    return evaluate_gamma_impl(problem, h_star, config, true);
}

ItmResult secant_solve(const ScalingProblem& problem, const ItmConfig& config) {
    validate_problem(problem);
    validate_config(config);

    std::vector<IterationRecord> history;
    auto record = [&](int j, double h, const GammaEvaluation& ev, double h_prev) {
        IterationRecord r;
        r.j = j;
        r.h_star = h;
        r.gamma = ev.gamma;
        r.rel_change = (j <= 1) ? kNaN : std::abs(h - h_prev) / std::abs(h);
        r.fpp0_physical =
            ev.failed ? kNaN : rescale_missing_condition(ev.lambda, problem.d, problem.delta);
        r.halted_early = ev.failed;
        history.push_back(r);
    };

    // Iterates run without sample storage; the accepted root is re-solved
    // densely once for the returned trajectory.
    double h_prev = config.h0;
    double h_cur = config.h1;
    GammaEvaluation ev_prev = evaluate_gamma_impl(problem, h_prev, config, false);
    record(0, h_prev, ev_prev, kNaN);
    GammaEvaluation ev_cur = evaluate_gamma_impl(problem, h_cur, config, false);
    record(1, h_cur, ev_cur, kNaN);

    for (int j = 1;; ++j) {
        if (ev_prev.failed && ev_cur.failed)
            throw DoubleBlowupError("itm: two successive iterates failed", std::move(history));

        if (!ev_cur.failed && std::abs(ev_cur.gamma) <= config.tol &&
            std::abs(h_cur - h_prev) <= config.tol_r * std::abs(h_cur) + config.tol_a) {
            GammaEvaluation dense = evaluate_gamma_impl(problem, h_cur, config, true);

            ItmResult result;
            result.h_star_root = h_cur;
            result.lambda = dense.lambda;
            result.fpp0 = rescale_missing_condition(dense.lambda, problem.d, problem.delta);
            result.iterations = std::move(history);

            const double s_eta = std::pow(dense.lambda, -problem.delta);
            const double s_f = 1.0 / dense.lambda;
            const double s_fp = std::pow(dense.lambda, problem.delta - 1.0);
            const double s_fpp = std::pow(dense.lambda, 2.0 * problem.delta - 1.0);
            result.physical.reserve(dense.trajectory.samples.size());
            for (const Sample& s : dense.trajectory.samples)
                result.physical.push_back({s_eta * s.eta,
                                           {s_f * s.state.f, s_fp * s.state.fp,
                                            s_fpp * s.state.fpp}});
            result.starred = std::move(dense.trajectory);
            return result;
        }

        if (j >= config.max_iter)
            throw NoConvergenceError("itm: iteration cap reached", std::move(history));
        if (ev_cur.gamma == ev_prev.gamma)
            throw StalledSecantError("itm: secant stalled on equal Gamma values",
                                     std::move(history));

        double h_next =
            h_cur - ev_cur.gamma * (h_cur - h_prev) / (ev_cur.gamma - ev_prev.gamma);
        // h enters through fractional powers; fall back toward the last
        // positive iterate when the secant proposes a nonpositive value.
        if (!(h_next > 0.0)) h_next = 0.5 * h_cur;

        h_prev = h_cur;
        ev_prev = std::move(ev_cur);
        h_cur = h_next;
        ev_cur = evaluate_gamma(problem, h_cur, config);
        record(j + 1, h_cur, ev_cur, h_prev);
    }
}

}  // namespace bltm
