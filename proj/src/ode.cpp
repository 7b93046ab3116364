#include "bltm/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bltm/errors.hpp"

namespace bltm {
namespace {

bool exceeds_bound(const StateVector& s) {
    return !s.finite() || std::abs(s.f) > kBlowupBound || std::abs(s.fp) > kBlowupBound ||
           std::abs(s.fpp) > kBlowupBound;
}

StateVector axpy(const StateVector& y, double h, const StateVector& k) {
    return {y.f + h * k.f, y.fp + h * k.fp, y.fpp + h * k.fpp};
}

// Derivative of the first-order system (f, f', f'').
StateVector system_rhs(const IvpProblem& p, double eta, const StateVector& y, long& evals) {
    ++evals;
    return {y.fp, y.fpp, p.rhs(eta, y)};
}

void validate_problem(const IvpProblem& p) {
    if (!(p.domain_end > 0.0))
        throw InvalidProblemError("ivp: domain_end must be positive");
    if (!p.initial.finite())
        throw InvalidProblemError("ivp: initial state is not finite");
}

}  // namespace

Trajectory rk4_fixed(const IvpProblem& problem, double step) {
    if (!(step > 0.0))
        throw InvalidConfigError("rk4_fixed: step must be positive");
    validate_problem(problem);

    Trajectory traj;
    long& evals = traj.stats.evaluations;

    StateVector probe = system_rhs(problem, 0.0, problem.initial, evals);
    if (!probe.finite())
        throw InvalidProblemError("rk4_fixed: rhs is not finite at eta = 0");

    const double end = problem.domain_end;
    const long n = static_cast<long>(std::ceil(end / step - 1e-12));
    traj.samples.push_back({0.0, problem.initial});

    StateVector y = problem.initial;
    double t = 0.0;
    for (long i = 0; i < n; ++i) {
        const double t_next = (i + 1 == n) ? end : (static_cast<double>(i + 1) * step);
        const double h = t_next - t;

        const StateVector k1 = (i == 0) ? probe : system_rhs(problem, t, y, evals);
        const StateVector k2 = system_rhs(problem, t + 0.5 * h, axpy(y, 0.5 * h, k1), evals);
        const StateVector k3 = system_rhs(problem, t + 0.5 * h, axpy(y, 0.5 * h, k2), evals);
        const StateVector k4 = system_rhs(problem, t_next, axpy(y, h, k3), evals);

        StateVector y_next{y.f + h / 6.0 * (k1.f + 2.0 * k2.f + 2.0 * k3.f + k4.f),
                           y.fp + h / 6.0 * (k1.fp + 2.0 * k2.fp + 2.0 * k3.fp + k4.fp),
                           y.fpp + h / 6.0 * (k1.fpp + 2.0 * k2.fpp + 2.0 * k3.fpp + k4.fpp)};
        ++traj.stats.steps;
        if (exceeds_bound(y_next)) {
            traj.halted_early = true;
            traj.halt_abscissa = t;
            return traj;
        }
        y = y_next;
        t = t_next;
        traj.samples.push_back({t, y});
    }
    return traj;
}

namespace {

// Dormand-Prince 5(4) tableau. The solution advances with the fifth-order
// weights; E holds the difference against the embedded fourth-order result.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;

double rms3(double a, double b, double c) { return std::sqrt((a * a + b * b + c * c) / 3.0); }

double error_weight(double y0, double y1, double rtol, double atol) {
    return atol + rtol * std::max(std::abs(y0), std::abs(y1));
}

struct StagePack {
    StateVector k[7];
};

// One Dormand-Prince step from (t, y) with size h. Returns the advanced
// state, the scaled error norm, and leaves k[6] usable as the next k[0].
StateVector dopri_step(const IvpProblem& p, double t, const StateVector& y, double h,
                       StagePack& s, long& evals) {
    const StateVector& k1 = s.k[0];
    s.k[1] = system_rhs(p, t + C2 * h, axpy(y, h * A21, k1), evals);
    StateVector y3 = {y.f + h * (A31 * k1.f + A32 * s.k[1].f),
                      y.fp + h * (A31 * k1.fp + A32 * s.k[1].fp),
                      y.fpp + h * (A31 * k1.fpp + A32 * s.k[1].fpp)};
    s.k[2] = system_rhs(p, t + C3 * h, y3, evals);
    StateVector y4 = {y.f + h * (A41 * k1.f + A42 * s.k[1].f + A43 * s.k[2].f),
                      y.fp + h * (A41 * k1.fp + A42 * s.k[1].fp + A43 * s.k[2].fp),
                      y.fpp + h * (A41 * k1.fpp + A42 * s.k[1].fpp + A43 * s.k[2].fpp)};
    s.k[3] = system_rhs(p, t + C4 * h, y4, evals);
    StateVector y5 = {
        y.f + h * (A51 * k1.f + A52 * s.k[1].f + A53 * s.k[2].f + A54 * s.k[3].f),
        y.fp + h * (A51 * k1.fp + A52 * s.k[1].fp + A53 * s.k[2].fp + A54 * s.k[3].fp),
        y.fpp + h * (A51 * k1.fpp + A52 * s.k[1].fpp + A53 * s.k[2].fpp + A54 * s.k[3].fpp)};
    s.k[4] = system_rhs(p, t + C5 * h, y5, evals);
    StateVector y6 = {y.f + h * (A61 * k1.f + A62 * s.k[1].f + A63 * s.k[2].f + A64 * s.k[3].f +
                                 A65 * s.k[4].f),
                      y.fp + h * (A61 * k1.fp + A62 * s.k[1].fp + A63 * s.k[2].fp +
                                  A64 * s.k[3].fp + A65 * s.k[4].fp),
                      y.fpp + h * (A61 * k1.fpp + A62 * s.k[1].fpp + A63 * s.k[2].fpp +
                                   A64 * s.k[3].fpp + A65 * s.k[4].fpp)};
    s.k[5] = system_rhs(p, t + h, y6, evals);

    StateVector y_new = {
        y.f + h * (B1 * k1.f + B3 * s.k[2].f + B4 * s.k[3].f + B5 * s.k[4].f + B6 * s.k[5].f),
        y.fp + h * (B1 * k1.fp + B3 * s.k[2].fp + B4 * s.k[3].fp + B5 * s.k[4].fp + B6 * s.k[5].fp),
        y.fpp + h * (B1 * k1.fpp + B3 * s.k[2].fpp + B4 * s.k[3].fpp + B5 * s.k[4].fpp +
                     B6 * s.k[5].fpp)};
    s.k[6] = system_rhs(p, t + h, y_new, evals);
    return y_new;
}

double scaled_error(const StagePack& s, const StateVector& y, const StateVector& y_new, double h,
                    double rtol, double atol) {
    const double ef =
        h * (E1 * s.k[0].f + E3 * s.k[2].f + E4 * s.k[3].f + E5 * s.k[4].f + E6 * s.k[5].f +
             E7 * s.k[6].f);
    const double efp =
        h * (E1 * s.k[0].fp + E3 * s.k[2].fp + E4 * s.k[3].fp + E5 * s.k[4].fp + E6 * s.k[5].fp +
             E7 * s.k[6].fp);
    const double efpp =
        h * (E1 * s.k[0].fpp + E3 * s.k[2].fpp + E4 * s.k[3].fpp + E5 * s.k[4].fpp +
             E6 * s.k[5].fpp + E7 * s.k[6].fpp);
    return rms3(ef / error_weight(y.f, y_new.f, rtol, atol),
                efp / error_weight(y.fp, y_new.fp, rtol, atol),
                efpp / error_weight(y.fpp, y_new.fpp, rtol, atol));
}

double initial_step(const IvpProblem& p, const StateVector& f0, double rtol, double atol,
                    double first_target, long& evals) {
    const StateVector& y0 = p.initial;
    const double sf = error_weight(y0.f, y0.f, rtol, atol);
    const double sfp = error_weight(y0.fp, y0.fp, rtol, atol);
    const double sfpp = error_weight(y0.fpp, y0.fpp, rtol, atol);

    const double d0 = rms3(y0.f / sf, y0.fp / sfp, y0.fpp / sfpp);
    const double d1 = rms3(f0.f / sf, f0.fp / sfp, f0.fpp / sfpp);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, first_target);

    const StateVector y1 = axpy(y0, h0, f0);
    const StateVector f1 = system_rhs(p, h0, y1, evals);
    double d2 = 0.0;
    if (f1.finite())
        d2 = rms3((f1.f - f0.f) / sf, (f1.fp - f0.fp) / sfp, (f1.fpp - f0.fpp) / sfpp) / h0;

    double h1;
    if (std::max(d1, d2) <= 1e-15)
        h1 = std::max(1e-6, h0 * 1e-3);
    else
        h1 = std::pow(0.01 / std::max(d1, d2), 0.2);

    double h = std::min({100.0 * h0, h1, first_target});
    if (!std::isfinite(h) || h <= 0.0) h = 1e-6 * first_target;
    return h;
}

}  // namespace

Trajectory integrate_adaptive(const IvpProblem& problem, double rtol, double atol,
                              std::span<const double> checkpoints,
                              const IntegrationLimits& limits) {
    if (!(rtol > 0.0) || !(atol > 0.0))
        throw InvalidConfigError("integrate_adaptive: rtol and atol must be positive");
    if (limits.max_steps < 1)
        throw InvalidConfigError("integrate_adaptive: max_steps must be positive");
    validate_problem(problem);

    const double end = problem.domain_end;
    std::vector<double> targets(checkpoints.begin(), checkpoints.end());
    for (double c : targets)
        if (!(c > 0.0) || c > end)
            throw InvalidConfigError("integrate_adaptive: checkpoint outside (0, domain_end]");
    targets.push_back(end);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

    Trajectory traj;
    long& evals = traj.stats.evaluations;

    StagePack stages;
    stages.k[0] = system_rhs(problem, 0.0, problem.initial, evals);
    if (!stages.k[0].finite())
        throw InvalidProblemError("integrate_adaptive: rhs is not finite at eta = 0");

    const double h_min = kMinStepFraction * end;
    double h_ctrl = initial_step(problem, stages.k[0], rtol, atol, targets.front(), evals);

    traj.samples.push_back({0.0, problem.initial});
    StateVector y = problem.initial;
    double t = 0.0;
    std::size_t target_idx = 0;
    bool rejected = false;

    while (target_idx < targets.size()) {
        const double target = targets[target_idx];
        const bool clamped = t + h_ctrl >= target;
        const double h = clamped ? target - t : h_ctrl;
        if (h < h_min && !clamped) {
            traj.halted_early = true;
            traj.halt_abscissa = t;
            return traj;
        }

        const StateVector y_new = dopri_step(problem, t, y, h, stages, evals);
        const double err = scaled_error(stages, y, y_new, h, rtol, atol);

        if (err <= 1.0) {
            ++traj.stats.steps;
            if (exceeds_bound(y_new) || traj.stats.steps > limits.max_steps) {
                traj.halted_early = true;
                traj.halt_abscissa = t;
                return traj;
            }
            t = clamped ? target : t + h;
            y = y_new;
            if (limits.store_samples || traj.samples.size() == 1)
                traj.samples.push_back({t, y});
            else
                traj.samples.back() = {t, y};
            stages.k[0] = stages.k[6];
            if (clamped) ++target_idx;

            double factor =
                (err == 0.0) ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(err, -0.2));
            if (rejected) factor = std::min(1.0, factor);
            // A step shortened only to land on a target says nothing about
            // the error; keep the controller's step in that case.
            if (!clamped) h_ctrl = h * factor;
            rejected = false;
        } else {
            ++traj.stats.failed;
            const double factor = std::isfinite(err)
                                      ? std::max(kMinFactor, kSafety * std::pow(err, -0.2))
                                      : kMinFactor;
            h_ctrl = h * factor;
            rejected = true;
            if (h_ctrl < h_min) {
                traj.halted_early = true;
                traj.halt_abscissa = t;
                return traj;
            }
        }
    }
    return traj;
}

}  // namespace bltm
