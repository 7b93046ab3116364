#include "bltm/falkner_skan.hpp"

#include <cmath>
#include <limits>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace bltm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Continuation path used to reach the near-limit starting parameter with
// well-conditioned seeds at every stage.
constexpr double kWarmupBetas[] = {-0.15, -0.18, -0.19, -0.195, -0.197, -0.198, -0.1985};
constexpr double kBetaStart = -0.1988;
constexpr double kNearWindow = 1e-4;  ///< |beta - kBetaStart| below this uses eta_inf = 1
constexpr double kBracketStop = 1e-9;

double seed0(Flow flow) { return flow == Flow::normal ? kNormalSeeds[0] : kReverseSeeds[0]; }
double seed1(Flow flow) { return flow == Flow::normal ? kNormalSeeds[1] : kReverseSeeds[1]; }

BranchPoint point_from_result(double beta, const ItmResult& r) {
    return {beta, r.fpp0, r.iteration_count(), true};
}

BranchPoint point_from_failure(double beta, const ItmIterationError& e) {
    const int iters = e.history.empty() ? 0 : e.history.back().j;
    return {beta, kNaN, iters, false};
}

}  // namespace

double fs_phi(double, double f, double fp, double fpp, double beta) {
    return -f * fpp - beta * (1.0 - fp * fp);
}

FalknerSkanCase make_case(double beta, Flow flow) {
    FalknerSkanCase c;
    c.beta = beta;
    c.flow = flow;
    c.config.h0 = seed0(flow);
    c.config.h1 = seed1(flow);
    return c;
}

ScalingProblem make_problem(const FalknerSkanCase& fs_case) {
    ScalingProblem p;
    p.phi = [beta = fs_case.beta](double eta, double f, double fp, double fpp) {
        return fs_phi(eta, f, fp, fpp, beta);
    };
    p.a = 0.0;
    p.b = 0.0;
    p.c = 1.0;
    p.delta = -1.0;
    p.sigma = 4.0;
    p.d = fs_case.flow == Flow::normal ? 1.0 : -1.0;
    return p;
}

ItmResult solve_case(const FalknerSkanCase& fs_case) {
    return secant_solve(make_problem(fs_case), fs_case.config);
}

std::vector<BranchPoint> sweep_beta(std::span<const double> betas, Flow flow,
                                    const SweepOptions& options) {
    if (betas.empty()) throw InvalidConfigError("sweep: beta list is empty");

    const double s0 = options.h0 > 0.0 ? options.h0 : seed0(flow);
    const double s1 = options.h1 > 0.0 ? options.h1 : seed1(flow);

    std::vector<BranchPoint> points(betas.size());
    auto solve_point = [&](double beta, double h0, double h1) -> BranchPoint {
        FalknerSkanCase c;
        c.beta = beta;
        c.flow = flow;
        c.config = options.base;
        c.config.h0 = h0;
        c.config.h1 = h1;
        try {
            return point_from_result(beta, solve_case(c));
        } catch (const ItmIterationError& e) {
            return point_from_failure(beta, e);
        }
    };

    if (options.mode == SeedMode::independent) {
        const auto n = static_cast<long>(betas.size());
#if defined(_OPENMP)
        if (options.parallel) {
#pragma omp parallel for schedule(dynamic)
            for (long i = 0; i < n; ++i) points[i] = solve_point(betas[i], s0, s1);
            return points;
        }
#endif
        for (long i = 0; i < n; ++i) points[i] = solve_point(betas[i], s0, s1);
        return points;
    }

    // Warm-start chain: seed each point near the previous converged root.
    double last_root = kNaN;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        double h0 = s0, h1 = s1;
        if (std::isfinite(last_root)) {
            h0 = 0.9 * last_root;
            h1 = 1.1 * last_root;
        }
        FalknerSkanCase c;
        c.beta = betas[i];
        c.flow = flow;
        c.config = options.base;
        c.config.h0 = h0;
        c.config.h1 = h1;
        try {
            ItmResult r = solve_case(c);
            last_root = r.h_star_root;
            points[i] = point_from_result(betas[i], r);
        } catch (const ItmIterationError& e) {
            points[i] = point_from_failure(betas[i], e);
        }
    }
    return points;
}

namespace {

struct BranchState {
    double root = kNaN;   ///< last converged h*
    double fpp0 = kNaN;
};

// The truncated starred boundary may shrink to 1 near the limit because the
// physical domain it maps to, lambda * eta_inf, keeps growing as the group
// parameter diverges. Only shrink once lambda >= ~8 on both branches
// (|fpp0| = lambda^-3 <= 2e-3), so the physical domain stays longer than
// the shear layer.
double eta_inf_for(double beta, const BranchState& normal, const BranchState& reverse) {
    const bool near_limit = std::abs(beta - kBetaStart) < kNearWindow;
    const double fpp_max = std::max(std::abs(normal.fpp0), std::abs(reverse.fpp0));
    return (near_limit && fpp_max <= 2e-3) ? 1.0 : 20.0;
}

// One branch at one parameter, warm-started; returns false on any
// classified iteration failure.
bool probe_branch(double beta, Flow flow, const ItmConfig& base, double eta_inf,
                  BranchState& state) {
    FalknerSkanCase c;
    c.beta = beta;
    c.flow = flow;
    c.config = base;
    c.config.eta_inf = eta_inf;
    if (std::isfinite(state.root)) {
        c.config.h0 = 0.9 * state.root;
        c.config.h1 = 1.1 * state.root;
    } else {
        c.config.h0 = seed0(flow);
        c.config.h1 = seed1(flow);
    }
    try {
        ItmResult r = solve_case(c);
        state.root = r.h_star_root;
        state.fpp0 = r.fpp0;
        return true;
    } catch (const ItmIterationError&) {
        return false;
    }
}

}  // namespace

BetaMinResult find_beta_min(const ItmConfig& base, double threshold) {
    if (!(threshold > 0.0)) throw InvalidConfigError("beta-min: threshold must be positive");

    BranchState normal, reverse;
    for (double beta : kWarmupBetas) {
        const double eta_inf = eta_inf_for(beta, normal, reverse);
        if (!probe_branch(beta, Flow::normal, base, eta_inf, normal) ||
            !probe_branch(beta, Flow::reverse, base, eta_inf, reverse))
            throw BadStartError("beta-min: continuation warm-up failed before the start value");
    }
    {
        const double eta_inf = eta_inf_for(kBetaStart, normal, reverse);
        if (!probe_branch(kBetaStart, Flow::normal, base, eta_inf, normal) ||
            !probe_branch(kBetaStart, Flow::reverse, base, eta_inf, reverse))
            throw BadStartError("beta-min: start value failed to converge on both branches");
    }

    double beta_good = kBetaStart;
    double beta_bad = kNaN;

    auto finish = [&]() {
        BetaMinResult r;
        r.bracket_hi = beta_good;
        r.bracket_lo = std::isfinite(beta_bad) ? beta_bad : beta_good;
        r.beta_min = 0.5 * (r.bracket_lo + r.bracket_hi);
        r.fpp0_normal = normal.fpp0;
        r.fpp0_reverse = reverse.fpp0;
        return r;
    };

    if (std::abs(normal.fpp0) <= threshold && std::abs(reverse.fpp0) <= threshold)
        return finish();

    for (int k = 4; k <= 12; ++k) {
        const double step = std::pow(10.0, -k);
        for (int probe_count = 0; probe_count < 25; ++probe_count) {
            const double probe = beta_good - step;
            const double eta_inf = eta_inf_for(probe, normal, reverse);
            BranchState normal_trial = normal, reverse_trial = reverse;
            const bool ok = probe_branch(probe, Flow::normal, base, eta_inf, normal_trial) &&
                            probe_branch(probe, Flow::reverse, base, eta_inf, reverse_trial);
            if (ok) {
                beta_good = probe;
                normal = normal_trial;
                reverse = reverse_trial;
                if (std::abs(normal.fpp0) <= threshold && std::abs(reverse.fpp0) <= threshold)
                    return finish();
            } else {
                beta_bad = probe;
                break;
            }
        }
        if (std::isfinite(beta_bad) && beta_good - beta_bad < kBracketStop) break;
    }
    return finish();
}

}  // namespace bltm
