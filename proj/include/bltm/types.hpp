#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace bltm {

/// State of the similarity ODE at one abscissa: stream function f and its
/// first two derivatives (velocity ratio and shear).
struct StateVector {
    double f = 0.0;
    double fp = 0.0;
    double fpp = 0.0;

    bool finite() const {
        return std::isfinite(f) && std::isfinite(fp) && std::isfinite(fpp);
    }
};

/// Right-hand side of a third-order scalar ODE: returns f''' at (eta, state).
using Rhs = std::function<double(double, const StateVector&)>;

/// Initial value problem f''' = rhs(eta, f, f', f'') on [0, domain_end].
struct IvpProblem {
    Rhs rhs;
    StateVector initial;
    double domain_end = 0.0;
};

struct IntegrationStats {
    long steps = 0;        ///< accepted steps
    long failed = 0;       ///< rejected steps
    long evaluations = 0;  ///< rhs calls
};

struct Sample {
    double eta = 0.0;
    StateVector state;
};

/// Sampled IVP solution. Every accepted step is stored. When halted_early
/// is set, integration stopped at halt_abscissa (< domain_end) because of
/// state blow-up or step underflow; all stored samples are still finite.
/// Otherwise the last sample lies exactly at domain_end.
struct Trajectory {
    std::vector<Sample> samples;
    IntegrationStats stats;
    bool halted_early = false;
    double halt_abscissa = 0.0;

    const Sample& back() const { return samples.back(); }
};

}  // namespace bltm
