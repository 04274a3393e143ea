#pragma once

#include "entsim/numeric.hpp"
#include "entsim/params.hpp"

#include <vector>

namespace entsim {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step_frac = 1.0 / 256; // fraction of the driving period
    int samples_per_period = 256;
    int max_periods = 4000;
    double convergence_tol = 1e-8;

    void validate() const;
};

/// Sampled trajectory of both covariance blocks.
struct TimeSeries {
    std::vector<double> t;
    std::vector<TwoModeState> states;

    std::size_t size() const { return t.size(); }
};

struct PeriodicSolution {
    TimeSeries samples; // one period, samples_per_period + 1 uniform points
    double period = 0;
    int periods_to_converge = 0;
    double residual = 0;
    bool converged = false;

    /// Linear interpolation with periodic extension.
    TwoModeState at(double time) const;
};

/// Right-hand side of the conditional covariance Riccati flow,
/// dS = A S + S A^T + V - S C^T W^-1 C S, per normal-mode block.
TwoModeState riccati_rhs(const TwoModeState& state, double t, const SystemParams& p);

/// Integrate the conditional covariance from t0 to t1, returning uniform
/// samples. PSD is asserted at every sample (tolerance -1e-10 on the minimum
/// eigenvalue, relative to the block norm).
TimeSeries integrate_conditional(const TwoModeState& init, const SystemParams& p,
                                 const IntegratorConfig& cfg, double t0, double t1,
                                 int n_samples);

/// Static (g = g0) steady state of the conditional Riccati equation, solved
/// per mode as an algebraic Riccati equation. Used as the initial condition
/// for the periodic steady-state search.
TwoModeState static_steady_state(const SystemParams& p);

/// Iterate the one-period map until the covariance is T-periodic; returns the
/// sampled converged period. Non-convergence is flagged, not thrown.
PeriodicSolution find_periodic_steady_state(const SystemParams& p, const IntegratorConfig& cfg);

/// Closed-form static steady state of the common-mode block.
CovBlock common_mode_steady_state(const SystemParams& p);

} // namespace entsim
