#pragma once

#include "entsim/riccati.hpp"

#include <cstdint>
#include <vector>

namespace entsim {

/// P(theta) = [[1+cos t, sin t], [sin t, 1-cos t]] scaled by Omega_0; the +
/// block uses theta, the - block theta + pi.
Eigen::Matrix2d epr_cost_block(double theta, double omega0);

struct EprCost {
    Eigen::Matrix2d plus, minus;
};

EprCost epr_cost_matrix(const SystemParams& p);

/// Per-mode LQR gain: Omega solves A^T Omega + Omega A + P - Omega B B^T Omega / q = 0
/// (the unique branch with A - B K Hurwitz) using the static drift (g = g0 in
/// the - block, 0 in the + block) and B = (0, 1)^T; K = B^T Omega / q.
struct FeedbackGain {
    Eigen::Matrix2d omega_plus, omega_minus;
    Eigen::RowVector2d k_plus, k_minus;
    double residual_plus = 0, residual_minus = 0;

    Eigen::Matrix2d closed_loop_plus(const SystemParams& p) const;
    /// A(t) - B K for the differential block (time dependent through g(t)).
    Eigen::Matrix2d closed_loop_minus(const SystemParams& p, double t) const;
    /// Static differential closed loop (g = g0).
    Eigen::Matrix2d closed_loop_minus_static(const SystemParams& p) const;
};

FeedbackGain solve_are_gain(const SystemParams& p);

/// Backward finite-horizon Riccati flow for one mode,
/// -dOmega/dt = A^T Omega + Omega A + P - Omega B B^T Omega / q, integrated
/// from Omega(horizon) = terminal back to t = 0. Returns Omega(0).
Eigen::Matrix2d finite_horizon_gain(const Eigen::Matrix2d& a, const Eigen::Matrix2d& cost,
                                    double q, double horizon, const Eigen::Matrix2d& terminal,
                                    const StepControl& sc = {});

/// Excess-noise flow for one mode:
/// dXi = Acl Xi + Xi Acl^T + Sc diag(2 eta Gba, 0) Sc.
CovBlock excess_noise_rhs(const CovBlock& xi, const Eigen::Matrix2d& closed_loop,
                          const CovBlock& sigma_c, double two_gamma_m);

/// Excess noise sampled over one period, aligned with a PeriodicSolution.
struct ExcessNoise {
    std::vector<double> t;
    std::vector<TwoModeState> xi;
    int periods_to_converge = 0;
    bool converged = false;
};

/// Integrate the excess noise jointly with the conditional covariance (full
/// time-dependent closed loop) from Xi(t0) = 0 until it is T-periodic.
ExcessNoise integrate_excess_noise(const SystemParams& p, const IntegratorConfig& cfg,
                                   const FeedbackGain& gain, const PeriodicSolution& psol);

/// Sigma = Sigma_c + Xi.
TwoModeState unconditional_cov(const TwoModeState& sigma_c, const TwoModeState& xi);

/// Sampled first-moment trajectory (X+, P+, X-, P-) under Euler-Maruyama.
struct MeanTrajectory {
    std::vector<double> t;
    std::vector<Eigen::Vector4d> x;
};

/// Stochastic conditional mean, Euler-Maruyama with Wiener increments of
/// variance dt/2; feedback u = -K Xc when gain != nullptr. Deterministic for
/// a fixed seed.
MeanTrajectory mean_trajectory(const SystemParams& p, const IntegratorConfig& cfg,
                               const FeedbackGain* gain, const PeriodicSolution& psol,
                               double t0, double t1, int steps_per_period, std::uint64_t seed,
                               const Eigen::Vector4d& x0 = Eigen::Vector4d::Zero());

/// Monte-Carlo estimate of the LQR cost integral over an ensemble of mean
/// trajectories. Diagnostic only.
double lqr_cost_eval(const std::vector<MeanTrajectory>& ensemble, const SystemParams& p,
                     const FeedbackGain* gain);

} // namespace entsim
