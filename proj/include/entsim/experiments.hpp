#pragma once

#include "entsim/analytics.hpp"
#include "entsim/config.hpp"

#include <limits>
#include <string>
#include <vector>

namespace entsim {

enum class RunStatus { Ok = 0, Error = 1, Partial = 2 };

/// Per-point outcome of a sweep evaluation. status: 0 ok, 1 error,
/// 2 flagged (steady-state search did not converge).
struct PointResult {
    int status = 1;
    std::string message;
    bool in_window = false;
    bool applicable = false;
    double en_cond_avg = std::numeric_limits<double>::quiet_NaN();
    double en_uncond_avg = std::numeric_limits<double>::quiet_NaN();
    double en_cond_ana_avg = std::numeric_limits<double>::quiet_NaN();
    double en_uncond_ana_avg = std::numeric_limits<double>::quiet_NaN();
};

struct EvalOptions {
    bool want_unconditional = true;
    bool want_analytic = true;
};

/// Full numeric + analytic evaluation of one parameter point: periodic
/// conditional steady state, LQR gain, excess noise, period-averaged
/// negativities. Never throws; failures land in status/message.
PointResult evaluate_point(const SystemParams& p, const IntegratorConfig& cfg,
                           const EvalOptions& opt);

/// Serial reference evaluation of a parameter grid.
std::vector<PointResult> evaluate_grid_serial(const std::vector<SystemParams>& points,
                                              const IntegratorConfig& cfg, const EvalOptions& opt);

/// OpenMP evaluation; bit-identical to the serial path (each point is an
/// isolated pure computation written to its own slot).
std::vector<PointResult> evaluate_grid_parallel(const std::vector<SystemParams>& points,
                                                const IntegratorConfig& cfg, const EvalOptions& opt,
                                                int workers);

std::vector<PointResult> evaluate_grid(const std::vector<SystemParams>& points,
                                       const IntegratorConfig& cfg, const EvalOptions& opt,
                                       int workers);

/// One-period time traces of the numeric and analytic negativities plus the
/// emitted covariance blocks; backing data of the trace/compare experiments.
struct TraceResult {
    std::vector<double> t;
    std::vector<double> en_cond, en_uncond, en_cond_ana, en_uncond_ana;
    std::vector<TwoModeState> sigma_c, sigma_uncond;
    double period = 0;
    bool converged = false;
    bool analytic_applicable = false;
};

TraceResult compute_trace(const SystemParams& p, const IntegratorConfig& cfg);

RunStatus run_trace(const ExperimentConfig& cfg);
RunStatus run_sweep1d(const ExperimentConfig& cfg);
RunStatus run_sweep2d(const ExperimentConfig& cfg);
RunStatus run_ellipse(const ExperimentConfig& cfg);
RunStatus run_compare(const ExperimentConfig& cfg);
RunStatus run_experiment(const ExperimentConfig& cfg);

} // namespace entsim
