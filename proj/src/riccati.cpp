#include "entsim/riccati.hpp"

#include <cmath>

namespace entsim {

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0 && rel_tol <= 1e-3)) throw ParamError("rel_tol must be in (0, 1e-3]");
    if (!(abs_tol > 0 && abs_tol <= 1e-3)) throw ParamError("abs_tol must be in (0, 1e-3]");
    if (samples_per_period < 64) throw ParamError("samples_per_period must be >= 64");
    if (max_periods < 1) throw ParamError("max_periods must be >= 1");
    if (!(convergence_tol > 0)) throw ParamError("convergence_tol must be positive");
}

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

Vec6 pack(const TwoModeState& s) {
    Vec6 v;
    v << s.plus.s11, s.plus.s12, s.plus.s22, s.minus.s11, s.minus.s12, s.minus.s22;
    return v;
}

TwoModeState unpack(const Vec6& v) {
    return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
}

// dS = A S + S A^T + diag(0, vpp) - S diag(m, 0) S for A = [[0,w],[-k,-gamma]],
// written out on the three stored entries so symmetry is exact.
inline void block_rhs(double w, double k, double gamma, double vpp, double m,
                      double a, double b, double c, double& da, double& db, double& dc) {
    da = 2.0 * w * b - m * a * a;
    db = w * c - k * a - gamma * b - m * a * b;
    dc = -2.0 * k * b - 2.0 * gamma * c + vpp - m * b * b;
}

struct RiccatiSystem {
    const SystemParams& p;
    double vpp, m;

    RiccatiSystem(const SystemParams& sp) : p(sp), vpp(sp.gamma_tot()), m(2.0 * sp.gamma_m()) {}

    void operator()(double t, const Vec6& y, Vec6& dy) const {
        const double w = p.omega0;
        block_rhs(w, w, p.gamma, vpp, m, y[0], y[1], y[2], dy[0], dy[1], dy[2]);
        const double km = w + 4.0 * modulated_coupling(p, t);
        block_rhs(w, km, p.gamma, vpp, m, y[3], y[4], y[5], dy[3], dy[4], dy[5]);
    }
};

void check_psd(const TwoModeState& s, double t, double step_hint) {
    const double tol = 1e-10;
    for (const CovBlock* b : {&s.plus, &s.minus}) {
        const double scale = std::max(1.0, b->frob());
        if (b->min_eig() < -tol * scale)
            throw IntegrationError("conditional covariance lost positivity at t=" + std::to_string(t) +
                                   " (min eig " + std::to_string(b->min_eig()) + ", step " +
                                   std::to_string(step_hint) + ")");
    }
}

} // namespace

TwoModeState riccati_rhs(const TwoModeState& state, double t, const SystemParams& p) {
    Vec6 y = pack(state), dy;
    const RiccatiSystem sys(p);
    sys(t, y, dy);
    return unpack(dy);
}

TimeSeries integrate_conditional(const TwoModeState& init, const SystemParams& p,
                                 const IntegratorConfig& cfg, double t0, double t1,
                                 int n_samples) {
    cfg.validate();
    p.validate();
    const double period = p.omega_c > 0 ? 2.0 * M_PI / p.omega_c : (t1 - t0);
    StepControl sc{cfg.rel_tol, cfg.abs_tol, period * cfg.max_step_frac};
    RiccatiSystem sys(p);

    TimeSeries out;
    out.t.reserve(n_samples + 1);
    out.states.reserve(n_samples + 1);
    Vec6 y = pack(init);
    const double dt = (t1 - t0) / n_samples;
    out.t.push_back(t0);
    out.states.push_back(init);
    check_psd(init, t0, sc.max_step);
    for (int i = 1; i <= n_samples; ++i) {
        const double ta = t0 + (i - 1) * dt, tb = (i == n_samples) ? t1 : t0 + i * dt;
        integrate_rk45(sys, ta, tb, y, sc);
        if (y.cwiseAbs().maxCoeff() > 1e12)
            throw IntegrationError("conditional covariance diverged at t=" + std::to_string(tb));
        TwoModeState s = unpack(y);
        check_psd(s, tb, sc.max_step);
        out.t.push_back(tb);
        out.states.push_back(s);
    }
    return out;
}

TwoModeState static_steady_state(const SystemParams& p) {
    const NoiseModel nm = noise_matrices(p);
    const Eigen::Matrix2d m = nm.quadratic();
    SystemParams ps = p;
    ps.g1 = 0;
    TwoModeState s;
    s.plus = CovBlock::from_mat(solve_riccati(drift_plus(ps), m, nm.v));
    s.minus = CovBlock::from_mat(solve_riccati(drift_minus(ps, 0.0), m, nm.v));
    return s;
}

PeriodicSolution find_periodic_steady_state(const SystemParams& p, const IntegratorConfig& cfg) {
    cfg.validate();
    if (!(p.omega_c > 0)) throw ParamError("find_periodic_steady_state requires omega_c > 0");

    PeriodicSolution sol;
    sol.period = 2.0 * M_PI / p.omega_c;

    TwoModeState state = static_steady_state(p);
    double resid = std::numeric_limits<double>::infinity();
    int n = 0;
    bool diverged = false;
    for (; n < cfg.max_periods; ++n) {
        TwoModeState prev = state;
        try {
            TimeSeries one = integrate_conditional(state, p, cfg, 0.0, sol.period, 8);
            state = one.states.back();
        } catch (const IntegrationError&) {
            diverged = true;
            state = prev;
            break;
        }
        resid = 0;
        const TwoModeState d = state - prev;
        resid = std::max(std::abs(d.plus.s11), std::max(std::abs(d.plus.s12), std::abs(d.plus.s22))) /
                std::max(1e-300, prev.plus.frob());
        const double rm = std::max(std::abs(d.minus.s11), std::max(std::abs(d.minus.s12), std::abs(d.minus.s22))) /
                          std::max(1e-300, prev.minus.frob());
        resid = std::max(resid, rm);
        if (resid < cfg.convergence_tol) {
            ++n;
            break;
        }
    }
    sol.periods_to_converge = n;
    sol.residual = resid;
    sol.converged = !diverged && resid < cfg.convergence_tol;

    try {
        sol.samples = integrate_conditional(state, p, cfg, 0.0, sol.period, cfg.samples_per_period);
    } catch (const IntegrationError&) {
        sol.converged = false;
        sol.samples.t = {0.0};
        sol.samples.states = {state};
    }
    return sol;
}

TwoModeState PeriodicSolution::at(double time) const {
    const std::size_t n = samples.size();
    if (n == 0) throw IntegrationError("PeriodicSolution::at: empty sample set");
    if (n == 1) return samples.states[0];
    double tau = std::fmod(time, period);
    if (tau < 0) tau += period;
    const double dt = period / static_cast<double>(n - 1);
    const std::size_t i = std::min(n - 2, static_cast<std::size_t>(tau / dt));
    const double w = (tau - i * dt) / dt;
    return samples.states[i] * (1.0 - w) + samples.states[i + 1] * w;
}

CovBlock common_mode_steady_state(const SystemParams& p) {
    const double gm = p.gamma_m();
    const double gtot = p.gamma_tot();
    const double w = p.omega0;
    const double s11 =
        -p.gamma / (2.0 * gm) +
        std::sqrt(p.gamma * p.gamma + 2.0 * w * (std::sqrt(2.0 * gm * gtot + w * w) - w)) /
            (2.0 * gm);
    const double s12 = gm * s11 * s11 / w;
    const double s22 = (std::sqrt(2.0 * gm * gtot + w * w) / w - gm * p.gamma * s11 / (w * w)) * s11;
    return {s11, s12, s22};
}

} // namespace entsim
