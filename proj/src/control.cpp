#include "entsim/control.hpp"

#include <cmath>
#include <random>

namespace entsim {

Eigen::Matrix2d epr_cost_block(double theta, double omega0) {
    Eigen::Matrix2d m;
    m << 1.0 + std::cos(theta), std::sin(theta), std::sin(theta), 1.0 - std::cos(theta);
    return omega0 * m;
}

EprCost epr_cost_matrix(const SystemParams& p) {
    return {epr_cost_block(p.theta_epr, p.omega0), epr_cost_block(p.theta_epr + M_PI, p.omega0)};
}

namespace {

Eigen::Matrix2d control_quadratic(double q) {
    Eigen::Matrix2d r = Eigen::Matrix2d::Zero();
    r(1, 1) = 1.0 / q;
    return r;
}

Eigen::Matrix2d apply_gain(const Eigen::Matrix2d& a, const Eigen::RowVector2d& k) {
    Eigen::Matrix2d acl = a;
    acl.row(1) -= k; // B = (0, 1)^T, so BK subtracts K from the momentum row
    return acl;
}

bool hurwitz(const Eigen::Matrix2d& a) {
    return a.trace() < 0 && a.determinant() > 0;
}

} // namespace

Eigen::Matrix2d FeedbackGain::closed_loop_plus(const SystemParams& p) const {
    return apply_gain(drift_plus(p), k_plus);
}

Eigen::Matrix2d FeedbackGain::closed_loop_minus(const SystemParams& p, double t) const {
    return apply_gain(drift_minus(p, t), k_minus);
}

Eigen::Matrix2d FeedbackGain::closed_loop_minus_static(const SystemParams& p) const {
    SystemParams ps = p;
    ps.g1 = 0;
    return apply_gain(drift_minus(ps, 0.0), k_minus);
}

FeedbackGain solve_are_gain(const SystemParams& p) {
    p.validate();
    const EprCost cost = epr_cost_matrix(p);
    const Eigen::Matrix2d r = control_quadratic(p.q_effort);
    SystemParams ps = p;
    ps.g1 = 0;
    const Eigen::Matrix2d a_plus = drift_plus(ps);
    const Eigen::Matrix2d a_minus = drift_minus(ps, 0.0);

    FeedbackGain g;
    // control orientation: A^T Omega + Omega A + P - Omega R Omega = 0, the
    // unique branch whose closed loop A - B K is Hurwitz
    try {
        g.omega_plus = solve_riccati(a_plus.transpose(), r, cost.plus);
    } catch (const IntegrationError& e) {
        throw IntegrationError(std::string("solve_are_gain (+ mode): ") + e.what());
    }
    try {
        g.omega_minus = solve_riccati(a_minus.transpose(), r, cost.minus);
    } catch (const IntegrationError& e) {
        throw IntegrationError(std::string("solve_are_gain (- mode): ") + e.what());
    }
    g.k_plus = g.omega_plus.row(1) / p.q_effort;
    g.k_minus = g.omega_minus.row(1) / p.q_effort;
    g.residual_plus =
        (a_plus.transpose() * g.omega_plus + g.omega_plus * a_plus + cost.plus -
         g.omega_plus * r * g.omega_plus).norm();
    g.residual_minus =
        (a_minus.transpose() * g.omega_minus + g.omega_minus * a_minus + cost.minus -
         g.omega_minus * r * g.omega_minus).norm();

    if (!hurwitz(apply_gain(a_plus, g.k_plus)) || !hurwitz(apply_gain(a_minus, g.k_minus)))
        throw IntegrationError("solve_are_gain: closed loop is not Hurwitz");
    return g;
}

Eigen::Matrix2d finite_horizon_gain(const Eigen::Matrix2d& a, const Eigen::Matrix2d& cost,
                                    double q, double horizon, const Eigen::Matrix2d& terminal,
                                    const StepControl& sc) {
    if (!(horizon > 0)) throw ParamError("finite_horizon_gain: horizon must be positive");
    const Eigen::Matrix2d r = control_quadratic(q);
    using Vec3 = Eigen::Vector3d;
    auto rhs = [&](double, const Vec3& y, Vec3& dy) {
        Eigen::Matrix2d w;
        w << y[0], y[1], y[1], y[2];
        // backward flow in s = horizon - t, control orientation
        Eigen::Matrix2d d = a.transpose() * w + w * a + cost - w * r * w;
        dy << d(0, 0), 0.5 * (d(0, 1) + d(1, 0)), d(1, 1);
    };
    Vec3 y(terminal(0, 0), 0.5 * (terminal(0, 1) + terminal(1, 0)), terminal(1, 1));
    StepControl ctrl = sc;
    ctrl.max_step = std::min(ctrl.max_step, 0.05 / std::max(1e-300, a.cwiseAbs().maxCoeff()));
    integrate_rk45(rhs, 0.0, horizon, y, ctrl);
    Eigen::Matrix2d out;
    out << y[0], y[1], y[1], y[2];
    return out;
}

CovBlock excess_noise_rhs(const CovBlock& xi, const Eigen::Matrix2d& acl,
                          const CovBlock& sigma_c, double two_gamma_m) {
    const Eigen::Matrix2d x = xi.mat();
    Eigen::Matrix2d d = acl * x + x * acl.transpose();
    // source Sc diag(2 eta Gba, 0) Sc
    const double a = sigma_c.s11, b = sigma_c.s12;
    d(0, 0) += two_gamma_m * a * a;
    d(0, 1) += two_gamma_m * a * b;
    d(1, 0) += two_gamma_m * a * b;
    d(1, 1) += two_gamma_m * b * b;
    return CovBlock::from_mat(d);
}

namespace {

using Vec12 = Eigen::Matrix<double, 12, 1>;

struct JointSystem {
    const SystemParams& p;
    const FeedbackGain& gain;
    double vpp, m;

    JointSystem(const SystemParams& sp, const FeedbackGain& g)
        : p(sp), gain(g), vpp(sp.gamma_tot()), m(2.0 * sp.gamma_m()) {}

    void operator()(double t, const Vec12& y, Vec12& dy) const {
        const TwoModeState sc{{y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
        const TwoModeState dsc = riccati_rhs(sc, t, p);
        dy[0] = dsc.plus.s11;
        dy[1] = dsc.plus.s12;
        dy[2] = dsc.plus.s22;
        dy[3] = dsc.minus.s11;
        dy[4] = dsc.minus.s12;
        dy[5] = dsc.minus.s22;
        const CovBlock dxp = excess_noise_rhs({y[6], y[7], y[8]}, gain.closed_loop_plus(p), sc.plus, m);
        const CovBlock dxm =
            excess_noise_rhs({y[9], y[10], y[11]}, gain.closed_loop_minus(p, t), sc.minus, m);
        dy[6] = dxp.s11;
        dy[7] = dxp.s12;
        dy[8] = dxp.s22;
        dy[9] = dxm.s11;
        dy[10] = dxm.s12;
        dy[11] = dxm.s22;
    }
};

} // namespace

ExcessNoise integrate_excess_noise(const SystemParams& p, const IntegratorConfig& cfg,
                                   const FeedbackGain& gain, const PeriodicSolution& psol) {
    cfg.validate();
    const double period = psol.period;
    StepControl sc{cfg.rel_tol, cfg.abs_tol, period * cfg.max_step_frac};
    JointSystem sys(p, gain);

    const TwoModeState sc0 = psol.at(0.0);
    Vec12 y;
    y << sc0.plus.s11, sc0.plus.s12, sc0.plus.s22, sc0.minus.s11, sc0.minus.s12, sc0.minus.s22,
        0, 0, 0, 0, 0, 0; // Xi(t0) = 0
    ExcessNoise out;
    int n = 0;
    double resid = std::numeric_limits<double>::infinity();
    for (; n < cfg.max_periods; ++n) {
        const Vec12 prev = y;
        integrate_rk45(sys, 0.0, period, y, sc);
        // wrap phase: g(t) is T-periodic, so restarting at 0 is exact
        resid = (y.tail<6>() - prev.tail<6>()).cwiseAbs().maxCoeff() /
                std::max(1e-12, prev.tail<6>().norm());
        if (resid < cfg.convergence_tol) {
            ++n;
            break;
        }
    }
    out.periods_to_converge = n;
    out.converged = resid < cfg.convergence_tol;

    const int ns = cfg.samples_per_period;
    out.t.reserve(ns + 1);
    out.xi.reserve(ns + 1);
    for (int i = 0; i <= ns; ++i) {
        const double ta = period * (i - 1) / ns, tb = period * i / ns;
        if (i > 0) integrate_rk45(sys, ta, tb, y, sc);
        out.t.push_back(period * i / ns);
        TwoModeState xi{{y[6], y[7], y[8]}, {y[9], y[10], y[11]}};
        for (const CovBlock* b : {&xi.plus, &xi.minus}) {
            if (b->min_eig() < -1e-10 * std::max(1.0, b->frob()))
                throw IntegrationError("excess noise lost positivity at t=" + std::to_string(tb));
        }
        out.xi.push_back(xi);
    }
    return out;
}

TwoModeState unconditional_cov(const TwoModeState& sigma_c, const TwoModeState& xi) {
    return sigma_c + xi;
}

MeanTrajectory mean_trajectory(const SystemParams& p, const IntegratorConfig& cfg,
                               const FeedbackGain* gain, const PeriodicSolution& psol,
                               double t0, double t1, int steps_per_period, std::uint64_t seed,
                               const Eigen::Vector4d& x0) {
    cfg.validate();
    const double period = psol.period;
    const double dt = period / steps_per_period;
    const int n = static_cast<int>(std::ceil((t1 - t0) / dt));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double wiener_sd = std::sqrt(dt / 2.0);
    const double gm = p.gamma_m();
    const double meas = 2.0 * std::sqrt(gm); // Sc C^T W^-1 column scale per mode

    MeanTrajectory out;
    out.t.reserve(n + 1);
    out.x.reserve(n + 1);
    Eigen::Vector4d x = x0;
    out.t.push_back(t0);
    out.x.push_back(x);
    for (int i = 0; i < n; ++i) {
        const double t = t0 + i * dt;
        const TwoModeState scov = psol.at(t);
        const Eigen::Matrix2d ap = drift_plus(p);
        const Eigen::Matrix2d am = drift_minus(p, t);
        Eigen::Vector2d xp = x.head<2>(), xm = x.tail<2>();
        Eigen::Vector2d dp = ap * xp, dm = am * xm;
        if (gain) {
            dp[1] -= gain->k_plus.dot(xp);  // B u with u = -K x
            dm[1] -= gain->k_minus.dot(xm);
        }
        const double dwp = gauss(rng) * wiener_sd;
        const double dwm = gauss(rng) * wiener_sd;
        xp += dp * dt + meas * Eigen::Vector2d(scov.plus.s11, scov.plus.s12) * dwp;
        xm += dm * dt + meas * Eigen::Vector2d(scov.minus.s11, scov.minus.s12) * dwm;
        x << xp, xm;
        out.t.push_back(t + dt);
        out.x.push_back(x);
    }
    return out;
}

double lqr_cost_eval(const std::vector<MeanTrajectory>& ensemble, const SystemParams& p,
                     const FeedbackGain* gain) {
    if (ensemble.empty()) throw ParamError("lqr_cost_eval: empty ensemble");
    const EprCost cost = epr_cost_matrix(p);
    double total = 0;
    for (const MeanTrajectory& traj : ensemble) {
        double acc = 0;
        double prev = 0;
        for (std::size_t i = 0; i < traj.t.size(); ++i) {
            const Eigen::Vector2d xp = traj.x[i].head<2>(), xm = traj.x[i].tail<2>();
            double integrand = xp.dot(cost.plus * xp) + xm.dot(cost.minus * xm);
            if (gain) {
                const double up = -gain->k_plus.dot(xp);
                const double um = -gain->k_minus.dot(xm);
                integrand += p.q_effort * (up * up + um * um);
            }
            if (i > 0) acc += 0.5 * (integrand + prev) * (traj.t[i] - traj.t[i - 1]);
            prev = integrand;
        }
        total += acc;
    }
    return total / static_cast<double>(ensemble.size());
}

} // namespace entsim
