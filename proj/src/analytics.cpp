#include "entsim/analytics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <functional>

namespace entsim {

std::pair<double, double> mathieu_params(const SystemParams& p) {
    const double om = omega_minus(p);
    const double h = 8.0 * p.omega0 * p.g1 / (om * om);
    const double eps = p.omega_c / om - 2.0;
    return {h, eps};
}

std::optional<double> mathieu_exponent(double h, double eps, double om) {
    const double rad = 0.25 * h * h - eps * eps;
    if (rad < 0) return std::nullopt;
    return om * std::sqrt(rad); // 0 at the window edge
}

MathieuModel mathieu_model(const SystemParams& p) {
    MathieuModel m;
    const double om = omega_minus(p);
    std::tie(m.h, m.eps) = mathieu_params(p);
    const auto mu = mathieu_exponent(m.h, m.eps, om);
    m.in_window = mu.has_value();
    if (!m.in_window) return m;
    m.mu = *mu;
    m.phi = std::atan(std::sqrt((m.h - 2.0 * m.eps) / (m.h + 2.0 * m.eps)));
    if (m.mu > 0) std::tie(m.alpha_div, m.alpha_dec) = mode_amplitudes(p, m);
    return m;
}

bool model_applicable(const MathieuModel& m) {
    return m.in_window && m.h <= 0.5 && m.mu > 0;
}

MonodromyResult floquet_monodromy(const SystemParams& p) {
    if (p.gamma != 0)
        throw ParamError("floquet_monodromy requires gamma = 0 (homogeneous Mathieu system)");
    if (!(p.omega_c > 0)) throw ParamError("floquet_monodromy requires omega_c > 0");
    const double period = 2.0 * M_PI / p.omega_c;

    using Vec4 = Eigen::Vector4d; // column-major fundamental matrix
    auto rhs = [&](double t, const Vec4& y, Vec4& dy) {
        const double k = p.omega0 + 4.0 * modulated_coupling(p, t);
        // d/dt [x; px] = [[0, O0], [-k, 0]] [x; px], two columns
        dy[0] = p.omega0 * y[1];
        dy[1] = -k * y[0];
        dy[2] = p.omega0 * y[3];
        dy[3] = -k * y[2];
    };
    Vec4 y;
    y << 1, 0, 0, 1;
    integrate_rk45(rhs, 0.0, period, y, StepControl{1e-12, 1e-14, period / 64});

    Eigen::Matrix2d mono;
    mono << y[0], y[2], y[1], y[3];
    Eigen::EigenSolver<Eigen::Matrix2d> es(mono);
    MonodromyResult r;
    r.multipliers[0] = es.eigenvalues()[0];
    r.multipliers[1] = es.eigenvalues()[1];
    r.det = mono.determinant();
    // solutions grow as e^{mu t / 2}, so the exponent is twice the per-period
    // logarithmic growth of the largest multiplier
    r.mu_numeric =
        2.0 * std::log(std::max(std::abs(r.multipliers[0]), std::abs(r.multipliers[1]))) / period;
    return r;
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> mode_vectors(const MathieuModel& m,
                                                         const SystemParams& p, double t) {
    if (!m.in_window) throw ParamError("mode_vectors: parameters outside the resonance window");
    const double half = 0.5 * p.omega_c;
    const double ratio = half / p.omega0;
    const Eigen::Vector2d div(std::cos(half * t + m.phi), -ratio * std::sin(half * t + m.phi));
    const Eigen::Vector2d dec(std::cos(half * t - m.phi), -ratio * std::sin(half * t - m.phi));
    return {div, dec};
}

std::pair<double, double> mode_amplitudes(const SystemParams& p, const MathieuModel& m) {
    if (!m.in_window || !(m.mu > 0))
        throw ParamError("mode_amplitudes: undefined at or outside the window edge (mu = 0)");
    const double a_div = m.mu / p.gamma_m();
    const double s2 = std::sin(2.0 * m.phi);
    const double ratio = p.omega0 / p.omega_c;
    // no efficiency factor here: requiring the approximate determinant to sit
    // on the fixed point Gtot / (2 eta Gba) cancels the eta carried by a_div
    const double a_dec = 2.0 * ratio * ratio * p.gamma_tot() / (m.mu * s2 * s2);
    return {a_div, a_dec};
}

CovBlock conditional_cov_approx(const SystemParams& p, const MathieuModel& m, double t) {
    const auto [xdiv, xdec] = mode_vectors(m, p, t);
    const Eigen::Matrix2d s =
        m.alpha_div * xdiv * xdiv.transpose() + m.alpha_dec * xdec * xdec.transpose();
    return CovBlock::from_mat(s);
}

CovBlock common_mode_approx(const SystemParams& p) {
    const double s = std::sqrt(p.gamma_tot() / (2.0 * p.gamma_m()));
    return {s, 0.0, s};
}

double closed_form_negativity(const SystemParams& p, double t) {
    const double om = omega_minus(p);
    if (std::abs(p.omega_c - 2.0 * om) > 1e-9 * p.omega0)
        throw ParamError("closed_form_negativity is defined at exact resonance omega_c = 2*omega_minus");
    const double gtot = p.gamma_tot();
    const double common = std::sqrt(gtot / (2.0 * p.gamma_m()));
    const double s = std::sin(om * t - M_PI / 4.0);
    const double bracket = (gtot / (2.0 * p.g1)) * (p.omega0 / om) *
                           (1.0 + 4.0 * p.g0 / p.omega0 * s * s);
    return -0.5 * std::log(common) - 0.5 * std::log(bracket);
}

double static_negativity(const SystemParams& p) {
    // smaller symplectic eigenvalue of the static (g1 = 0) steady state:
    // lambda2 = (O0/Om) sqrt(Gtot / 2 eta Gba); the inner factor is fixed by
    // the eta -> 1, Gth -> 0 limit E_N -> -ln(2)/2 and by the exact steady
    // state of the Riccati equation
    const double om = omega_minus(p);
    const double common = std::sqrt(p.gamma_tot() / (2.0 * p.gamma_m()));
    return -0.5 * std::log(common) - 0.5 * std::log(4.0 * (p.omega0 / om) * common);
}

std::pair<double, double> resonance_window(const SystemParams& p) {
    const double om = omega_minus(p);
    const double half_width = 4.0 * p.omega0 * p.g1 / om;
    return {2.0 * om - half_width, 2.0 * om + half_width};
}

NegativityReport analytic_negativity(const SystemParams& p, const MathieuModel& m, double t) {
    return log_negativity(common_mode_approx(p), conditional_cov_approx(p, m, t));
}

namespace {

// Xi(t) = int_0^smax exp(F s) S(t - s) exp(F^T s) ds, composite Simpson with
// the propagator kernel precomputed once per s grid so a whole series of
// evaluation times shares it.
std::vector<Eigen::Matrix2d> xi_mode_series(const Eigen::Matrix2d& acl, double two_gm,
                                            const std::function<CovBlock(double)>& sigma_c,
                                            const std::vector<double>& times, double settle,
                                            double source_period) {
    Eigen::EigenSolver<Eigen::Matrix2d> es(acl);
    const double rate = -std::max(es.eigenvalues()[0].real(), es.eigenvalues()[1].real());
    if (!(rate > 0)) throw IntegrationError("analytic_excess_noise: closed loop is not Hurwitz");
    const double smax = std::min(settle, 40.0 / rate);

    int n = std::max(256, static_cast<int>(256.0 * smax / source_period));
    n = std::min(n, 32768);
    if (n % 2) ++n;
    const double h = smax / n;

    std::vector<Eigen::Matrix2d> kernel(n + 1);
    for (int k = 0; k <= n; ++k) kernel[k] = (acl * (k * h)).exp();

    std::vector<Eigen::Matrix2d> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
        for (int k = 0; k <= n; ++k) {
            const CovBlock sc = sigma_c(times[i] - k * h);
            Eigen::Matrix2d src;
            src << sc.s11 * sc.s11, sc.s11 * sc.s12, sc.s11 * sc.s12, sc.s12 * sc.s12;
            const double wgt = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
            acc += wgt * (kernel[k] * src * kernel[k].transpose());
        }
        out[i] = (two_gm * h / 3.0) * acc;
    }
    return out;
}

} // namespace

std::vector<TwoModeState> analytic_excess_noise_series(const SystemParams& p,
                                                       const FeedbackGain& gain,
                                                       const MathieuModel& m,
                                                       const std::vector<double>& times,
                                                       double settle) {
    const double two_gm = 2.0 * p.gamma_m();
    const double period = 2.0 * M_PI / p.omega_c;
    const CovBlock plus_cov = common_mode_approx(p);
    const auto plus = xi_mode_series(
        gain.closed_loop_plus(p), two_gm, [&](double) { return plus_cov; }, times, settle, period);
    const auto minus = xi_mode_series(
        gain.closed_loop_minus_static(p), two_gm,
        [&](double s) { return conditional_cov_approx(p, m, s); }, times, settle, period);
    std::vector<TwoModeState> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        out[i] = {CovBlock::from_mat(plus[i]), CovBlock::from_mat(minus[i])};
    return out;
}

TwoModeState analytic_excess_noise(const SystemParams& p, const FeedbackGain& gain,
                                   const MathieuModel& m, double t, double settle) {
    return analytic_excess_noise_series(p, gain, m, {t}, settle).front();
}

Ellipse noise_ellipse(const CovBlock& block) {
    if (!block.psd(1e-10 * std::max(1.0, block.frob())))
        throw ParamError("noise_ellipse: block must be PSD");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block.mat());
    const double l0 = std::max(0.0, es.eigenvalues()[0]); // ascending order
    const double l1 = std::max(0.0, es.eigenvalues()[1]);
    Ellipse e;
    e.major = std::sqrt(l1);
    e.minor = std::sqrt(l0);
    if (l1 - l0 < 1e-14 * std::max(1.0, l1)) {
        e.angle = 0.0; // degenerate: orientation by convention
    } else {
        const Eigen::Vector2d v = es.eigenvectors().col(1);
        e.angle = std::atan2(v[1], v[0]);
        if (e.angle <= -M_PI / 2) e.angle += M_PI;
        if (e.angle > M_PI / 2) e.angle -= M_PI;
    }
    return e;
}

} // namespace entsim
