#pragma once

#include "entsim/control.hpp"
#include "entsim/negativity.hpp"

#include <complex>
#include <optional>

namespace entsim {

/// Derived quantities of the parametric-resonance model for the differential
/// mode: modulation depth h = 8 O0 g1 / Om^2, detuning eps with
/// Oc = (2 + eps) Om, growth exponent mu, relative phase phi, and the two
/// Floquet-mode amplitudes.
struct MathieuModel {
    double h = 0;
    double eps = 0;
    double mu = 0;   // rad/s; 0 outside the window
    double phi = 0;  // radians; defined inside the window only
    double alpha_div = 0;
    double alpha_dec = 0;
    bool in_window = false;
};

std::pair<double, double> mathieu_params(const SystemParams& p); // (h, eps)

/// mu = Om sqrt(h^2/4 - eps^2) inside the window; nullopt outside.
std::optional<double> mathieu_exponent(double h, double eps, double omega_minus);

/// Full model assembly; amplitudes are populated only inside the window.
MathieuModel mathieu_model(const SystemParams& p);

/// True when the analytic model applies: in-window, h <= 0.5, mu > 0.
bool model_applicable(const MathieuModel& m);

struct MonodromyResult {
    std::complex<double> multipliers[2];
    double mu_numeric = 0; // 2 ln|lambda_max| / T (envelope e^{mu t / 2})
    double det = 0;        // should be 1 for the symplectic flow (gamma = 0)
};

/// Numerical Floquet oracle: one-period fundamental matrix of the undamped
/// differential-mode linear flow. Requires gamma = 0.
MonodromyResult floquet_monodromy(const SystemParams& p);

/// Envelope-stripped diverging/decaying mode vectors at time t.
std::pair<Eigen::Vector2d, Eigen::Vector2d> mode_vectors(const MathieuModel& m,
                                                         const SystemParams& p, double t);

/// alpha_div = mu / (eta Gba); alpha_dec = 2 (O0/Oc)^2 Gtot / (mu sin^2 2phi),
/// fixed by pinning the approximate determinant to Gtot / (2 eta Gba).
/// Throws at the window edge (mu = 0).
std::pair<double, double> mode_amplitudes(const SystemParams& p, const MathieuModel& m);

/// Sigma_c^-(t) ~ a_div Xdiv Xdiv^T + a_dec Xdec Xdec^T.
CovBlock conditional_cov_approx(const SystemParams& p, const MathieuModel& m, double t);

/// Common-mode approximation: diag(sqrt(Gtot / 2 eta Gba)) twice, s12 = 0.
CovBlock common_mode_approx(const SystemParams& p);

/// Compact conditional E_N(t) at exact resonance Oc = 2 Om. Throws off
/// resonance; use the generic analytic pipeline there.
double closed_form_negativity(const SystemParams& p, double t);

/// Static (g1 = 0, attractive) conditional negativity baseline.
double static_negativity(const SystemParams& p);

/// Resonance window endpoints (Oc_low, Oc_high) = 2 Om -+ 4 O0 g1 / Om.
std::pair<double, double> resonance_window(const SystemParams& p);

/// Generic in-window analytic conditional negativity at time t: feeds the
/// approximate covariance blocks through the symplectic-eigenvalue pipeline.
NegativityReport analytic_negativity(const SystemParams& p, const MathieuModel& m, double t);

/// Excess noise from the static closed-loop formal solution: per mode,
/// Xi(t) = integral of exp(F s) S(t - s) exp(F^T s) ds with S the
/// measurement-conjugated approximate conditional covariance; R(t0) = 0 and
/// t - t0 >= settle. Throws when the closed loop is not Hurwitz.
TwoModeState analytic_excess_noise(const SystemParams& p, const FeedbackGain& gain,
                                   const MathieuModel& m, double t, double settle);

/// Batched form of analytic_excess_noise sharing the propagator kernel
/// across evaluation times.
std::vector<TwoModeState> analytic_excess_noise_series(const SystemParams& p,
                                                       const FeedbackGain& gain,
                                                       const MathieuModel& m,
                                                       const std::vector<double>& times,
                                                       double settle);

struct Ellipse {
    double major = 0, minor = 0; // semi-axis lengths (standard deviations)
    double angle = 0;            // major-axis angle in (-pi/2, pi/2]
};

/// Standard-deviation noise ellipse of a PSD covariance block.
Ellipse noise_ellipse(const CovBlock& block);

} // namespace entsim
