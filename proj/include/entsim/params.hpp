#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace entsim {

// How quoted lab rates were interpreted on ingestion: either multiplied by
// 2*pi (uniform angular convention) or taken as bare s^-1.
enum class RateConvention { AngularTimes2Pi, BarePerSecond };

/// Physical parameters of the two-particle system. All rates and frequencies
/// are angular (rad/s); only their ratios enter the dynamics.
struct SystemParams {
    double omega0 = 1.0;     // trap frequency Omega_0
    double g0 = 0.0;         // static coupling, sign = attractive(+)/repulsive(-)
    double g1 = 0.0;         // modulation amplitude, >= 0
    double omega_c = 0.0;    // modulation frequency
    double gamma = 0.0;      // mechanical damping
    double gamma_th = 0.0;   // thermal decoherence rate
    double gamma_ba = 0.0;   // back-action decoherence rate
    double eta = 1.0;        // detection efficiency, (0, 1]
    double q_effort = 1.0;   // control effort q (seconds)
    double theta_epr = M_PI; // cost-matrix angle
    RateConvention rate_convention = RateConvention::AngularTimes2Pi;

    // Measurement (information) rate; derived, never stored.
    double gamma_m() const { return eta * gamma_ba; }
    double gamma_tot() const { return gamma_th + gamma_ba; }

    void validate() const;
};

/// SystemParams with every rate divided by omega0; time is tau = Omega_0 * t.
struct NormalizedParams {
    SystemParams p; // p.omega0 == 1

    static NormalizedParams from(const SystemParams& sp);
    SystemParams denormalize(double omega0) const;
};

/// 2x2 real symmetric covariance block of one normal mode.
struct CovBlock {
    double s11 = 0.0, s12 = 0.0, s22 = 0.0;

    Eigen::Matrix2d mat() const {
        Eigen::Matrix2d m;
        m << s11, s12, s12, s22;
        return m;
    }
    static CovBlock from_mat(const Eigen::Matrix2d& m) {
        return {m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1)};
    }
    double det() const { return s11 * s22 - s12 * s12; }
    double trace() const { return s11 + s22; }
    double frob() const { return std::sqrt(s11 * s11 + 2 * s12 * s12 + s22 * s22); }
    double min_eig() const {
        const double h = 0.5 * (s11 + s22);
        return h - std::sqrt(0.25 * (s11 - s22) * (s11 - s22) + s12 * s12);
    }
    bool psd(double tol = 1e-10) const { return min_eig() >= -tol; }

    CovBlock operator+(const CovBlock& o) const { return {s11 + o.s11, s12 + o.s12, s22 + o.s22}; }
    CovBlock operator-(const CovBlock& o) const { return {s11 - o.s11, s12 - o.s12, s22 - o.s22}; }
    CovBlock operator*(double c) const { return {c * s11, c * s12, c * s22}; }
};

/// Block-diagonal two-mode covariance: common (+) and differential (-) blocks.
struct TwoModeState {
    CovBlock plus, minus;

    TwoModeState operator+(const TwoModeState& o) const { return {plus + o.plus, minus + o.minus}; }
    TwoModeState operator-(const TwoModeState& o) const { return {plus - o.plus, minus - o.minus}; }
    TwoModeState operator*(double c) const { return {plus * c, minus * c}; }
};

struct ParamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// g(t) = g0 + 2 g1 cos(Omega_c t)
inline double modulated_coupling(const SystemParams& p, double t) {
    return p.g0 + 2.0 * p.g1 * std::cos(p.omega_c * t);
}

/// Normal-mode eigenfrequencies (Omega_+, Omega_-). Throws when the
/// differential mode is unstable (Omega_0 + 4 g0 <= 0).
std::pair<double, double> eigenfrequencies(const SystemParams& p);

inline double omega_minus(const SystemParams& p) { return eigenfrequencies(p).second; }

/// Map a particle-basis 4-vector (X1,P1,X2,P2) to the normal-mode basis
/// (X+,P+,X-,P-): x_pm = (x1 +- x2)/sqrt(2).
Eigen::Vector4d mode_transform(const Eigen::Vector4d& v);

/// Congruence transform of a symmetric 4x4 covariance to the normal-mode
/// basis. Rejects non-symmetric input.
Eigen::Matrix4d mode_transform(const Eigen::Matrix4d& cov);

/// Common-mode drift block A^+ = [[0, O0], [-O0, -gamma]].
Eigen::Matrix2d drift_plus(const SystemParams& p);

/// Differential-mode drift block A^-(t) = [[0, O0], [-O0 - 4 g(t), -gamma]].
Eigen::Matrix2d drift_minus(const SystemParams& p, double t);

/// Per-mode noise model: diffusion V = diag(0, G_th + G_ba), measurement row
/// C = sqrt(eta G_ba) (1, 0), W = 1/2. The induced Riccati quadratic term is
/// C^T W^-1 C = diag(2 eta G_ba, 0).
struct NoiseModel {
    Eigen::Matrix2d v;
    Eigen::RowVector2d c;
    double w;
    Eigen::Matrix2d quadratic() const { return c.transpose() * (1.0 / w) * c; }
};

NoiseModel noise_matrices(const SystemParams& p);

} // namespace entsim
