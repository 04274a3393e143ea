#include "entsim/params.hpp"

namespace entsim {

void SystemParams::validate() const {
    if (!(omega0 > 0)) throw ParamError("omega0 must be positive");
    if (!(eta > 0 && eta <= 1)) throw ParamError("eta must be in (0, 1]");
    if (!(g1 >= 0)) throw ParamError("g1 must be >= 0");
    if (!(gamma_th >= 0)) throw ParamError("gamma_th must be >= 0");
    if (!(gamma_ba >= 0)) throw ParamError("gamma_ba must be >= 0");
    if (!(gamma >= 0)) throw ParamError("gamma must be >= 0");
    if (!(q_effort > 0)) throw ParamError("q_effort must be positive");
    if (!(omega0 + 4.0 * g0 > 0))
        throw ParamError("differential mode unstable: omega0 + 4*g0 <= 0");
}

NormalizedParams NormalizedParams::from(const SystemParams& sp) {
    sp.validate();
    NormalizedParams n;
    n.p = sp;
    const double w = sp.omega0;
    n.p.omega0 = 1.0;
    n.p.g0 = sp.g0 / w;
    n.p.g1 = sp.g1 / w;
    n.p.omega_c = sp.omega_c / w;
    n.p.gamma = sp.gamma / w;
    n.p.gamma_th = sp.gamma_th / w;
    n.p.gamma_ba = sp.gamma_ba / w;
    n.p.q_effort = sp.q_effort * w; // q carries time units
    return n;
}

SystemParams NormalizedParams::denormalize(double omega0) const {
    SystemParams sp = p;
    sp.omega0 = omega0;
    sp.g0 = p.g0 * omega0;
    sp.g1 = p.g1 * omega0;
    sp.omega_c = p.omega_c * omega0;
    sp.gamma = p.gamma * omega0;
    sp.gamma_th = p.gamma_th * omega0;
    sp.gamma_ba = p.gamma_ba * omega0;
    sp.q_effort = p.q_effort / omega0;
    return sp;
}

std::pair<double, double> eigenfrequencies(const SystemParams& p) {
    const double rad = p.omega0 * p.omega0 + 4.0 * p.omega0 * p.g0;
    if (!(rad > 0)) throw ParamError("omega0 + 4*g0 <= 0: imaginary differential frequency");
    return {p.omega0, std::sqrt(rad)};
}

namespace {
Eigen::Matrix4d mode_matrix() {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Matrix4d u;
    // (X1,P1,X2,P2) -> (X+,P+,X-,P-)
    u << s, 0, s, 0,
         0, s, 0, s,
         s, 0, -s, 0,
         0, s, 0, -s;
    return u;
}
} // namespace

Eigen::Vector4d mode_transform(const Eigen::Vector4d& v) {
    return mode_matrix() * v;
}

Eigen::Matrix4d mode_transform(const Eigen::Matrix4d& cov) {
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + cov.cwiseAbs().maxCoeff()))
        throw ParamError("mode_transform: covariance must be symmetric");
    const Eigen::Matrix4d u = mode_matrix();
    Eigen::Matrix4d r = u * cov * u.transpose();
    return 0.5 * (r + r.transpose());
}

Eigen::Matrix2d drift_plus(const SystemParams& p) {
    Eigen::Matrix2d a;
    a << 0, p.omega0, -p.omega0, -p.gamma;
    return a;
}

Eigen::Matrix2d drift_minus(const SystemParams& p, double t) {
    Eigen::Matrix2d a;
    a << 0, p.omega0, -p.omega0 - 4.0 * modulated_coupling(p, t), -p.gamma;
    return a;
}

NoiseModel noise_matrices(const SystemParams& p) {
    NoiseModel n;
    n.v << 0, 0, 0, p.gamma_th + p.gamma_ba;
    n.c << std::sqrt(p.gamma_m()), 0;
    n.w = 0.5;
    return n;
}

} // namespace entsim
