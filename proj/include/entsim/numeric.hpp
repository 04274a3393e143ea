#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace entsim {

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
};

// Dormand-Prince 5(4) embedded pair, adaptive step, FSAL not exploited.
// RHS signature: void(double t, const Vec& y, Vec& dy).
template <typename Vec, typename Rhs>
void integrate_rk45(Rhs&& rhs, double t0, double t1, Vec& y, const StepControl& sc) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (t1 == t0) return;
    const double span = t1 - t0;
    if (span < 0) throw IntegrationError("integrate_rk45: t1 < t0");

    double t = t0;
    double h = std::min(sc.max_step, span / 16.0);
    Vec k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;

    int rejects_in_a_row = 0;
    const double t_eps = 1e-14 * std::max({1.0, std::abs(t0), std::abs(t1)});
    while (t1 - t > t_eps) { // remaining span below roundoff counts as done
        h = std::min(h, t1 - t);
        if (h < t_eps)
            throw IntegrationError("integrate_rk45: step size underflow at t=" + std::to_string(t));

        rhs(t, y, k1);
        ytmp = y + h * a21 * k1;
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, ynew, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double norm = 0;
        for (int i = 0; i < y.size(); ++i) {
            const double scale = sc.abs_tol + sc.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double r = err[i] / scale;
            norm += r * r;
        }
        norm = std::sqrt(norm / static_cast<double>(y.size()));

        if (norm <= 1.0) {
            t += h;
            y = ynew;
            rejects_in_a_row = 0;
            const double fac = norm > 0 ? 0.9 * std::pow(norm, -0.2) : 5.0;
            h = std::min(sc.max_step, h * std::min(5.0, std::max(0.2, fac)));
        } else {
            if (++rejects_in_a_row > 50)
                throw IntegrationError("integrate_rk45: repeated step rejection at t=" + std::to_string(t));
            h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
        }
        if (!std::isfinite(y[0]))
            throw IntegrationError("integrate_rk45: state diverged at t=" + std::to_string(t));
    }
}

/// Stabilizing solution X of A X + X A^T + Q - X R X = 0 via the stable
/// invariant subspace of the 4x4 Hamiltonian matrix. Q, R symmetric PSD.
/// Throws when no stabilizing solution exists.
Eigen::Matrix2d solve_riccati(const Eigen::Matrix2d& a, const Eigen::Matrix2d& r,
                              const Eigen::Matrix2d& q);

/// Solution of A X + X A^T + Q = 0 (continuous Lyapunov, 2x2) by direct
/// linear solve on the 3 independent entries.
Eigen::Matrix2d solve_lyapunov(const Eigen::Matrix2d& a, const Eigen::Matrix2d& q);

/// Composite Simpson quadrature of f over [a, b] with n (even) intervals,
/// for matrix-valued integrands.
template <typename F>
auto simpson(F&& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    auto acc = f(a);
    acc += f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return (acc * (h / 3.0)).eval();
}

} // namespace entsim
