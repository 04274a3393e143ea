#include "entsim/numeric.hpp"

namespace entsim {

Eigen::Matrix2d solve_riccati(const Eigen::Matrix2d& a, const Eigen::Matrix2d& r,
                              const Eigen::Matrix2d& q) {
    const double qn = q.cwiseAbs().maxCoeff();
    if (qn == 0.0) {
        // A X + X A^T - X R X = 0 has the trivial stabilizing solution when A
        // is already stable; callers hit this for P = 0 gain problems.
        return Eigen::Matrix2d::Zero();
    }

    // The equation in X is the standard CARE F^T X + X F + Q - X R X = 0 with
    // F = A^T; Hamiltonian H = [[F, -R], [-Q, -F^T]].
    Eigen::Matrix4d ham;
    ham.topLeftCorner<2, 2>() = a.transpose();
    ham.topRightCorner<2, 2>() = -r;
    ham.bottomLeftCorner<2, 2>() = -q;
    ham.bottomRightCorner<2, 2>() = -a;

    Eigen::EigenSolver<Eigen::Matrix4d> es(ham);
    if (es.info() != Eigen::Success) throw IntegrationError("solve_riccati: eigensolver failed");

    Eigen::Matrix<std::complex<double>, 4, 2> basis;
    int found = 0;
    for (int i = 0; i < 4 && found < 2; ++i) {
        if (es.eigenvalues()[i].real() < 0) basis.col(found++) = es.eigenvectors().col(i);
    }
    if (found < 2) throw IntegrationError("solve_riccati: no stabilizing solution (stable subspace deficient)");

    const Eigen::Matrix2cd u = basis.topRows<2>();
    const Eigen::Matrix2cd v = basis.bottomRows<2>();
    Eigen::FullPivLU<Eigen::Matrix2cd> lu(u);
    if (!lu.isInvertible()) throw IntegrationError("solve_riccati: singular subspace basis");
    const Eigen::Matrix2cd xc = v * lu.inverse();
    Eigen::Matrix2d x = xc.real();
    x = 0.5 * (x + x.transpose()).eval();

    const Eigen::Matrix2d resid = a * x + x * a.transpose() + q - x * r * x;
    const double scale = std::max(1.0, x.norm());
    if (resid.norm() > 1e-8 * scale * std::max(1.0, a.norm()))
        throw IntegrationError("solve_riccati: residual check failed");
    return x;
}

Eigen::Matrix2d solve_lyapunov(const Eigen::Matrix2d& a, const Eigen::Matrix2d& q) {
    // Unknowns (x11, x12, x22); rows are the (1,1), (1,2), (2,2) components
    // of A X + X A^T + Q = 0.
    Eigen::Matrix3d m;
    m << 2 * a(0, 0), 2 * a(0, 1), 0,
         a(1, 0), a(0, 0) + a(1, 1), a(0, 1),
         0, 2 * a(1, 0), 2 * a(1, 1);
    Eigen::Vector3d rhs(-q(0, 0), -q(0, 1), -q(1, 1));
    Eigen::Vector3d sol = m.fullPivLu().solve(rhs);
    Eigen::Matrix2d x;
    x << sol[0], sol[1], sol[1], sol[2];
    return x;
}

} // namespace entsim
