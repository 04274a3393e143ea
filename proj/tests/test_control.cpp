#include "entsim/control.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace entsim;

TEST_CASE("epr cost matrix") {
    const double w0 = 2.0;
    const Eigen::Matrix2d p0 = epr_cost_block(0.0, w0);
    CHECK(p0(0, 0) == doctest::Approx(2.0 * w0));
    CHECK(p0(1, 1) == doctest::Approx(0.0));
    const Eigen::Matrix2d ppi = epr_cost_block(M_PI, w0);
    CHECK(ppi(0, 0) == doctest::Approx(0.0));
    CHECK(ppi(1, 1) == doctest::Approx(2.0 * w0));

    // theta = pi/2 penalizes the EPR combinations x+ + p+ and x- - p-
    SystemParams p = testutil::reference_params();
    p.theta_epr = M_PI / 2;
    const EprCost c = epr_cost_matrix(p);
    CHECK(c.plus(0, 1) == doctest::Approx(p.omega0));
    CHECK(c.minus(0, 1) == doctest::Approx(-p.omega0));
    CHECK((c.plus + c.minus - 2.0 * p.omega0 * Eigen::Matrix2d::Identity()).norm() <
          1e-12 * p.omega0);
    // rank-1 with eigenvalue 2 omega0 along the targeted quadrature
    CHECK(c.plus.determinant() == doctest::Approx(0.0).scale(p.omega0 * p.omega0));
}

TEST_CASE("are gain is stabilizing") {
    const SystemParams p = testutil::reference_params();
    const FeedbackGain g = solve_are_gain(p);
    const EprCost cost = epr_cost_matrix(p);
    CHECK(g.residual_plus < 1e-10 * cost.plus.norm());
    CHECK(g.residual_minus < 1e-10 * cost.minus.norm());
    for (const Eigen::Matrix2d& acl :
         {g.closed_loop_plus(p), g.closed_loop_minus_static(p)}) {
        const Eigen::Vector2cd e = acl.eigenvalues();
        CHECK(e[0].real() < 0);
        CHECK(e[1].real() < 0);
    }
    // gain rows reproduce Omega's momentum row over q
    CHECK(g.k_minus[0] == doctest::Approx(g.omega_minus(1, 0) / p.q_effort));
    CHECK(g.k_minus[1] == doctest::Approx(g.omega_minus(1, 1) / p.q_effort));
}

TEST_CASE("finite horizon gain converges to the are solution") {
    const SystemParams p = testutil::reference_params();
    const FeedbackGain g = solve_are_gain(p);
    SystemParams ps = p;
    ps.g1 = 0.0;
    const Eigen::Matrix2d a = drift_minus(ps, 0.0);
    const EprCost cost = epr_cost_matrix(p);

    SUBCASE("are solution is a fixed point") {
        const Eigen::Matrix2d out =
            finite_horizon_gain(a, cost.minus, p.q_effort, 20.0 / p.omega0, g.omega_minus);
        CHECK((out - g.omega_minus).norm() < 1e-6 * g.omega_minus.norm());
    }
    SUBCASE("zero terminal condition converges") {
        const double rate = std::abs(g.closed_loop_minus_static(p).eigenvalues()[0].real());
        const Eigen::Matrix2d out = finite_horizon_gain(a, cost.minus, p.q_effort, 50.0 / rate,
                                                        Eigen::Matrix2d::Zero());
        CHECK((out - g.omega_minus).norm() < 1e-6 * g.omega_minus.norm());
    }
    SUBCASE("zero cost stays zero") {
        const Eigen::Matrix2d out = finite_horizon_gain(a, Eigen::Matrix2d::Zero(), p.q_effort,
                                                        5.0 / p.omega0, Eigen::Matrix2d::Zero());
        CHECK(out.norm() == 0.0);
    }
}

TEST_CASE("excess noise rhs and lyapunov limit") {
    const SystemParams p = testutil::reference_params();
    const FeedbackGain g = solve_are_gain(p);
    const Eigen::Matrix2d acl = g.closed_loop_minus_static(p);
    const CovBlock sc{1.1, 0.1, 1.0};
    const double m = 2.0 * p.gamma_m();

    // zero source, zero state: derivative vanishes
    const CovBlock d0 = excess_noise_rhs({0, 0, 0}, acl, {0, 0, 0}, m);
    CHECK(d0.frob() == 0.0);

    // integrate with a frozen source: must land on the Lyapunov solution
    Eigen::Matrix2d src;
    src << m * sc.s11 * sc.s11, m * sc.s11 * sc.s12, m * sc.s11 * sc.s12, m * sc.s12 * sc.s12;
    const Eigen::Matrix2d expect = solve_lyapunov(acl, src);
    using Vec3 = Eigen::Vector3d;
    auto rhs = [&](double, const Vec3& y, Vec3& dy) {
        const CovBlock d = excess_noise_rhs({y[0], y[1], y[2]}, acl, sc, m);
        dy << d.s11, d.s12, d.s22;
    };
    Vec3 y = Vec3::Zero();
    integrate_rk45(rhs, 0.0, 200.0 / p.omega0, y, StepControl{1e-10, 1e-13, 0.01 / p.omega0});
    CHECK(y[0] == doctest::Approx(expect(0, 0)).epsilon(1e-6));
    CHECK(y[1] == doctest::Approx(expect(0, 1)).epsilon(1e-5));
    CHECK(y[2] == doctest::Approx(expect(1, 1)).epsilon(1e-6));
}

TEST_CASE("excess noise over a period stays psd and additive") {
    const SystemParams p = testutil::reference_params();
    const IntegratorConfig cfg = testutil::fast_integrator();
    const PeriodicSolution psol = find_periodic_steady_state(p, cfg);
    REQUIRE(psol.converged);
    const FeedbackGain g = solve_are_gain(p);
    const ExcessNoise xi = integrate_excess_noise(p, cfg, g, psol);
    CHECK(xi.converged);
    REQUIRE(xi.xi.size() == psol.samples.t.size());
    for (std::size_t i = 0; i < xi.xi.size(); i += 32) {
        CHECK(xi.xi[i].plus.psd(1e-8));
        CHECK(xi.xi[i].minus.psd(1e-8));
        const TwoModeState u = unconditional_cov(psol.samples.states[i], xi.xi[i]);
        // Sigma >= Sigma_c entrywise on the diagonal since Xi is PSD
        CHECK(u.plus.s11 >= psol.samples.states[i].plus.s11 - 1e-12);
        CHECK(u.minus.s22 >= psol.samples.states[i].minus.s22 - 1e-12);
        CHECK((u.plus - psol.samples.states[i].plus).psd(1e-8));
    }
}

TEST_CASE("mean trajectory determinism and zero-noise fixed point") {
    const SystemParams p = testutil::reference_params();
    const IntegratorConfig cfg = testutil::fast_integrator();
    const PeriodicSolution psol = find_periodic_steady_state(p, cfg);
    REQUIRE(psol.converged);
    const FeedbackGain g = solve_are_gain(p);

    const MeanTrajectory a = mean_trajectory(p, cfg, &g, psol, 0.0, 5 * psol.period, 256, 42);
    const MeanTrajectory b = mean_trajectory(p, cfg, &g, psol, 0.0, 5 * psol.period, 256, 42);
    REQUIRE(a.x.size() == b.x.size());
    double dev = 0;
    for (std::size_t i = 0; i < a.x.size(); ++i) dev = std::max(dev, (a.x[i] - b.x[i]).norm());
    CHECK(dev == 0.0); // bitwise reproducible for a fixed seed

    const MeanTrajectory c = mean_trajectory(p, cfg, &g, psol, 0.0, 5 * psol.period, 256, 43);
    double diff = 0;
    for (std::size_t i = 0; i < c.x.size(); ++i) diff = std::max(diff, (a.x[i] - c.x[i]).norm());
    CHECK(diff > 0.0);

    // the feedback cost of the controlled ensemble is finite and positive
    const double cost = lqr_cost_eval({a, c}, p, &g);
    CHECK(cost > 0.0);
    CHECK(std::isfinite(cost));
    CHECK_THROWS_AS(lqr_cost_eval({}, p, &g), ParamError);
}
