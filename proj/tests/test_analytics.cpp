#include "entsim/analytics.hpp"
#include "entsim/riccati.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace entsim;

TEST_CASE("mathieu parameters at reference point") {
    const SystemParams p = testutil::reference_params();
    const auto [h, eps] = mathieu_params(p);
    CHECK(h == doctest::Approx(8.0 * 0.05 / 1.8).epsilon(1e-12)); // 8 O0 g1 / Om^2
    CHECK(eps == doctest::Approx(0.0).scale(1.0).epsilon(1e-12)); // driven at 2 Om

    const MathieuModel m = mathieu_model(p);
    CHECK(m.in_window);
    CHECK(model_applicable(m));
    CHECK(m.mu == doctest::Approx(0.14907 * p.omega0).epsilon(1e-3));
    CHECK(m.phi == doctest::Approx(M_PI / 4).epsilon(1e-12)); // tan(phi) = 1 at eps = 0
    CHECK(m.alpha_div == doctest::Approx(6.743).epsilon(2e-3));
    CHECK(m.alpha_dec > 0);
}

TEST_CASE("mathieu exponent window") {
    const SystemParams p = testutil::reference_params();
    const double om = omega_minus(p);
    const double h = 0.2;
    CHECK(mathieu_exponent(h, 0.0, om).value() == doctest::Approx(0.5 * h * om));
    CHECK(mathieu_exponent(h, h / 2, om).value() == 0.0);  // window edge
    CHECK(mathieu_exponent(h, -h / 2, om).value() == 0.0);
    CHECK_FALSE(mathieu_exponent(h, 0.6 * h, om).has_value()); // outside
    // model must not be applicable when the depth is too large
    SystemParams deep = p;
    deep.g1 = 0.2 * p.omega0; // h = 0.89
    CHECK_FALSE(model_applicable(mathieu_model(deep)));
}

TEST_CASE("floquet monodromy validates the exponent formula") {
    SystemParams p = testutil::reference_params();
    p.gamma = 0.0;
    p.g1 = 0.05 / 8.0 * 1.8 * p.omega0; // h = 0.05
    p.omega_c = 2.0 * omega_minus(p);   // eps = 0
    const MonodromyResult mr = floquet_monodromy(p);
    CHECK(std::abs(mr.det - 1.0) < 1e-10); // symplectic flow preserves phase-space volume
    const MathieuModel m = mathieu_model(p);
    CHECK(mr.mu_numeric == doctest::Approx(m.mu).epsilon(0.02));

    SystemParams damped = testutil::reference_params();
    CHECK_THROWS_AS(floquet_monodromy(damped), ParamError);
}

TEST_CASE("approximate conditional covariance carries the determinant fixed point") {
    const SystemParams p = testutil::reference_params();
    const MathieuModel m = mathieu_model(p);
    const double detfix = p.gamma_tot() / (2.0 * p.gamma_m());
    const double T = 2.0 * M_PI / p.omega_c;
    for (double t : {0.0, 0.31 * T, 0.77 * T, 2.5 * T}) {
        const CovBlock b = conditional_cov_approx(p, m, t);
        CHECK(b.det() == doctest::Approx(detfix).epsilon(1e-9));
        CHECK(b.psd(1e-12));
    }
}

TEST_CASE("common mode approximation") {
    const SystemParams p = testutil::reference_params();
    const CovBlock b = common_mode_approx(p);
    CHECK(b.s11 == doctest::Approx(std::sqrt(1.0509230769230769)).epsilon(1e-10));
    CHECK(b.s22 == doctest::Approx(b.s11));
    CHECK(b.s12 == 0.0);
    // consistent with the exact gamma = 0 closed form up to O(Gm / O0)
    SystemParams p0 = p;
    p0.gamma = 0.0;
    const CovBlock exact = common_mode_steady_state(p0);
    CHECK(std::abs(b.s11 - exact.s11) / exact.s11 < p.gamma_m() / p.omega0);
}

TEST_CASE("mode vectors are nearly orthogonal and amplitudes positive") {
    const SystemParams p = testutil::reference_params();
    const MathieuModel m = mathieu_model(p);
    const auto [adiv, adec] = mode_amplitudes(p, m);
    CHECK(adiv == doctest::Approx(m.alpha_div));
    CHECK(adec == doctest::Approx(m.alpha_dec));
    const auto [xdiv, xdec] = mode_vectors(m, p, 0.0);
    const double cosang = std::abs(xdiv.dot(xdec)) / (xdiv.norm() * xdec.norm());
    CHECK(cosang < 0.35); // "approximately orthogonal" regime

    // amplitudes are undefined exactly at the window edge
    SystemParams edge = p;
    edge.omega_c = (2.0 + m.h / 2) * omega_minus(p);
    const MathieuModel me = mathieu_model(edge);
    CHECK(me.mu == 0.0);
    CHECK_THROWS_AS(mode_amplitudes(edge, me), ParamError);
}

TEST_CASE("closed-form negativity at resonance") {
    const SystemParams p = testutil::reference_params();
    const double T = 2.0 * M_PI / p.omega_c;
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < 512; ++i) {
        const double en = closed_form_negativity(p, T * i / 512.0);
        lo = std::min(lo, en);
        hi = std::max(hi, en);
    }
    CHECK(hi == doctest::Approx(0.51772).epsilon(1e-3));
    CHECK(lo == doctest::Approx(0.22382).epsilon(1e-3));

    SystemParams off = p;
    off.omega_c = 2.05 * omega_minus(p);
    CHECK_THROWS_AS(closed_form_negativity(off, 0.0), ParamError);
}

TEST_CASE("closed form agrees with the generic analytic pipeline") {
    const SystemParams p = testutil::reference_params();
    const MathieuModel m = mathieu_model(p);
    const double T = 2.0 * M_PI / p.omega_c;
    for (double t : {0.05 * T, 0.3 * T, 0.62 * T, 0.9 * T}) {
        const double direct = closed_form_negativity(p, t);
        const double generic = analytic_negativity(p, m, t).log_neg;
        CHECK(std::abs(direct - generic) < 0.05 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("static baseline is negative") {
    const SystemParams p = testutil::reference_params();
    const double en = static_negativity(p);
    CHECK(en == doctest::Approx(-0.571035).epsilon(1e-4));
    CHECK(en < 0.0);

    // clean-limit anchor: eta -> 1, Gth -> 0, Om = O0 gives exactly -ln(2)/2
    SystemParams q = p;
    q.eta = 1.0;
    q.gamma_th = 0.0;
    q.g0 = 0.0;
    CHECK(static_negativity(q) == doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-12));

    // and the formula tracks the exact static steady state
    q = p;
    q.g1 = 0.0;
    const TwoModeState s = static_steady_state(q);
    CHECK(std::abs(static_negativity(p) - log_negativity(s.plus, s.minus).log_neg) < 0.005);
}

TEST_CASE("resonance window") {
    const SystemParams p = testutil::reference_params();
    const auto [lo, hi] = resonance_window(p);
    const double om = omega_minus(p);
    CHECK(lo == doctest::Approx(2.0 * om - 4.0 * p.omega0 * p.g1 / om).epsilon(1e-12));
    CHECK(hi == doctest::Approx(2.0 * om + 4.0 * p.omega0 * p.g1 / om).epsilon(1e-12));
    CHECK(lo < p.omega_c);
    CHECK(p.omega_c < hi);

    // drive inside the window -> in_window flag; outside -> model off
    SystemParams in = p;
    in.omega_c = 0.5 * (lo + hi) + 0.3 * (hi - lo);
    CHECK(mathieu_model(in).in_window);
    SystemParams out = p;
    out.omega_c = hi * 1.01;
    CHECK_FALSE(mathieu_model(out).in_window);
}

TEST_CASE("analytic excess noise series matches the single-time form") {
    const SystemParams p = testutil::reference_params();
    const MathieuModel m = mathieu_model(p);
    const FeedbackGain g = solve_are_gain(p);
    const double T = 2.0 * M_PI / p.omega_c;
    const double settle = 1e4 * T;
    const std::vector<double> times{0.0, 0.25 * T, 0.5 * T};
    const auto series = analytic_excess_noise_series(p, g, m, times, settle);
    REQUIRE(series.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const TwoModeState single = analytic_excess_noise(p, g, m, times[i], settle);
        CHECK(single.minus.s11 == doctest::Approx(series[i].minus.s11).epsilon(1e-10));
        CHECK(single.plus.s22 == doctest::Approx(series[i].plus.s22).epsilon(1e-10));
        CHECK(series[i].plus.psd(1e-8));
        CHECK(series[i].minus.psd(1e-8));
    }
}

TEST_CASE("noise ellipse") {
    const Ellipse e = noise_ellipse({4.0, 0.0, 1.0});
    CHECK(e.major == doctest::Approx(2.0));
    CHECK(e.minor == doctest::Approx(1.0));
    CHECK(e.angle == doctest::Approx(0.0));

    const Ellipse iso = noise_ellipse({2.25, 0.0, 2.25});
    CHECK(iso.major == doctest::Approx(1.5));
    CHECK(iso.angle == 0.0); // degenerate orientation convention

    // 45-degree correlated block
    const Ellipse rot = noise_ellipse({2.0, 1.0, 2.0});
    CHECK(rot.major == doctest::Approx(std::sqrt(3.0)));
    CHECK(rot.minor == doctest::Approx(1.0));
    CHECK(std::abs(rot.angle) == doctest::Approx(M_PI / 4));

    CHECK_THROWS_AS(noise_ellipse({1.0, 2.0, 1.0}), ParamError);
}
