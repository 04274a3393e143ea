#include "entsim/config.hpp"

#include <doctest.h>

#include <fstream>

using namespace entsim;
using nlohmann::json;

namespace {

json minimal_config() {
    return json{{"experiment", "trace"},
                {"system",
                 {{"omega0_hz", 29.4e3},
                  {"g0_rel", 0.2},
                  {"g1_rel", 0.05},
                  {"omega_c_over_omega_minus", 2.0},
                  {"gamma_th_hz", 66.2},
                  {"gamma_ba_hz", 1300.0},
                  {"eta", 0.5},
                  {"q_effort_s", 1.08e-6}}}};
}

} // namespace

TEST_CASE("system spec builds angular-frequency parameters") {
    ExperimentConfig cfg = parse_config(minimal_config());
    const SystemParams p = cfg.system.build();
    CHECK(p.omega0 == doctest::Approx(2 * M_PI * 29.4e3));
    CHECK(p.g0 == doctest::Approx(0.2 * p.omega0));
    CHECK(p.gamma_ba == doctest::Approx(2 * M_PI * 1300.0)); // lab rates quoted in Hz
    CHECK(p.omega_c == doctest::Approx(2.0 * omega_minus(p)));

    // opting out of the 2*pi convention keeps rates as bare s^-1
    json j = minimal_config();
    j["system"]["rates_are_angular"] = false;
    const SystemParams bare = parse_config(j).system.build();
    CHECK(bare.gamma_ba == doctest::Approx(1300.0));
    CHECK(bare.omega0 == doctest::Approx(p.omega0)); // omega0 stays angular either way
}

TEST_CASE("config rejects malformed input") {
    json j = minimal_config();
    j["system"].erase("eta");
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = minimal_config();
    j["system"]["unknown_knob"] = 1.0;
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = minimal_config();
    j["experiment"] = "wibble";
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = minimal_config();
    j["system"]["omega_c_rel"] = 2.7; // conflicts with omega_c_over_omega_minus
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = minimal_config();
    j["experiment"] = "sweep1d"; // missing axes
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = minimal_config();
    j["experiment"] = "sweep1d";
    j["sweep"] = {{"axes", {{{"param", "no_such"}, {"min", 0.1}, {"max", 1.0}, {"count", 5}}}}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("sweep axis value generation") {
    SweepAxis lin{"eta", 0.1, 0.9, 5, false};
    const auto lv = lin.values();
    REQUIRE(lv.size() == 5);
    CHECK(lv.front() == doctest::Approx(0.1));
    CHECK(lv[2] == doctest::Approx(0.5));
    CHECK(lv.back() == doctest::Approx(0.9));

    SweepAxis lg{"g1_rel", 0.001, 0.1, 3, true};
    const auto gv = lg.values();
    CHECK(gv[1] == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("set and get round trip") {
    SystemSpec s;
    for (const std::string& name : SystemSpec::sweepable()) {
        if (name == "omega_c_rel" || name == "omega_c_over_omega_minus") continue;
        s.set(name, 0.123);
        CHECK(s.get(name) == doctest::Approx(0.123));
    }
    s.set("omega_c_rel", 2.7);
    CHECK(s.get("omega_c_rel") == doctest::Approx(2.7));
    s.set("omega_c_over_omega_minus", 2.0); // switching clears the other form
    CHECK(std::isnan(s.get("omega_c_rel")));
    CHECK_THROWS_AS(s.set("bogus", 1.0), ConfigError);
}

TEST_CASE("presets parse and validate") {
    for (const std::string& name : preset_names()) {
        CAPTURE(name);
        ExperimentConfig cfg = parse_config(preset_json(name));
        CHECK_NOTHROW(cfg.validate());
        CHECK_NOTHROW(cfg.system.build());
    }
    CHECK_THROWS_AS(preset_json("fig99"), ConfigError);

    const ExperimentConfig f5 = parse_config(preset_json("fig5"));
    CHECK(f5.kind == ExperimentKind::Sweep2d);
    REQUIRE(f5.axes.size() == 2);
    CHECK(f5.axes[0].param == "omega_c_rel");
    CHECK(f5.axes[1].param == "g1_rel");

    const ExperimentConfig f4b = parse_config(preset_json("fig4b"));
    CHECK(f4b.system.g0_rel < 0); // repulsive variant
}

TEST_CASE("config file loading") {
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
    const std::string path = "/tmp/entsim_test_config.json";
    {
        std::ofstream out(path);
        out << minimal_config().dump();
    }
    const ExperimentConfig cfg = load_config(path);
    CHECK(cfg.kind == ExperimentKind::Trace);
    {
        std::ofstream out(path);
        out << "{not json";
    }
    CHECK_THROWS_AS(load_config(path), ConfigError);
}
