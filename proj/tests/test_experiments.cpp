#include "entsim/experiments.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace entsim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("entsim_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("evaluate_point at the reference parameters") {
    const PointResult r =
        evaluate_point(testutil::reference_params(), testutil::fast_integrator(), {});
    CHECK(r.status == 0);
    CHECK(r.in_window);
    CHECK(r.applicable);
    CHECK(r.en_cond_avg > 0.0);
    CHECK(std::isfinite(r.en_uncond_avg));
    CHECK(std::abs(r.en_cond_avg - r.en_cond_ana_avg) < 0.15);
}

TEST_CASE("evaluate_point failure is recorded, not thrown") {
    SystemParams p = testutil::reference_params();
    p.eta = 1e-12; // no measurement: the parametric drive diverges
    IntegratorConfig cfg = testutil::fast_integrator();
    cfg.max_periods = 40;
    PointResult r;
    CHECK_NOTHROW(r = evaluate_point(p, cfg, {}));
    CHECK(r.status != 0);
    CHECK_FALSE(r.message.empty());
}

TEST_CASE("parallel grid evaluation is bit-identical to the serial reference") {
    IntegratorConfig cfg = testutil::fast_integrator();
    std::vector<SystemParams> points;
    for (double eta : {0.3, 0.5, 0.8, 1.0}) {
        SystemParams p = testutil::reference_params();
        p.eta = eta;
        points.push_back(p);
    }
    const auto serial = evaluate_grid_serial(points, cfg, {});
    const auto parallel = evaluate_grid_parallel(points, cfg, {}, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].status == parallel[i].status);
        CHECK(std::memcmp(&serial[i].en_cond_avg, &parallel[i].en_cond_avg, sizeof(double)) == 0);
        CHECK(std::memcmp(&serial[i].en_uncond_avg, &parallel[i].en_uncond_avg,
                          sizeof(double)) == 0);
        CHECK(std::memcmp(&serial[i].en_cond_ana_avg, &parallel[i].en_cond_ana_avg,
                          sizeof(double)) == 0);
    }
    // higher efficiency extracts more entanglement from the record
    CHECK(serial.back().en_cond_avg > serial.front().en_cond_avg);
}

TEST_CASE("trace experiment writes csv and svg") {
    TempDir tmp;
    ExperimentConfig cfg = parse_config(preset_json("fig4a"));
    cfg.integrator = testutil::fast_integrator();
    cfg.output.dir = (tmp.path / "trace").string();
    cfg.output.plot = true;
    CHECK(run_trace(cfg) == RunStatus::Ok);
    CHECK(fs::exists(tmp.path / "trace" / "trace.csv"));
    CHECK(fs::exists(tmp.path / "trace" / "trace.svg"));

    // the emitted covariance columns must allow E_N to be recomputed
    std::ifstream in(tmp.path / "trace" / "trace.csv");
    std::string line;
    while (std::getline(in, line) && (line.empty() || line[0] == '#' || line[0] == 't')) {}
    REQUIRE_FALSE(line.empty());
    std::vector<double> row;
    std::istringstream fields(line);
    for (std::string cell; std::getline(fields, cell, ',');) row.push_back(std::stod(cell));
    REQUIRE(row.size() == 17);
    const CovBlock plus{row[5], row[6], row[7]}, minus{row[8], row[9], row[10]};
    CHECK(log_negativity(plus, minus).log_neg == doctest::Approx(row[1]).epsilon(1e-10));
}

TEST_CASE("sweep1d experiment records per-point status") {
    TempDir tmp;
    ExperimentConfig cfg = parse_config(preset_json("fig2"));
    cfg.integrator = testutil::fast_integrator();
    cfg.axes[0].count = 4;
    cfg.workers = 2;
    cfg.output.dir = (tmp.path / "sweep").string();
    const RunStatus st = run_sweep1d(cfg);
    CHECK(st == RunStatus::Ok);
    std::ifstream in(tmp.path / "sweep" / "sweep1d.csv");
    REQUIRE(in.good());
    std::string line;
    int data_rows = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            CHECK(line.rfind("eta,", 0) == 0);
            saw_header = true;
        } else {
            ++data_rows;
        }
    }
    CHECK(data_rows == 4);
}

TEST_CASE("ellipse and compare experiments produce their artifacts") {
    TempDir tmp;
    ExperimentConfig cfg = parse_config(preset_json("fig3"));
    cfg.integrator = testutil::fast_integrator();
    cfg.output.dir = (tmp.path / "ellipse").string();
    cfg.output.plot = true;
    CHECK(run_ellipse(cfg) == RunStatus::Ok);
    CHECK(fs::exists(tmp.path / "ellipse" / "ellipse.csv"));
    CHECK(fs::exists(tmp.path / "ellipse" / "ellipse.svg"));

    ExperimentConfig ccfg = parse_config(preset_json("fig4a"));
    ccfg.kind = ExperimentKind::Compare;
    ccfg.integrator = testutil::fast_integrator();
    ccfg.output.dir = (tmp.path / "compare").string();
    CHECK(run_compare(ccfg) == RunStatus::Ok);
    std::ifstream in(tmp.path / "compare" / "compare.json");
    REQUIRE(in.good());
    nlohmann::json rep;
    in >> rep;
    CHECK(rep.at("converged").get<bool>());
    CHECK(rep.at("analytic_applicable").get<bool>());
    CHECK(rep.at("conditional").at("available").get<bool>());
    CHECK(rep.at("conditional").at("period_avg_abs_error").get<double>() < 0.15);
}
