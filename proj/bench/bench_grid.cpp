// Compares the serial reference grid evaluation against the OpenMP path on a
// small eta x omega_c grid and checks that the results are identical.

#include "entsim/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

using Clock = std::chrono::steady_clock;

int main(int argc, char** argv) {
    int nx = 6, ny = 4;
    if (argc > 2) {
        nx = std::atoi(argv[1]);
        ny = std::atoi(argv[2]);
    }

    entsim::ExperimentConfig cfg = entsim::parse_config(entsim::preset_json("fig2"));
    cfg.integrator.rel_tol = 1e-8;
    cfg.integrator.abs_tol = 1e-10;

    std::vector<entsim::SystemParams> points;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            entsim::SystemSpec spec = cfg.system;
            spec.set("eta", 0.3 + 0.7 * i / (nx - 1.0));
            spec.set("omega_c_over_omega_minus", 1.99 + 0.02 * j / (ny - 1.0));
            points.push_back(spec.build());
        }
    }
    std::printf("grid: %d x %d = %zu points\n", nx, ny, points.size());

    const entsim::EvalOptions opt;
    const auto t0 = Clock::now();
    const auto serial = entsim::evaluate_grid_serial(points, cfg.integrator, opt);
    const auto t1 = Clock::now();
    const auto parallel = entsim::evaluate_grid_parallel(points, cfg.integrator, opt, 0);
    const auto t2 = Clock::now();

    const double ts = std::chrono::duration<double>(t1 - t0).count();
    const double tp = std::chrono::duration<double>(t2 - t1).count();
    std::printf("serial:   %8.3f s\n", ts);
#ifdef _OPENMP
    std::printf("parallel: %8.3f s  (%d threads, speedup %.2fx)\n", tp, omp_get_max_threads(),
                ts / tp);
#else
    std::printf("parallel: %8.3f s  (OpenMP unavailable; serial fallback)\n", tp);
#endif

    int mismatches = 0;
    for (std::size_t i = 0; i < serial.size(); ++i) {
        const bool same =
            serial[i].status == parallel[i].status &&
            std::memcmp(&serial[i].en_cond_avg, &parallel[i].en_cond_avg, sizeof(double)) == 0 &&
            std::memcmp(&serial[i].en_uncond_avg, &parallel[i].en_uncond_avg, sizeof(double)) == 0;
        if (!same) ++mismatches;
    }
    std::printf("bitwise mismatches: %d\n", mismatches);
    return mismatches == 0 ? 0 : 1;
}
