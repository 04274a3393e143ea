#pragma once

#include "entsim/config.hpp"

namespace entsim::testutil {

/// Reference parameter set used throughout the tests: Omega0/2pi = 29.4 kHz,
/// g0 = 0.2 Omega0, g1 = 0.05 Omega0, Omega_c = 2 Omega_-, gamma_th = 66.2 Hz,
/// gamma_ba = 1.3 kHz, eta = 0.5, q = 1.08 us, theta = pi.
inline SystemParams reference_params() {
    return parse_config(preset_json("fig2")).system.build();
}

inline IntegratorConfig fast_integrator() {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-8;
    cfg.abs_tol = 1e-10;
    return cfg;
}

} // namespace entsim::testutil
