#pragma once

#include "entsim/params.hpp"
#include "entsim/riccati.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace entsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raw, caption-style system description as it appears in config files.
/// Frequencies are quoted in Hz (omega0_hz is Omega0/2pi); couplings and the
/// modulation frequency are relative; q is in seconds.
struct SystemSpec {
    double omega0_hz = 29.4e3;
    double g0_rel = 0.2;  // g0 / omega0
    double g1_rel = 0.0;  // g1 / omega0
    std::optional<double> omega_c_rel;               // omega_c / omega0
    std::optional<double> omega_c_over_omega_minus;  // omega_c / omega_minus
    double gamma_hz = 0.0;
    double gamma_th_hz = 0.0;
    double gamma_ba_hz = 0.0;
    double eta = 1.0;
    double q_effort_s = 1.0;
    double theta_epr = M_PI;
    bool rates_are_angular = true; // multiply quoted lab rates by 2*pi

    SystemParams build() const;
    void set(const std::string& name, double value);
    double get(const std::string& name) const;
    static const std::vector<std::string>& sweepable();
};

enum class ExperimentKind { Trace, Sweep1d, Sweep2d, Ellipse, Compare };

struct SweepAxis {
    std::string param;
    double min = 0, max = 0;
    int count = 0;
    bool log_scale = false;

    std::vector<double> values() const;
};

struct OutputConfig {
    std::string dir = "out";
    bool csv = true;
    bool json = false;
    bool plot = false;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Trace;
    SystemSpec system;
    IntegratorConfig integrator;
    std::vector<SweepAxis> axes;
    OutputConfig output;
    int workers = 0; // 0: serial
    std::uint64_t seed = 1;

    void validate() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Built-in presets encoding the reference parameter sets: fig2, fig3, fig4a,
/// fig4b, fig5, fig6, fig7.
nlohmann::json preset_json(const std::string& name);
std::vector<std::string> preset_names();

const char* kind_name(ExperimentKind k);

} // namespace entsim
