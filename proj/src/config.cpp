#include "entsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace entsim {

using nlohmann::json;

SystemParams SystemSpec::build() const {
    const double two_pi = 2.0 * M_PI;
    const double factor = rates_are_angular ? two_pi : 1.0;
    SystemParams p;
    p.omega0 = two_pi * omega0_hz; // quoted as Omega0/2pi, always angular
    p.g0 = g0_rel * p.omega0;
    p.g1 = g1_rel * p.omega0;
    p.gamma = factor * gamma_hz;
    p.gamma_th = factor * gamma_th_hz;
    p.gamma_ba = factor * gamma_ba_hz;
    p.eta = eta;
    p.q_effort = q_effort_s;
    p.theta_epr = theta_epr;
    p.rate_convention =
        rates_are_angular ? RateConvention::AngularTimes2Pi : RateConvention::BarePerSecond;
    if (omega_c_rel && omega_c_over_omega_minus)
        throw ConfigError("system: specify only one of omega_c_rel, omega_c_over_omega_minus");
    if (omega_c_rel) {
        p.omega_c = *omega_c_rel * p.omega0;
    } else if (omega_c_over_omega_minus) {
        p.omega_c = *omega_c_over_omega_minus * omega_minus(p);
    } else {
        p.omega_c = 0.0;
    }
    p.validate();
    return p;
}

const std::vector<std::string>& SystemSpec::sweepable() {
    static const std::vector<std::string> names = {
        "eta",          "g0_rel",       "g1_rel",     "omega_c_rel",
        "omega_c_over_omega_minus",     "gamma_hz",   "gamma_th_hz",
        "gamma_ba_hz",  "q_effort_s",   "theta_epr"};
    return names;
}

void SystemSpec::set(const std::string& name, double value) {
    if (name == "eta") eta = value;
    else if (name == "g0_rel") g0_rel = value;
    else if (name == "g1_rel") g1_rel = value;
    else if (name == "omega_c_rel") { omega_c_rel = value; omega_c_over_omega_minus.reset(); }
    else if (name == "omega_c_over_omega_minus") { omega_c_over_omega_minus = value; omega_c_rel.reset(); }
    else if (name == "gamma_hz") gamma_hz = value;
    else if (name == "gamma_th_hz") gamma_th_hz = value;
    else if (name == "gamma_ba_hz") gamma_ba_hz = value;
    else if (name == "q_effort_s") q_effort_s = value;
    else if (name == "theta_epr") theta_epr = value;
    else throw ConfigError("unknown sweep parameter: " + name);
}

double SystemSpec::get(const std::string& name) const {
    if (name == "eta") return eta;
    if (name == "g0_rel") return g0_rel;
    if (name == "g1_rel") return g1_rel;
    if (name == "omega_c_rel") return omega_c_rel.value_or(std::nan(""));
    if (name == "omega_c_over_omega_minus") return omega_c_over_omega_minus.value_or(std::nan(""));
    if (name == "gamma_hz") return gamma_hz;
    if (name == "gamma_th_hz") return gamma_th_hz;
    if (name == "gamma_ba_hz") return gamma_ba_hz;
    if (name == "q_effort_s") return q_effort_s;
    if (name == "theta_epr") return theta_epr;
    throw ConfigError("unknown sweep parameter: " + name);
}

std::vector<double> SweepAxis::values() const {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) {
        const double f = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
        v[i] = log_scale ? min * std::pow(max / min, f) : min + f * (max - min);
    }
    return v;
}

void ExperimentConfig::validate() const {
    integrator.validate();
    system.build(); // throws on bad physical parameters
    const std::size_t need = kind == ExperimentKind::Sweep1d   ? 1
                             : kind == ExperimentKind::Sweep2d ? 2
                                                               : 0;
    if (axes.size() != need)
        throw ConfigError(std::string(kind_name(kind)) + " requires " + std::to_string(need) +
                          " sweep axes, got " + std::to_string(axes.size()));
    for (const SweepAxis& a : axes) {
        if (a.count < 2) throw ConfigError("sweep axis '" + a.param + "': count must be >= 2");
        const auto& names = SystemSpec::sweepable();
        if (std::find(names.begin(), names.end(), a.param) == names.end())
            throw ConfigError("sweep axis references unknown parameter '" + a.param + "'");
        if (a.log_scale && !(a.min > 0 && a.max > 0))
            throw ConfigError("sweep axis '" + a.param + "': log scale needs positive bounds");
    }
    if (workers < 0) throw ConfigError("workers must be >= 0");
}

namespace {

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + where + "." + it.key() + "'");
    }
}

double require_number(const json& j, const std::string& where, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing required key '" + where + "." + key + "'");
    if (!j.at(key).is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
    return j.at(key).get<double>();
}

SystemSpec parse_system(const json& j) {
    reject_unknown(j, "system",
                   {"omega0_hz", "g0_rel", "g1_rel", "omega_c_rel", "omega_c_over_omega_minus",
                    "gamma_hz", "gamma_th_hz", "gamma_ba_hz", "eta", "q_effort_s", "theta_epr",
                    "rates_are_angular"});
    SystemSpec s;
    s.omega0_hz = require_number(j, "system", "omega0_hz");
    s.g0_rel = require_number(j, "system", "g0_rel");
    s.g1_rel = j.value("g1_rel", 0.0);
    if (j.contains("omega_c_rel")) s.omega_c_rel = j.at("omega_c_rel").get<double>();
    if (j.contains("omega_c_over_omega_minus"))
        s.omega_c_over_omega_minus = j.at("omega_c_over_omega_minus").get<double>();
    s.gamma_hz = j.value("gamma_hz", 0.0);
    s.gamma_th_hz = j.value("gamma_th_hz", 0.0);
    s.gamma_ba_hz = j.value("gamma_ba_hz", 0.0);
    s.eta = require_number(j, "system", "eta");
    s.q_effort_s = require_number(j, "system", "q_effort_s");
    s.theta_epr = j.value("theta_epr", M_PI);
    s.rates_are_angular = j.value("rates_are_angular", true);
    return s;
}

IntegratorConfig parse_integrator(const json& j) {
    reject_unknown(j, "integrator",
                   {"rel_tol", "abs_tol", "max_step_frac", "samples_per_period", "max_periods",
                    "convergence_tol"});
    IntegratorConfig c;
    c.rel_tol = j.value("rel_tol", c.rel_tol);
    c.abs_tol = j.value("abs_tol", c.abs_tol);
    c.max_step_frac = j.value("max_step_frac", c.max_step_frac);
    c.samples_per_period = j.value("samples_per_period", c.samples_per_period);
    c.max_periods = j.value("max_periods", c.max_periods);
    c.convergence_tol = j.value("convergence_tol", c.convergence_tol);
    return c;
}

SweepAxis parse_axis(const json& j, const std::string& where) {
    reject_unknown(j, where, {"param", "min", "max", "count", "scale"});
    SweepAxis a;
    if (!j.contains("param")) throw ConfigError("missing required key '" + where + ".param'");
    a.param = j.at("param").get<std::string>();
    a.min = require_number(j, where, "min");
    a.max = require_number(j, where, "max");
    a.count = static_cast<int>(require_number(j, where, "count"));
    const std::string scale = j.value("scale", "linear");
    if (scale == "log") a.log_scale = true;
    else if (scale != "linear") throw ConfigError("'" + where + ".scale' must be linear|log");
    return a;
}

} // namespace

const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Trace: return "trace";
        case ExperimentKind::Sweep1d: return "sweep1d";
        case ExperimentKind::Sweep2d: return "sweep2d";
        case ExperimentKind::Ellipse: return "ellipse";
        case ExperimentKind::Compare: return "compare";
    }
    return "?";
}

ExperimentConfig parse_config(const json& j) {
    reject_unknown(j, "", {"experiment", "system", "integrator", "sweep", "output", "workers", "seed"});
    ExperimentConfig cfg;
    if (!j.contains("experiment")) throw ConfigError("missing required key 'experiment'");
    const std::string kind = j.at("experiment").get<std::string>();
    if (kind == "trace") cfg.kind = ExperimentKind::Trace;
    else if (kind == "sweep1d") cfg.kind = ExperimentKind::Sweep1d;
    else if (kind == "sweep2d") cfg.kind = ExperimentKind::Sweep2d;
    else if (kind == "ellipse") cfg.kind = ExperimentKind::Ellipse;
    else if (kind == "compare") cfg.kind = ExperimentKind::Compare;
    else throw ConfigError("'experiment' must be one of trace|sweep1d|sweep2d|ellipse|compare");

    if (!j.contains("system")) throw ConfigError("missing required key 'system'");
    cfg.system = parse_system(j.at("system"));
    if (j.contains("integrator")) cfg.integrator = parse_integrator(j.at("integrator"));
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        reject_unknown(s, "sweep", {"axes"});
        if (!s.contains("axes") || !s.at("axes").is_array())
            throw ConfigError("'sweep.axes' must be an array");
        int i = 0;
        for (const json& a : s.at("axes"))
            cfg.axes.push_back(parse_axis(a, "sweep.axes[" + std::to_string(i++) + "]"));
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        reject_unknown(o, "output", {"dir", "formats", "plot"});
        cfg.output.dir = o.value("dir", cfg.output.dir);
        if (o.contains("formats")) {
            cfg.output.csv = false;
            cfg.output.json = false;
            for (const json& f : o.at("formats")) {
                const std::string fmt = f.get<std::string>();
                if (fmt == "csv") cfg.output.csv = true;
                else if (fmt == "json") cfg.output.json = true;
                else throw ConfigError("output.formats entries must be csv|json");
            }
        }
        cfg.output.plot = o.value("plot", false);
    }
    cfg.workers = j.value("workers", 0);
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return parse_config(j);
}

namespace {

json base_system() {
    return json{{"omega0_hz", 29.4e3},  {"g0_rel", 0.2},        {"g1_rel", 0.05},
                {"omega_c_over_omega_minus", 2.0},              {"gamma_hz", 0.31e-6},
                {"gamma_th_hz", 66.2},  {"gamma_ba_hz", 1300.0},{"eta", 0.5},
                {"q_effort_s", 1.08e-6},{"theta_epr", M_PI}};
}

} // namespace

std::vector<std::string> preset_names() {
    return {"fig2", "fig3", "fig4a", "fig4b", "fig5", "fig6", "fig7"};
}

json preset_json(const std::string& name) {
    json sys = base_system();
    json j{{"system", sys}, {"output", {{"dir", "out_" + name}}}};
    if (name == "fig2") {
        j["experiment"] = "sweep1d";
        j["sweep"] = {{"axes", {{{"param", "eta"}, {"min", 0.1}, {"max", 1.0}, {"count", 19}}}}};
    } else if (name == "fig3") {
        j["experiment"] = "ellipse";
    } else if (name == "fig4a") {
        // the trace presets use the main-text modulation strength g1/|g0| = 0.2
        // (the figure caption's 0.25 is inconsistent with the stated repulsive
        // behavior, which only holds at 0.2)
        j["experiment"] = "trace";
        j["system"]["g1_rel"] = 0.04;
    } else if (name == "fig4b") {
        j["experiment"] = "trace";
        j["system"]["g0_rel"] = -0.2;
        j["system"]["g1_rel"] = 0.04;
    } else if (name == "fig5") {
        j["experiment"] = "sweep2d";
        j["sweep"] = {{"axes",
                       {{{"param", "omega_c_rel"}, {"min", 2.2}, {"max", 3.2}, {"count", 25}},
                        {{"param", "g1_rel"}, {"min", 0.004}, {"max", 0.1}, {"count", 25}}}}};
        j["system"].erase("omega_c_over_omega_minus");
        j["system"]["omega_c_rel"] = 2.683281572999748; // overridden by the sweep axis
    } else if (name == "fig6") {
        j["experiment"] = "sweep1d";
        j["system"]["g0_rel"] = -0.2;
        j["sweep"] = {{"axes", {{{"param", "eta"}, {"min", 0.1}, {"max", 1.0}, {"count", 19}}}}};
    } else if (name == "fig7") {
        j["experiment"] = "sweep2d";
        j["system"]["g0_rel"] = -0.2;
        j["sweep"] = {{"axes",
                       {{{"param", "omega_c_rel"}, {"min", 0.5}, {"max", 1.3}, {"count", 25}},
                        {{"param", "g1_rel"}, {"min", 0.004}, {"max", 0.1}, {"count", 25}}}}};
        j["system"].erase("omega_c_over_omega_minus");
        j["system"]["omega_c_rel"] = 0.8944271909999159;
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    return j;
}

} // namespace entsim
