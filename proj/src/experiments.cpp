#include "entsim/experiments.hpp"

#include "entsim/io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace entsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool at_resonance(const SystemParams& p) {
    return std::abs(p.omega_c - 2.0 * omega_minus(p)) <= 1e-9 * p.omega0;
}

double safe_log_neg(const CovBlock& plus, const CovBlock& minus) {
    try {
        return log_negativity(plus, minus).log_neg;
    } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

constexpr double kSettlePeriods = 1e4; // kernel self-truncates at 40 decay times

} // namespace

TraceResult compute_trace(const SystemParams& p, const IntegratorConfig& cfg) {
    TraceResult r;
    PeriodicSolution psol = find_periodic_steady_state(p, cfg);
    r.period = psol.period;
    r.converged = psol.converged;
    r.t = psol.samples.t;
    r.sigma_c = psol.samples.states;

    const FeedbackGain gain = solve_are_gain(p);
    if (psol.converged) {
        const ExcessNoise xi = integrate_excess_noise(p, cfg, gain, psol);
        r.sigma_uncond.resize(r.sigma_c.size());
        for (std::size_t i = 0; i < r.sigma_c.size(); ++i)
            r.sigma_uncond[i] = unconditional_cov(r.sigma_c[i], xi.xi[i]);
    } else {
        r.sigma_uncond = r.sigma_c;
    }

    const std::size_t n = r.t.size();
    r.en_cond.resize(n);
    r.en_uncond.resize(n);
    r.en_cond_ana.assign(n, std::numeric_limits<double>::quiet_NaN());
    r.en_uncond_ana.assign(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n; ++i) {
        r.en_cond[i] = safe_log_neg(r.sigma_c[i].plus, r.sigma_c[i].minus);
        r.en_uncond[i] = psol.converged
                             ? safe_log_neg(r.sigma_uncond[i].plus, r.sigma_uncond[i].minus)
                             : std::numeric_limits<double>::quiet_NaN();
    }

    const MathieuModel model = mathieu_model(p);
    r.analytic_applicable = model_applicable(model);
    if (r.analytic_applicable) {
        const bool res = at_resonance(p);
        for (std::size_t i = 0; i < n; ++i) {
            r.en_cond_ana[i] = res ? closed_form_negativity(p, r.t[i])
                                   : analytic_negativity(p, model, r.t[i]).log_neg;
        }
        try {
            const std::vector<TwoModeState> xi_ana =
                analytic_excess_noise_series(p, gain, model, r.t, kSettlePeriods * r.period);
            const CovBlock plus_c = common_mode_approx(p);
            for (std::size_t i = 0; i < n; ++i) {
                const CovBlock minus_c = conditional_cov_approx(p, model, r.t[i]);
                r.en_uncond_ana[i] =
                    safe_log_neg(plus_c + xi_ana[i].plus, minus_c + xi_ana[i].minus);
            }
        } catch (const std::exception&) {
            // leave NaN: non-Hurwitz analytic closed loop
        }
    }
    return r;
}

PointResult evaluate_point(const SystemParams& p, const IntegratorConfig& cfg,
                           const EvalOptions& opt) {
    PointResult r;
    try {
        PeriodicSolution psol = find_periodic_steady_state(p, cfg);
        const std::vector<double>& t = psol.samples.t;
        const std::size_t n = t.size();

        const MathieuModel model = mathieu_model(p);
        r.in_window = model.in_window;
        r.applicable = model_applicable(model);

        if (n > 64) {
            std::vector<double> en(n);
            for (std::size_t i = 0; i < n; ++i)
                en[i] = safe_log_neg(psol.samples.states[i].plus, psol.samples.states[i].minus);
            r.en_cond_avg = period_average(t, en, psol.period);
        }

        FeedbackGain gain;
        bool have_gain = false;
        if (psol.converged && opt.want_unconditional) {
            gain = solve_are_gain(p);
            have_gain = true;
            const ExcessNoise xi = integrate_excess_noise(p, cfg, gain, psol);
            std::vector<double> en(n);
            for (std::size_t i = 0; i < n; ++i) {
                const TwoModeState u = unconditional_cov(psol.samples.states[i], xi.xi[i]);
                en[i] = safe_log_neg(u.plus, u.minus);
            }
            r.en_uncond_avg = period_average(t, en, psol.period);
        }

        if (opt.want_analytic && r.applicable) {
            const bool res = at_resonance(p);
            std::vector<double> en(n);
            for (std::size_t i = 0; i < n; ++i)
                en[i] = res ? closed_form_negativity(p, t[i])
                            : analytic_negativity(p, model, t[i]).log_neg;
            r.en_cond_ana_avg = period_average(t, en, psol.period);

            try {
                if (!have_gain) gain = solve_are_gain(p);
                const std::vector<TwoModeState> xi_ana =
                    analytic_excess_noise_series(p, gain, model, t, kSettlePeriods * psol.period);
                const CovBlock plus_c = common_mode_approx(p);
                for (std::size_t i = 0; i < n; ++i) {
                    const CovBlock minus_c = conditional_cov_approx(p, model, t[i]);
                    en[i] = safe_log_neg(plus_c + xi_ana[i].plus, minus_c + xi_ana[i].minus);
                }
                r.en_uncond_ana_avg = period_average(t, en, psol.period);
            } catch (const std::exception&) {
                // analytic unconditional unavailable; keep NaN
            }
        }

        if (!psol.converged) {
            r.status = 2;
            r.message = "steady-state search did not converge (residual " +
                        std::to_string(psol.residual) + ")";
        } else {
            r.status = 0;
        }
    } catch (const std::exception& e) {
        r.status = 1;
        r.message = e.what();
    }
    return r;
}

std::vector<PointResult> evaluate_grid_serial(const std::vector<SystemParams>& points,
                                              const IntegratorConfig& cfg, const EvalOptions& opt) {
    std::vector<PointResult> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = evaluate_point(points[i], cfg, opt);
    return out;
}

std::vector<PointResult> evaluate_grid_parallel(const std::vector<SystemParams>& points,
                                                const IntegratorConfig& cfg, const EvalOptions& opt,
                                                int workers) {
    std::vector<PointResult> out(points.size());
#ifdef _OPENMP
    const int n = static_cast<int>(points.size());
#pragma omp parallel for schedule(dynamic) num_threads(workers > 0 ? workers : omp_get_max_threads())
    for (int i = 0; i < n; ++i) out[i] = evaluate_point(points[i], cfg, opt);
#else
    (void)workers;
    out = evaluate_grid_serial(points, cfg, opt);
#endif
    return out;
}

std::vector<PointResult> evaluate_grid(const std::vector<SystemParams>& points,
                                       const IntegratorConfig& cfg, const EvalOptions& opt,
                                       int workers) {
    if (workers == 1) return evaluate_grid_serial(points, cfg, opt);
    return evaluate_grid_parallel(points, cfg, opt, workers);
}

namespace {

const std::vector<std::string> kTraceComments = {
    "columns: t [s]; conditional/unconditional log-negativity (numeric, analytic);",
    "conditional covariance blocks sc_{p,m}{11,12,22}; unconditional blocks su_*",
};

std::vector<std::string> trace_columns() {
    return {"t",      "en_cond", "en_uncond", "en_cond_ana", "en_uncond_ana",
            "sc_p11", "sc_p12",  "sc_p22",    "sc_m11",      "sc_m12",
            "sc_m22", "su_p11",  "su_p12",    "su_p22",      "su_m11",
            "su_m12", "su_m22"};
}

void append_state(std::vector<std::string>& row, const TwoModeState& s) {
    row.push_back(fmt_num(s.plus.s11));
    row.push_back(fmt_num(s.plus.s12));
    row.push_back(fmt_num(s.plus.s22));
    row.push_back(fmt_num(s.minus.s11));
    row.push_back(fmt_num(s.minus.s12));
    row.push_back(fmt_num(s.minus.s22));
}

} // namespace

RunStatus run_trace(const ExperimentConfig& cfg) {
    const SystemParams p = cfg.system.build();
    const TraceResult tr = compute_trace(p, cfg.integrator);
    ensure_dir(cfg.output.dir);

    if (cfg.output.csv) {
        std::vector<std::vector<std::string>> rows;
        rows.reserve(tr.t.size());
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            std::vector<std::string> row{fmt_num(tr.t[i]), fmt_num(tr.en_cond[i]),
                                         fmt_num(tr.en_uncond[i]), fmt_num(tr.en_cond_ana[i]),
                                         fmt_num(tr.en_uncond_ana[i])};
            append_state(row, tr.sigma_c[i]);
            append_state(row, tr.sigma_uncond[i]);
            rows.push_back(std::move(row));
        }
        std::vector<std::string> comments = kTraceComments;
        comments.push_back(tr.converged ? "status: converged" : "status: NOT CONVERGED");
        write_csv(cfg.output.dir + "/trace.csv", comments, trace_columns(), rows);
    }
    if (cfg.output.plot) {
        svg_line_chart(cfg.output.dir + "/trace.svg", "log-negativity over one driving period",
                       "t [s]", "E_N", tr.t,
                       {{"conditional (numeric)", tr.en_cond},
                        {"unconditional (numeric)", tr.en_uncond},
                        {"conditional (analytic)", tr.en_cond_ana},
                        {"unconditional (analytic)", tr.en_uncond_ana}},
                       true);
    }
    return tr.converged ? RunStatus::Ok : RunStatus::Partial;
}

namespace {

std::vector<std::string> sweep_point_columns() {
    return {"status",      "in_window",     "applicable",   "en_cond_num",
            "en_uncond_num", "en_cond_ana", "en_uncond_ana", "message"};
}

void append_point(std::vector<std::string>& row, const PointResult& r) {
    row.push_back(std::to_string(r.status));
    row.push_back(r.in_window ? "1" : "0");
    row.push_back(r.applicable ? "1" : "0");
    row.push_back(fmt_num(r.en_cond_avg));
    row.push_back(fmt_num(r.en_uncond_avg));
    row.push_back(fmt_num(r.en_cond_ana_avg));
    row.push_back(fmt_num(r.en_uncond_ana_avg));
    row.push_back(sanitize(r.message));
}

RunStatus combine_status(const std::vector<PointResult>& results) {
    bool any_bad = false;
    for (const PointResult& r : results) any_bad = any_bad || r.status != 0;
    return any_bad ? RunStatus::Partial : RunStatus::Ok;
}

} // namespace

RunStatus run_sweep1d(const ExperimentConfig& cfg) {
    const SweepAxis& axis = cfg.axes.at(0);
    const std::vector<double> values = axis.values();
    std::vector<SystemParams> points;
    points.reserve(values.size());
    for (double v : values) {
        SystemSpec spec = cfg.system;
        spec.set(axis.param, v);
        points.push_back(spec.build());
    }
    const auto results = evaluate_grid(points, cfg.integrator, EvalOptions{}, cfg.workers);

    ensure_dir(cfg.output.dir);
    if (cfg.output.csv) {
        std::vector<std::string> cols{axis.param};
        for (const std::string& c : sweep_point_columns()) cols.push_back(c);
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::vector<std::string> row{fmt_num(values[i])};
            append_point(row, results[i]);
            rows.push_back(std::move(row));
        }
        write_csv(cfg.output.dir + "/sweep1d.csv",
                  {"period-averaged log-negativity vs " + axis.param,
                   "status: 0 ok, 1 error, 2 not converged"},
                  cols, rows);
    }
    if (cfg.output.plot) {
        auto pick = [&](double PointResult::*f) {
            std::vector<double> y;
            for (const PointResult& r : results) y.push_back(r.*f);
            return y;
        };
        svg_line_chart(cfg.output.dir + "/sweep1d.svg",
                       "period-averaged log-negativity vs " + axis.param, axis.param, "E_N",
                       values,
                       {{"conditional (numeric)", pick(&PointResult::en_cond_avg)},
                        {"unconditional (numeric)", pick(&PointResult::en_uncond_avg)},
                        {"conditional (analytic)", pick(&PointResult::en_cond_ana_avg)},
                        {"unconditional (analytic)", pick(&PointResult::en_uncond_ana_avg)}},
                       true);
    }
    return combine_status(results);
}

RunStatus run_sweep2d(const ExperimentConfig& cfg) {
    const SweepAxis& ax = cfg.axes.at(0); // x, inner
    const SweepAxis& ay = cfg.axes.at(1); // y, outer
    const std::vector<double> xs = ax.values(), ys = ay.values();

    std::vector<SystemParams> points;
    points.reserve(xs.size() * ys.size());
    for (double y : ys) {
        for (double x : xs) {
            SystemSpec spec = cfg.system;
            spec.set(ax.param, x);
            spec.set(ay.param, y);
            points.push_back(spec.build());
        }
    }
    const auto results = evaluate_grid(points, cfg.integrator, EvalOptions{}, cfg.workers);

    ensure_dir(cfg.output.dir);
    if (cfg.output.csv) {
        std::vector<std::string> cols{ax.param, ay.param};
        for (const std::string& c : sweep_point_columns()) cols.push_back(c);
        std::vector<std::vector<std::string>> rows;
        for (std::size_t j = 0; j < ys.size(); ++j) {
            for (std::size_t i = 0; i < xs.size(); ++i) {
                std::vector<std::string> row{fmt_num(xs[i]), fmt_num(ys[j])};
                append_point(row, results[j * xs.size() + i]);
                rows.push_back(std::move(row));
            }
        }
        write_csv(cfg.output.dir + "/sweep2d.csv",
                  {"period-averaged log-negativity grid over (" + ax.param + ", " + ay.param + ")",
                   "status: 0 ok, 1 error, 2 not converged; analytic columns NaN when not applicable"},
                  cols, rows);
    }
    if (cfg.output.plot) {
        // resonance-window overlay when the axes are the modulation parameters
        std::vector<std::vector<std::pair<double, double>>> overlays;
        if (ax.param == "omega_c_rel" && ay.param == "g1_rel") {
            std::vector<std::pair<double, double>> lo, hi;
            for (double g1 : ys) {
                SystemSpec spec = cfg.system;
                spec.set(ax.param, xs.front());
                spec.set(ay.param, g1);
                const SystemParams p = spec.build();
                const auto [wlo, whi] = resonance_window(p);
                lo.emplace_back(wlo / p.omega0, g1);
                hi.emplace_back(whi / p.omega0, g1);
            }
            overlays = {lo, hi};
        }
        auto grid = [&](double PointResult::*f, bool mask) {
            std::vector<double> v;
            for (const PointResult& r : results)
                v.push_back(mask && !r.applicable ? std::numeric_limits<double>::quiet_NaN()
                                                  : r.*f);
            return v;
        };
        svg_heatmap(cfg.output.dir + "/sweep2d_cond_num.svg", "conditional E_N (numeric)", xs, ys,
                    grid(&PointResult::en_cond_avg, false), overlays);
        svg_heatmap(cfg.output.dir + "/sweep2d_cond_ana.svg", "conditional E_N (analytic)", xs, ys,
                    grid(&PointResult::en_cond_ana_avg, true), overlays);
        svg_heatmap(cfg.output.dir + "/sweep2d_uncond_num.svg", "unconditional E_N (numeric)", xs,
                    ys, grid(&PointResult::en_uncond_avg, false), overlays);
        svg_heatmap(cfg.output.dir + "/sweep2d_uncond_ana.svg", "unconditional E_N (analytic)", xs,
                    ys, grid(&PointResult::en_uncond_ana_avg, true), overlays);
    }
    return combine_status(results);
}

RunStatus run_ellipse(const ExperimentConfig& cfg) {
    const SystemParams p = cfg.system.build();
    PeriodicSolution psol = find_periodic_steady_state(p, cfg.integrator);
    const double t_end = psol.period;
    const CovBlock numeric = psol.samples.states.back().minus;
    const Ellipse en = noise_ellipse(numeric);

    const MathieuModel model = mathieu_model(p);
    CovBlock approx{};
    Ellipse ea{};
    Eigen::Vector2d xdiv = Eigen::Vector2d::Zero(), xdec = Eigen::Vector2d::Zero();
    const bool applicable = model_applicable(model);
    if (applicable) {
        approx = conditional_cov_approx(p, model, t_end);
        ea = noise_ellipse(approx);
        std::tie(xdiv, xdec) = mode_vectors(model, p, t_end);
    }

    ensure_dir(cfg.output.dir);
    if (cfg.output.csv) {
        std::vector<std::string> row{
            fmt_num(en.major),  fmt_num(en.minor),  fmt_num(en.angle),
            fmt_num(ea.major),  fmt_num(ea.minor),  fmt_num(ea.angle),
            fmt_num(std::atan2(xdiv[1], xdiv[0])),  fmt_num(std::atan2(xdec[1], xdec[0])),
            applicable ? "1" : "0", psol.converged ? "0" : "2"};
        write_csv(cfg.output.dir + "/ellipse.csv",
                  {"differential-mode noise ellipse at the end of one driving period",
                   "angles in radians; semi-axes are standard deviations"},
                  {"num_major", "num_minor", "num_angle", "ana_major", "ana_minor", "ana_angle",
                   "xdiv_angle", "xdec_angle", "applicable", "status"},
                  {row});
    }
    if (cfg.output.plot) {
        auto ellipse_pts = [](const Ellipse& e) {
            std::vector<std::pair<double, double>> pts;
            for (int i = 0; i <= 128; ++i) {
                const double th = 2.0 * M_PI * i / 128;
                const double ex = e.major * std::cos(th), ey = e.minor * std::sin(th);
                pts.emplace_back(ex * std::cos(e.angle) - ey * std::sin(e.angle),
                                 ex * std::sin(e.angle) + ey * std::cos(e.angle));
            }
            return pts;
        };
        std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> curves;
        curves.emplace_back("numeric", ellipse_pts(en));
        if (applicable) {
            curves.emplace_back("analytic", ellipse_pts(ea));
            const double ldiv = std::sqrt(model.alpha_div) * xdiv.norm();
            const double ldec = std::sqrt(model.alpha_dec) * xdec.norm();
            const Eigen::Vector2d udiv = xdiv.normalized() * ldiv;
            const Eigen::Vector2d udec = xdec.normalized() * ldec;
            curves.emplace_back("diverging mode",
                                std::vector<std::pair<double, double>>{
                                    {-udiv[0], -udiv[1]}, {udiv[0], udiv[1]}});
            curves.emplace_back("decaying mode",
                                std::vector<std::pair<double, double>>{
                                    {-udec[0], -udec[1]}, {udec[0], udec[1]}});
        }
        svg_curves(cfg.output.dir + "/ellipse.svg", "differential-mode noise ellipse", curves);
    }
    return psol.converged ? RunStatus::Ok : RunStatus::Partial;
}

namespace {

// circular cross-correlation lag of b relative to a, as a fraction of the
// period, folded into [-1/2, 1/2)
double phase_lag_fraction(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size() - 1; // endpoint duplicates the start
    if (n < 2 || b.size() != a.size()) return std::numeric_limits<double>::quiet_NaN();
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_shift = 0;
    for (std::size_t s = 0; s < n; ++s) {
        double corr = 0;
        for (std::size_t i = 0; i < n; ++i) corr += (a[i] - ma) * (b[(i + s) % n] - mb);
        if (corr > best) {
            best = corr;
            best_shift = s;
        }
    }
    double frac = static_cast<double>(best_shift) / n;
    if (frac >= 0.5) frac -= 1.0;
    return frac;
}

json series_report(const std::vector<double>& t, const std::vector<double>& num,
                   const std::vector<double>& ana, double period) {
    json r;
    bool finite = true;
    for (double v : num) finite = finite && std::isfinite(v);
    for (double v : ana) finite = finite && std::isfinite(v);
    if (!finite || t.size() < 65) {
        r["available"] = false;
        return r;
    }
    const double avg_num = period_average(t, num, period);
    const double avg_ana = period_average(t, ana, period);
    double max_abs = 0;
    for (std::size_t i = 0; i < num.size(); ++i)
        max_abs = std::max(max_abs, std::abs(num[i] - ana[i]));
    r["available"] = true;
    r["period_avg_numeric"] = avg_num;
    r["period_avg_analytic"] = avg_ana;
    r["period_avg_abs_error"] = std::abs(avg_num - avg_ana);
    r["period_avg_rel_error"] =
        std::abs(avg_num - avg_ana) / std::max(1e-300, std::abs(avg_num));
    r["max_abs_error"] = max_abs;
    r["phase_lag_fraction"] = phase_lag_fraction(num, ana);
    return r;
}

} // namespace

RunStatus run_compare(const ExperimentConfig& cfg) {
    const SystemParams p = cfg.system.build();
    const TraceResult tr = compute_trace(p, cfg.integrator);
    ensure_dir(cfg.output.dir);

    json report;
    report["converged"] = tr.converged;
    report["analytic_applicable"] = tr.analytic_applicable;
    report["period"] = tr.period;
    report["conditional"] = series_report(tr.t, tr.en_cond, tr.en_cond_ana, tr.period);
    report["unconditional"] = series_report(tr.t, tr.en_uncond, tr.en_uncond_ana, tr.period);

    std::ofstream out(cfg.output.dir + "/compare.json");
    out << report.dump(2) << "\n";
    return tr.converged ? RunStatus::Ok : RunStatus::Partial;
}

RunStatus run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    switch (cfg.kind) {
        case ExperimentKind::Trace: return run_trace(cfg);
        case ExperimentKind::Sweep1d: return run_sweep1d(cfg);
        case ExperimentKind::Sweep2d: return run_sweep2d(cfg);
        case ExperimentKind::Ellipse: return run_ellipse(cfg);
        case ExperimentKind::Compare: return run_compare(cfg);
    }
    return RunStatus::Error;
}

} // namespace entsim
