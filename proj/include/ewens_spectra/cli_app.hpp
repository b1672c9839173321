#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ewens_spectra/counting.hpp"
#include "ewens_spectra/ewens.hpp"
#include "ewens_spectra/exact_analysis.hpp"
#include "ewens_spectra/experiments.hpp"
#include "ewens_spectra/poisson.hpp"
#include "ewens_spectra/special.hpp"
#include "ewens_spectra/stats.hpp"

namespace ewens::cli {

inline constexpr int kSchemaVersion = 1;

enum class Command {
    sample_gem,
    sample_poisson,
    count,
    constants,
    verify_lemma,
    clt,
    translate,
    za
};

struct RunConfig {
    Command command = Command::constants;
    double theta = 1.0;
    std::uint64_t seed = 42;
    unsigned threads = 0; // 0 = resolve from env / hardware
    std::string output;   // empty = stdout
    std::string format = "json";
    std::size_t replicates = 1000;

    // constants
    std::string kind = "c1";
    std::string alpha_str = "0";
    std::string beta_str = "sqrt2";
    std::string kappa_str = "sqrt2";
    double n_terms = 1e7;
    double tol = 1e-3;
    std::uint64_t r = 2, s = 1;

    // verify-lemma
    std::string which = "variance-integral";
    std::uint64_t pmax = 50;
    std::vector<double> n_grid;

    // clt / za / translate grids
    std::string statistic = "xtilde";
    std::vector<double> scale_grid;
    double a = 1.0;
    std::string nu_str = "2";
    double ks_scale = 0.0; // 0 = largest grid point
    std::string standardize = "theoretical";
    double translate_t = 5.0;

    // count
    std::string mode = "limit";
    std::uint64_t n = 1000;
    double b = 10.0;
    double big_a = 10.0;

    // sample-*
    double delta = 1e-6;
    double scale_hint = 1.0;
    double epsilon = 1e-4;
    double x_max = 1e4;
    bool dump = false;
};

// ---------------------------------------------------------------------------
// small formatting / io helpers
// ---------------------------------------------------------------------------

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

inline std::string timestamp_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct Verdict {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
};

struct CommandOutput {
    std::string command;
    nlohmann::ordered_json config;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    nlohmann::ordered_json extra; // command-specific payload (dumps, fits, ...)
    std::vector<Verdict> verdicts;
};

inline std::string render_json(const CommandOutput& out) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = out.command;
    j["generated_at"] = timestamp_utc();
    j["config"] = out.config;
    j["columns"] = out.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : out.rows) {
        nlohmann::ordered_json rec;
        for (std::size_t i = 0; i < out.columns.size(); ++i) rec[out.columns[i]] = r[i];
        rows.push_back(std::move(rec));
    }
    j["rows"] = std::move(rows);
    if (!out.extra.is_null()) j["extra"] = out.extra;
    nlohmann::ordered_json vs = nlohmann::ordered_json::array();
    bool all = true;
    for (const auto& v : out.verdicts) {
        vs.push_back({{"name", v.name}, {"pass", v.pass}, {"value", v.value},
                      {"threshold", v.threshold}});
        all = all && v.pass;
    }
    j["verdicts"] = std::move(vs);
    j["all_pass"] = all;
    return j.dump(2) + "\n";
}

inline std::string render_csv(const CommandOutput& out) {
    std::ostringstream os;
    for (std::size_t i = 0; i < out.columns.size(); ++i)
        os << (i ? "," : "") << out.columns[i];
    os << "\n";
    for (const auto& r : out.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt17(r[i]);
        os << "\n";
    }
    return os.str();
}

inline int finish(const RunConfig& cfg, CommandOutput out) {
    std::string rendered = (cfg.format == "csv") ? render_csv(out) : render_json(out);
    if (cfg.output.empty())
        std::cout << rendered;
    else
        atomic_write(cfg.output, rendered);
    bool all = true;
    for (const auto& v : out.verdicts) {
        std::cout << (v.pass ? "PASS " : "FAIL ") << out.command << "/" << v.name << ": value "
                  << fmt17(v.value) << " vs threshold " << fmt17(v.threshold) << "\n";
        all = all && v.pass;
    }
    return all ? 0 : 1;
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("EWENS_SPECTRA_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// nu given as an irrational keyword, an integer, or r/s
struct NuSpec {
    double value = 2.0;
    bool rational = true;
    std::uint64_t r = 2, s = 1;
};

inline NuSpec parse_nu(const std::string& str) {
    NuSpec nu;
    if (str == "sqrt2" || str == "golden" || str == "pi") {
        nu.value = static_cast<double>(parse_real_keyword(str));
        nu.rational = false;
        return nu;
    }
    auto slash = str.find('/');
    if (slash != std::string::npos) {
        nu.r = std::stoull(str.substr(0, slash));
        nu.s = std::stoull(str.substr(slash + 1));
    } else {
        double v = std::stod(str);
        if (v != std::floor(v)) throw ConfigInvalid("nu must be an integer, r/s, or a keyword");
        nu.r = static_cast<std::uint64_t>(v);
        nu.s = 1;
    }
    if (nu.s == 0 || nu.r <= nu.s) throw ConfigInvalid("nu = r/s must exceed 1");
    if (std::gcd(nu.r, nu.s) != 1) throw NotCoprime("nu = r/s must be in lowest terms");
    nu.value = static_cast<double>(nu.r) / static_cast<double>(nu.s);
    nu.rational = true;
    return nu;
}

// ---------------------------------------------------------------------------
// command implementations
// ---------------------------------------------------------------------------

inline int run_constants(const RunConfig& cfg) {
    const auto n = static_cast<std::uint64_t>(cfg.n_terms);
    CommandOutput out;
    out.command = "constants";
    out.config = {{"kind", cfg.kind}, {"theta", cfg.theta}, {"n_terms", cfg.n_terms},
                  {"tol", cfg.tol}};
    long double alpha = parse_real_keyword(cfg.alpha_str);
    long double beta = parse_real_keyword(cfg.beta_str);
    long double kappa = parse_real_keyword(cfg.kappa_str);

    if (cfg.kind == "c2-rational") {
        RationalC2Check chk = rational_c2_checked(cfg.r, cfg.s, alpha, n);
        out.config["r"] = cfg.r;
        out.config["s"] = cfg.s;
        out.config["alpha"] = cfg.alpha_str;
        out.columns = {"closed_form", "cesaro", "abs_diff"};
        out.rows = {{chk.closed_form, chk.cesaro, chk.abs_diff}};
        out.extra = {{"certificate", {{"abs_diff", chk.abs_diff}, {"n_terms", n}}}};
        out.verdicts.push_back({"closed-form-vs-cesaro", chk.abs_diff < cfg.tol, chk.abs_diff,
                                cfg.tol});
        return finish(cfg, std::move(out));
    }

    CesaroResult r;
    if (cfg.kind == "c1") {
        out.config["alpha"] = cfg.alpha_str;
        out.config["beta"] = cfg.beta_str;
        r = cesaro_c1(alpha, beta, n, cfg.tol);
    } else if (cfg.kind == "c2") {
        out.config["alpha"] = cfg.alpha_str;
        out.config["beta"] = cfg.beta_str;
        r = cesaro_c2(alpha, beta, n, cfg.tol);
    } else if (cfg.kind == "ell") {
        out.config["kappa"] = cfg.kappa_str;
        r = cesaro_ell(kappa, n, cfg.tol);
    } else {
        throw ConfigInvalid("unknown constant kind: " + cfg.kind);
    }
    out.columns = {"value", "tail_estimate", "converged"};
    out.rows = {{r.value, r.tail_estimate, r.converged ? 1.0 : 0.0}};
    out.extra = {{"certificate",
                  {{"tail_estimate", r.tail_estimate},
                   {"converged", r.converged},
                   {"n_terms", r.n_terms}}}};
    out.verdicts.push_back({"dyadic-convergence", r.converged, r.tail_estimate, cfg.tol});
    return finish(cfg, std::move(out));
}

inline int run_verify_lemma(const RunConfig& cfg) {
    const auto& th = default_thresholds();
    std::string which = cfg.which;
    if (which == "calcul1") which = "frac-integrals";
    if (which == "calcul2") which = "sum-frac-log";
    if (which == "calcul3") which = "variance-integral";

    CommandOutput out;
    out.command = "verify-lemma";
    out.config = {{"which", which}, {"pmax", cfg.pmax}};

    if (which == "variance-integral") {
        out.columns = {"p", "q", "closed_form", "quadrature", "abs_diff"};
        double max_diff = 0.0;
        for (std::uint64_t p = 1; p <= cfg.pmax; ++p) {
            for (std::uint64_t q = p + 1; q <= cfg.pmax; ++q) {
                double closed = variance_integral_exact(p, q);
                PiecewisePoly f = PiecewisePoly::frac_part(static_cast<double>(p))
                                      .subtract(PiecewisePoly::frac_part(static_cast<double>(q)));
                double quad = piecewise_quadrature(f.square());
                double diff = std::abs(closed - quad);
                max_diff = std::max(max_diff, diff);
                out.rows.push_back({static_cast<double>(p), static_cast<double>(q), closed, quad,
                                    diff});
            }
        }
        out.verdicts.push_back({"route-equality", max_diff < th.route_equality_tol, max_diff,
                                th.route_equality_tol});
        return finish(cfg, std::move(out));
    }

    if (which == "frac-integrals" || which == "frac-over-x" || which == "frac-logx") {
        std::vector<double> grid = cfg.n_grid;
        if (grid.empty()) grid = {1e4, 1e5, 1e6};
        out.columns = {"n", "frac_over_x", "plateau", "frac_logx", "remainder_scaled"};
        double plat_lo = 1e300, plat_hi = -1e300, max_rem = 0.0;
        for (double nd : grid) {
            auto n = static_cast<std::uint64_t>(nd);
            double v1 = integral_frac_over_x(n);
            double plateau = v1 - 0.5 * std::log(nd);
            double v2 = integral_frac_logx(n);
            double rem = nd * (v2 + 0.5) - std::log(nd) / 12.0;
            plat_lo = std::min(plat_lo, plateau);
            plat_hi = std::max(plat_hi, plateau);
            max_rem = std::max(max_rem, std::abs(rem));
            out.rows.push_back({nd, v1, plateau, v2, rem});
        }
        out.verdicts.push_back({"plateau-stability", plat_hi - plat_lo < th.plateau_drift_tol,
                                plat_hi - plat_lo, th.plateau_drift_tol});
        out.verdicts.push_back({"logx-remainder-bounded", max_rem < 1.0, max_rem, 1.0});
        return finish(cfg, std::move(out));
    }

    if (which == "sum-frac-log") {
        std::vector<double> grid = cfg.n_grid;
        if (grid.empty()) grid = {1e3, 1e4, 1e5};
        out.columns = {"l", "n", "sign", "value", "residual"};
        double worst = 0.0;
        for (std::uint64_t l : {1ull, 2ull, 3ull}) {
            double lead = sum_frac_log_leading(l);
            for (double nd : grid) {
                auto n = static_cast<std::uint64_t>(nd);
                for (int sign : {+1, -1}) {
                    double v = sum_frac_log(l, n, sign);
                    double resid = v - sign * (lead * nd - 0.5 * std::log(nd));
                    worst = std::max(worst, std::abs(resid));
                    out.rows.push_back({static_cast<double>(l), nd, static_cast<double>(sign), v,
                                        resid});
                }
            }
        }
        out.verdicts.push_back({"residual-bounded", worst < th.sum_frac_log_residual_bound, worst,
                                th.sum_frac_log_residual_bound});
        return finish(cfg, std::move(out));
    }

    if (which == "transform") {
        PiecewisePoly identity({0.0, 1.0}, {{0.0, 1.0, 0.0}});
        std::vector<double> grid = cfg.n_grid;
        if (grid.empty()) grid = {2, 2.5, 3, 10, 100, 1e3, 1e4, 1e5, 1e6};
        std::vector<double> resid = log_scaling_residuals(identity, grid);
        out.columns = {"t", "residual"};
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst, std::abs(resid[i]));
            out.rows.push_back({grid[i], resid[i]});
        }
        out.verdicts.push_back({"residual-bounded", worst <= 1.0, worst, 1.0});
        return finish(cfg, std::move(out));
    }

    throw ConfigInvalid("unknown identity: " + cfg.which);
}

inline int run_clt(const RunConfig& cfg) {
    const auto& th = default_thresholds();
    if (cfg.scale_grid.empty()) throw ConfigInvalid("clt: --a-grid required");
    ThetaParam theta(cfg.theta);
    unsigned threads = resolve_threads(cfg.threads);

    Sampler sampler;
    double slope_target = 0.0, slope_tol = 0.0, ks_threshold = 1.0;
    std::string id;
    NuSpec nu;
    if (cfg.statistic == "xtilde") {
        sampler = make_phased_count_sampler(theta);
        slope_target = cfg.theta / 6.0;
        slope_tol = th.slope_rel_tol_phased;
        ks_threshold = th.ks_phased;
        id = "xtilde/theta=" + std::to_string(cfg.theta);
    } else if (cfg.statistic == "x-fixed-a") {
        sampler = make_fixed_left_count_sampler(theta, cfg.a);
        slope_target = cfg.theta / 3.0;
        slope_tol = th.slope_rel_tol_fixed_a;
        ks_threshold = th.ks_fixed_a;
        id = "xfixed/theta=" + std::to_string(cfg.theta) + "/a=" + std::to_string(cfg.a);
    } else if (cfg.statistic == "x-proportional") {
        nu = parse_nu(cfg.nu_str);
        sampler = make_proportional_count_sampler(theta, nu.value);
        slope_target = nu.rational
                           ? cfg.theta / 6.0 * (1.0 - 1.0 / static_cast<double>(nu.r * nu.s))
                           : cfg.theta / 6.0;
        slope_tol = th.slope_rel_tol_proportional;
        ks_threshold = 1.0; // reported, not gated
        id = "xprop/theta=" + std::to_string(cfg.theta) + "/nu=" + cfg.nu_str;
    } else {
        throw ConfigInvalid("unknown statistic: " + cfg.statistic);
    }

    auto runs = run_experiment(id, sampler, cfg.scale_grid, cfg.replicates, cfg.seed, threads);

    CommandOutput out;
    out.command = "clt";
    out.config = {{"statistic", cfg.statistic}, {"theta", cfg.theta},
                  {"replicates", cfg.replicates}, {"seed", cfg.seed},
                  {"standardize", cfg.standardize}};
    out.columns = {"scale", "mean", "variance", "mean_stderr", "variance_stderr", "ks", "ks_pass"};

    double ks_scale = cfg.ks_scale > 0.0 ? cfg.ks_scale : cfg.scale_grid.back();
    double gated_ks = 0.0;
    std::vector<std::pair<double, const StatSeries*>> per_scale;
    for (const auto& [scale, series] : runs) {
        Moments m = moments(series.values);
        double mu, sigma;
        if (cfg.standardize == "empirical") {
            mu = m.mean;
            sigma = std::sqrt(m.variance);
        } else if (cfg.statistic == "xtilde") {
            mu = scale;
            sigma = std::sqrt(cfg.theta / 6.0 * std::log(scale));
        } else {
            double a_left = (cfg.statistic == "x-fixed-a") ? cfg.a : scale;
            double b_len = (cfg.statistic == "x-fixed-a") ? scale : (nu.value - 1.0) * scale;
            CampbellMoments cm = campbell_moments(a_left, b_len, theta);
            mu = b_len - cm.mean;
            sigma = std::sqrt(cm.variance);
        }
        KsVerdict kv = ks_normal(series, Standardize::theoretical, ks_threshold, mu, sigma);
        if (scale == ks_scale) gated_ks = kv.statistic;
        out.rows.push_back({scale, m.mean, m.variance, m.mean_stderr, m.variance_stderr,
                            kv.statistic, kv.pass ? 1.0 : 0.0});
        per_scale.emplace_back(scale, &series);
    }

    FitResult fit = variance_slope_fit(per_scale);
    out.extra = {{"fit",
                  {{"slope", fit.slope},
                   {"intercept", fit.intercept},
                   {"slope_stderr", fit.slope_stderr},
                   {"target", slope_target}}}};
    double rel = std::abs(fit.slope - slope_target) / slope_target;
    out.verdicts.push_back({"variance-slope", rel < slope_tol, rel, slope_tol});
    if (ks_threshold < 1.0)
        out.verdicts.push_back({"ks-normal", gated_ks < ks_threshold, gated_ks, ks_threshold});
    return finish(cfg, std::move(out));
}

inline int run_translate(const RunConfig& cfg) {
    const auto& th = default_thresholds();
    ThetaParam theta(cfg.theta);
    unsigned threads = resolve_threads(cfg.threads);
    std::vector<double> s_grid = cfg.scale_grid;
    if (s_grid.empty()) s_grid = {10.0, 1e4};

    auto shifted = run_experiment("translate/shifted/theta=" + std::to_string(cfg.theta) +
                                      "/t=" + std::to_string(cfg.translate_t),
                                  make_shifted_count_sampler(theta, cfg.translate_t), s_grid,
                                  cfg.replicates, cfg.seed, threads);
    auto phased = run_experiment("translate/phased/theta=" + std::to_string(cfg.theta),
                                 make_phased_count_sampler(theta), {cfg.translate_t},
                                 cfg.replicates, cfg.seed, threads);

    CommandOutput out;
    out.command = "translate";
    out.config = {{"theta", cfg.theta}, {"t", cfg.translate_t}, {"replicates", cfg.replicates},
                  {"seed", cfg.seed}};
    out.columns = {"s", "ks"};
    std::vector<double> ks_vals;
    for (const auto& [s, series] : shifted) {
        KsVerdict kv = two_sample_distance(series, phased.front().second, th.ks_translation);
        ks_vals.push_back(kv.statistic);
        out.rows.push_back({s, kv.statistic});
    }
    double final_ks = ks_vals.back();
    out.verdicts.push_back({"ks-at-largest-shift", final_ks < th.ks_translation, final_ks,
                            th.ks_translation});
    if (ks_vals.size() >= 2)
        out.verdicts.push_back({"ks-improves-with-shift", final_ks < ks_vals.front(), final_ks,
                                ks_vals.front()});
    return finish(cfg, std::move(out));
}

inline int run_za(const RunConfig& cfg) {
    const auto& th = default_thresholds();
    ThetaParam theta(cfg.theta);
    if (cfg.scale_grid.empty()) throw ConfigInvalid("za: --a-grid required");
    auto rows = za_diagnostic(theta, cfg.scale_grid, cfg.replicates, cfg.seed,
                              resolve_threads(cfg.threads));
    CommandOutput out;
    out.command = "za";
    out.config = {{"theta", cfg.theta}, {"replicates", cfg.replicates}, {"seed", cfg.seed}};
    out.columns = {"scale", "median", "iqr"};
    for (const auto& r : rows) out.rows.push_back({r.scale, r.median, r.iqr});
    double target = cfg.theta / 6.0;
    double rel = std::abs(rows.back().median - target) / target;
    out.verdicts.push_back({"median-near-limit", rel < th.za_median_rel_tol, rel,
                            th.za_median_rel_tol});
    bool iqr_down = true;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        iqr_down = iqr_down && rows[i + 1].iqr < rows[i].iqr;
    out.verdicts.push_back({"iqr-decreasing", iqr_down, rows.back().iqr, rows.front().iqr});
    return finish(cfg, std::move(out));
}

inline int run_count(const RunConfig& cfg) {
    ThetaParam theta(cfg.theta);
    CommandOutput out;
    out.command = "count";
    out.config = {{"mode", cfg.mode}, {"theta", cfg.theta}, {"seed", cfg.seed},
                  {"replicates", cfg.replicates}};
    out.columns = {"replicate", "value", "truncation_bias_bound"};
    nlohmann::ordered_json dumps = nlohmann::ordered_json::array();
    const std::uint64_t id_hash = fnv1a64("count/" + cfg.mode);
    for (std::size_t i = 0; i < cfg.replicates; ++i) {
        ReplicateStreams rs{cfg.seed, id_hash, 0, i};
        RngStream rng = rs.stream(0);
        RngStream phase_rng = rs.stream(1);
        CountResult r;
        if (cfg.mode == "tau-n") {
            CycleLengths c = sample_cycles(cfg.n, theta, rng);
            r = count_eigenangles(c, {cfg.a, cfg.b});
            if (cfg.dump) dumps.push_back(nlohmann::ordered_json::parse(to_json(c)));
        } else if (cfg.mode == "tau-n-modified") {
            CycleLengths c = sample_cycles(cfg.n, theta, rng);
            std::vector<double> phases(c.lengths.size());
            for (auto& p : phases) p = phase_rng.uniform01();
            r = count_eigenangles_phased(c, phases, {cfg.a, cfg.b});
        } else if (cfg.mode == "limit") {
            GemSample g = sample_gem(theta, cfg.delta, cfg.a + cfg.b, rng);
            r = count_limit(g, cfg.a, cfg.b);
        } else if (cfg.mode == "limit-modified") {
            GemSample g = sample_gem(theta, cfg.delta, cfg.big_a, rng);
            PhasedGem p = attach_phases(std::move(g), phase_rng);
            r = count_limit_phased(p, cfg.big_a);
        } else {
            throw ConfigInvalid("unknown count mode: " + cfg.mode);
        }
        out.rows.push_back({static_cast<double>(i), r.value, r.truncation_bias_bound});
    }
    if (cfg.dump && !dumps.empty()) out.extra = {{"cycles", std::move(dumps)}};
    return finish(cfg, std::move(out));
}

inline int run_sample_gem(const RunConfig& cfg) {
    ThetaParam theta(cfg.theta);
    CommandOutput out;
    out.command = "sample-gem";
    out.config = {{"theta", cfg.theta}, {"delta", cfg.delta}, {"scale_hint", cfg.scale_hint},
                  {"seed", cfg.seed}, {"replicates", cfg.replicates}};
    out.columns = {"replicate", "sticks", "residual", "first_stick"};
    nlohmann::ordered_json dumps = nlohmann::ordered_json::array();
    const std::uint64_t id_hash = fnv1a64("sample-gem");
    for (std::size_t i = 0; i < cfg.replicates; ++i) {
        ReplicateStreams rs{cfg.seed, id_hash, 0, i};
        RngStream rng = rs.stream(0);
        GemSample g = sample_gem(theta, cfg.delta, cfg.scale_hint, rng);
        out.rows.push_back({static_cast<double>(i), static_cast<double>(g.sticks.size()),
                            g.residual, g.sticks.empty() ? 0.0 : g.sticks.front()});
        if (cfg.dump)
            dumps.push_back({{"sticks", g.sticks}, {"residual", g.residual},
                             {"u_trace", g.u_trace}});
    }
    if (cfg.dump) out.extra = {{"samples", std::move(dumps)}};
    return finish(cfg, std::move(out));
}

inline int run_sample_poisson(const RunConfig& cfg) {
    ThetaParam theta(cfg.theta);
    CommandOutput out;
    out.command = "sample-poisson";
    out.config = {{"theta", cfg.theta}, {"epsilon", cfg.epsilon}, {"x_max", cfg.x_max},
                  {"seed", cfg.seed}, {"replicates", cfg.replicates}};
    out.columns = {"replicate", "inner_points", "outer_points", "first_inner"};
    nlohmann::ordered_json dumps = nlohmann::ordered_json::array();
    const std::uint64_t id_hash = fnv1a64("sample-poisson");
    for (std::size_t i = 0; i < cfg.replicates; ++i) {
        ReplicateStreams rs{cfg.seed, id_hash, 0, i};
        RngStream rng = rs.stream(0);
        PoissonPointSample s = sample_scale_invariant_poisson(theta, cfg.epsilon, cfg.x_max, rng);
        out.rows.push_back({static_cast<double>(i), static_cast<double>(s.inner.size()),
                            static_cast<double>(s.outer.size()),
                            s.inner.empty() ? 0.0 : s.inner.front()});
        if (cfg.dump)
            dumps.push_back({{"inner", s.inner}, {"outer", s.outer},
                             {"window", {{"epsilon", s.epsilon}, {"x_max", s.x_max},
                                         {"theta", s.theta}}}});
    }
    if (cfg.dump) out.extra = {{"samples", std::move(dumps)}};
    return finish(cfg, std::move(out));
}

// ---------------------------------------------------------------------------
// argument parsing
// ---------------------------------------------------------------------------

struct HelpShown {};

inline void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--theta", cfg.theta, "intensity parameter, > 0")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--threads", cfg.threads,
                    "worker threads (default: EWENS_SPECTRA_THREADS or machine parallelism)");
    sub->add_option("--output,-o", cfg.output, "output path (default: stdout)");
    sub->add_option("--format", cfg.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--replicates", cfg.replicates, "Monte-Carlo replicates")
        ->check(CLI::PositiveNumber);
}

inline RunConfig parse_args(const std::vector<std::string>& args) {
    RunConfig cfg;
    CLI::App app{"Simulation and exact verification of limiting eigenangle point processes"};
    app.require_subcommand(1);

    auto* c_const = app.add_subcommand("constants", "evaluate Cesaro constants c1, c2, ell");
    add_common(c_const, cfg);
    c_const->add_option("--kind", cfg.kind, "c1 | c2 | ell | c2-rational")
        ->check(CLI::IsMember({"c1", "c2", "ell", "c2-rational"}));
    c_const->add_option("--alpha", cfg.alpha_str, "left endpoint (number or sqrt2|golden|pi)");
    c_const->add_option("--beta", cfg.beta_str, "right endpoint (number or keyword)");
    c_const->add_option("--kappa", cfg.kappa_str, "window length for ell (number or keyword)");
    c_const->add_option("--n", cfg.n_terms, "Cesaro terms")->check(CLI::PositiveNumber);
    c_const->add_option("--tol", cfg.tol, "dyadic convergence tolerance");
    c_const->add_option("--r", cfg.r, "numerator for c2-rational");
    c_const->add_option("--s", cfg.s, "denominator for c2-rational");

    auto* c_ver = app.add_subcommand("verify-lemma", "deterministic closed-form identities");
    add_common(c_ver, cfg);
    c_ver->add_option("--which", cfg.which,
                      "frac-integrals | sum-frac-log | variance-integral | transform "
                      "(aliases: calcul1, calcul2, calcul3)");
    c_ver->add_option("--pmax", cfg.pmax, "largest p,q for the variance identity");
    c_ver->add_option("--n-grid", cfg.n_grid, "grid of n values")->delimiter(',');

    auto* c_clt = app.add_subcommand("clt", "variance growth and normality of a counting statistic");
    add_common(c_clt, cfg);
    c_clt->add_option("--statistic", cfg.statistic, "xtilde | x-fixed-a | x-proportional")
        ->check(CLI::IsMember({"xtilde", "x-fixed-a", "x-proportional"}));
    c_clt->add_option("--a-grid,--b-grid,--scale-grid", cfg.scale_grid, "scale grid")
        ->delimiter(',');
    c_clt->add_option("--a", cfg.a, "fixed left endpoint for x-fixed-a");
    c_clt->add_option("--nu", cfg.nu_str, "window ratio for x-proportional (int, r/s, or keyword)");
    c_clt->add_option("--ks-scale", cfg.ks_scale, "scale at which the KS verdict is taken");
    c_clt->add_option("--standardize", cfg.standardize, "theoretical | empirical")
        ->check(CLI::IsMember({"theoretical", "empirical"}));

    auto* c_tr = app.add_subcommand("translate", "shifted window versus phased process");
    add_common(c_tr, cfg);
    c_tr->add_option("--t", cfg.translate_t, "window length");
    c_tr->add_option("--s-grid,--scale-grid", cfg.scale_grid, "shift grid")->delimiter(',');

    auto* c_za = app.add_subcommand("za", "variance-rate diagnostic along a scale grid");
    add_common(c_za, cfg);
    c_za->add_option("--a-grid,--scale-grid", cfg.scale_grid, "scale grid")->delimiter(',');

    auto* c_cnt = app.add_subcommand("count", "draw counting statistics");
    add_common(c_cnt, cfg);
    c_cnt->add_option("--mode", cfg.mode, "tau-n | tau-n-modified | limit | limit-modified")
        ->check(CLI::IsMember({"tau-n", "tau-n-modified", "limit", "limit-modified"}));
    c_cnt->add_option("--n", cfg.n, "permutation size for tau-n modes");
    c_cnt->add_option("--a", cfg.a, "window left endpoint");
    c_cnt->add_option("--b", cfg.b, "window length");
    c_cnt->add_option("--A", cfg.big_a, "window [0,A] for limit-modified");
    c_cnt->add_option("--delta", cfg.delta, "truncation bound");
    c_cnt->add_flag("--dump", cfg.dump, "include cycle dumps");

    auto* c_gem = app.add_subcommand("sample-gem", "draw stick-breaking samples");
    add_common(c_gem, cfg);
    c_gem->add_option("--delta", cfg.delta, "truncation bound");
    c_gem->add_option("--scale-hint", cfg.scale_hint, "counting scale the sample must support");
    c_gem->add_flag("--dump", cfg.dump, "include full stick arrays");

    auto* c_poi = app.add_subcommand("sample-poisson", "draw scale-invariant process windows");
    add_common(c_poi, cfg);
    c_poi->add_option("--epsilon", cfg.epsilon, "lower window edge, in (0,1)");
    c_poi->add_option("--x-max", cfg.x_max, "upper window edge, > 1");
    c_poi->add_flag("--dump", cfg.dump, "include full point arrays");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        throw HelpShown{};
    }

    if (c_const->parsed()) cfg.command = Command::constants;
    else if (c_ver->parsed()) cfg.command = Command::verify_lemma;
    else if (c_clt->parsed()) cfg.command = Command::clt;
    else if (c_tr->parsed()) cfg.command = Command::translate;
    else if (c_za->parsed()) cfg.command = Command::za;
    else if (c_cnt->parsed()) cfg.command = Command::count;
    else if (c_gem->parsed()) cfg.command = Command::sample_gem;
    else if (c_poi->parsed()) cfg.command = Command::sample_poisson;
    return cfg;
}

inline int execute(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::constants: return run_constants(cfg);
        case Command::verify_lemma: return run_verify_lemma(cfg);
        case Command::clt: return run_clt(cfg);
        case Command::translate: return run_translate(cfg);
        case Command::za: return run_za(cfg);
        case Command::count: return run_count(cfg);
        case Command::sample_gem: return run_sample_gem(cfg);
        case Command::sample_poisson: return run_sample_poisson(cfg);
    }
    return 2;
}

// config errors exit 2, verdict failures exit 1, success 0
inline int run_cli(const std::vector<std::string>& args) {
    try {
        RunConfig cfg = parse_args(args);
        return execute(cfg);
    } catch (const HelpShown&) {
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace ewens::cli
