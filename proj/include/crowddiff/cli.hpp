#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "crowddiff/config.hpp"
#include "crowddiff/engine.hpp"
#include "crowddiff/report.hpp"
#include "crowddiff/version.hpp"

namespace crowddiff {

// Per-iteration mean x of the population, taken from the trajectory records
// of iterations 1..K (index 0 holds the pre-run state).
inline std::vector<double> centroid_x_series(const RunResult& r) {
    const int iters = static_cast<int>(r.metrics.size());
    const int n = r.config.n_agents;
    std::vector<double> out(iters, 0.0);
    for (const TrajectoryRecord& t : r.trajectory) {
        if (t.iteration >= 1 && t.iteration <= iters) out[t.iteration - 1] += t.position.x;
    }
    for (double& v : out) v /= n;
    return out;
}

// Windowed digest of one run. The neck window is the set of iterations whose
// population centroid sits inside the neck band; the wide window is the set
// left of the band.
struct RunSummary {
    double neck_x = 0.0;
    double band_half_width = 0.0;
    int neck_window_iterations = 0;
    int neck_window_first = 0;
    int neck_window_last = 0;
    double neck_v_mean = 0.0;
    double neck_r_mean = 0.0;
    double neck_n_obs_mean = 0.0;
    double neck_n_neck_mean = 0.0;
    int wide_window_iterations = 0;
    double wide_r_mean = 0.0;
    double wide_v_mean = 0.0;
    long long n_obs_total = 0;
    int peak_n_neck = 0;
    int peak_n_neck_iteration = 0;
    double min_r_mean = 0.0;
};

inline RunSummary summarize_run(const RunResult& r) {
    RunSummary s;
    s.neck_x = r.band.center_x;
    s.band_half_width = r.band.half_width;
    const std::vector<double> cx = centroid_x_series(r);
    double neck_v = 0.0, neck_r = 0.0, neck_obs = 0.0, neck_cnt_nn = 0.0;
    double wide_r = 0.0, wide_v = 0.0;
    for (std::size_t i = 0; i < r.metrics.size(); ++i) {
        const MetricsRecord& m = r.metrics[i];
        s.n_obs_total += m.n_obs;
        if (m.n_neck > s.peak_n_neck) {
            s.peak_n_neck = m.n_neck;
            s.peak_n_neck_iteration = m.iteration;
        }
        if (i == 0 || m.r_mean < s.min_r_mean) s.min_r_mean = m.r_mean;
        const double off = cx[i] - r.band.center_x;
        if (std::abs(off) <= r.band.half_width) {
            if (s.neck_window_iterations == 0) s.neck_window_first = m.iteration;
            s.neck_window_last = m.iteration;
            ++s.neck_window_iterations;
            neck_v += m.v_mean;
            neck_r += m.r_mean;
            neck_obs += m.n_obs;
            neck_cnt_nn += m.n_neck;
        } else if (off < 0.0) {
            ++s.wide_window_iterations;
            wide_r += m.r_mean;
            wide_v += m.v_mean;
        }
    }
    if (s.neck_window_iterations > 0) {
        s.neck_v_mean = neck_v / s.neck_window_iterations;
        s.neck_r_mean = neck_r / s.neck_window_iterations;
        s.neck_n_obs_mean = neck_obs / s.neck_window_iterations;
        s.neck_n_neck_mean = neck_cnt_nn / s.neck_window_iterations;
    }
    if (s.wide_window_iterations > 0) {
        s.wide_r_mean = wide_r / s.wide_window_iterations;
        s.wide_v_mean = wide_v / s.wide_window_iterations;
    }
    return s;
}

inline nlohmann::json summary_json(const RunSummary& s) {
    return {{"neck_x", s.neck_x},
            {"band_half_width", s.band_half_width},
            {"neck_window_iterations", s.neck_window_iterations},
            {"neck_window_first", s.neck_window_first},
            {"neck_window_last", s.neck_window_last},
            {"neck_v_mean", s.neck_v_mean},
            {"neck_r_mean", s.neck_r_mean},
            {"neck_n_obs_mean", s.neck_n_obs_mean},
            {"neck_n_neck_mean", s.neck_n_neck_mean},
            {"wide_window_iterations", s.wide_window_iterations},
            {"wide_r_mean", s.wide_r_mean},
            {"wide_v_mean", s.wide_v_mean},
            {"n_obs_total", s.n_obs_total},
            {"peak_n_neck", s.peak_n_neck},
            {"peak_n_neck_iteration", s.peak_n_neck_iteration},
            {"min_r_mean", s.min_r_mean}};
}

struct ComparisonResult {
    RunResult adaptive;
    RunResult standard;
    RunSummary adaptive_summary;
    RunSummary standard_summary;
};

// Same scenario (and seed) twice: width-adaptive rules on vs. off.
inline ComparisonResult run_comparison(const ScenarioConfig& cfg) {
    ScenarioConfig on = cfg;
    on.avid_enabled = true;
    ScenarioConfig off = cfg;
    off.avid_enabled = false;
    ComparisonResult out{run(on), run(off), {}, {}};
    out.adaptive_summary = summarize_run(out.adaptive);
    out.standard_summary = summarize_run(out.standard);
    return out;
}

inline std::string comparison_csv_text(const ComparisonResult& c) {
    std::string out =
        "iteration,v_mean_adaptive,v_mean_standard,r_mean_adaptive,r_mean_standard,"
        "n_obs_adaptive,n_obs_standard,n_neck_adaptive,n_neck_standard\n";
    for (std::size_t i = 0; i < c.adaptive.metrics.size(); ++i) {
        const MetricsRecord& a = c.adaptive.metrics[i];
        const MetricsRecord& s = c.standard.metrics[i];
        out += std::to_string(a.iteration);
        out += ',' + detail::csv_num(a.v_mean) + ',' + detail::csv_num(s.v_mean);
        out += ',' + detail::csv_num(a.r_mean) + ',' + detail::csv_num(s.r_mean);
        out += ',' + std::to_string(a.n_obs) + ',' + std::to_string(s.n_obs);
        out += ',' + std::to_string(a.n_neck) + ',' + std::to_string(s.n_neck);
        out += '\n';
    }
    return out;
}

inline nlohmann::json comparison_summary_json(const ComparisonResult& c) {
    const RunSummary& a = c.adaptive_summary;
    const RunSummary& s = c.standard_summary;
    return {{"adaptive", summary_json(a)},
            {"standard", summary_json(s)},
            {"difference",
             {{"neck_v_mean", a.neck_v_mean - s.neck_v_mean},
              {"neck_r_mean", a.neck_r_mean - s.neck_r_mean},
              {"neck_n_obs_mean", a.neck_n_obs_mean - s.neck_n_obs_mean},
              {"neck_n_neck_mean", a.neck_n_neck_mean - s.neck_n_neck_mean},
              {"n_obs_total", a.n_obs_total - s.n_obs_total},
              {"peak_n_neck_iteration", a.peak_n_neck_iteration - s.peak_n_neck_iteration}}}};
}

struct SweepEntry {
    int n = 0;
    RunResult result;
    RunSummary summary;
};

// One run per population size, identical seed and scenario otherwise.
inline std::vector<SweepEntry> run_sweep(const ScenarioConfig& cfg, const std::vector<int>& values) {
    if (values.empty()) throw InputError("run_sweep: no population values");
    std::vector<SweepEntry> out;
    out.reserve(values.size());
    for (int n : values) {
        if (n < 1) throw InputError("run_sweep: population values must be >= 1");
        ScenarioConfig c = cfg;
        c.n_agents = n;
        SweepEntry e;
        e.n = n;
        e.result = run(c);
        e.summary = summarize_run(e.result);
        out.push_back(std::move(e));
    }
    return out;
}

inline std::string sweep_csv_text(const std::vector<SweepEntry>& entries) {
    std::string out = "iteration";
    for (const SweepEntry& e : entries) out += ",r_mean_n" + std::to_string(e.n);
    out += '\n';
    const std::size_t rows = entries.empty() ? 0 : entries.front().result.metrics.size();
    for (std::size_t i = 0; i < rows; ++i) {
        out += std::to_string(entries.front().result.metrics[i].iteration);
        for (const SweepEntry& e : entries) out += ',' + detail::csv_num(e.result.metrics[i].r_mean);
        out += '\n';
    }
    return out;
}

inline nlohmann::json sweep_summary_json(const std::vector<SweepEntry>& entries, std::uint64_t seed) {
    nlohmann::json runs = nlohmann::json::array();
    for (const SweepEntry& e : entries) {
        runs.push_back({{"n", e.n},
                        {"min_r_mean", e.summary.min_r_mean},
                        {"neck_r_mean", e.summary.neck_r_mean},
                        {"wide_r_mean", e.summary.wide_r_mean},
                        {"neck_window_iterations", e.summary.neck_window_iterations},
                        {"wide_window_iterations", e.summary.wide_window_iterations}});
    }
    return {{"seed", seed}, {"runs", runs}};
}

namespace detail {

inline nlohmann::json manifest_json(const std::string& config_text, std::uint64_t seed,
                                    const std::vector<std::string>& outputs, double duration_seconds) {
    return {{"config_hash", hex_digest(fnv1a64(config_text))},
            {"seed", seed},
            {"outputs", outputs},
            {"tool_version", kVersion},
            {"duration_seconds", duration_seconds}};
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace detail

// Scenario run: metrics.csv, trajectory.jsonl, trajectory.svg, manifest.json.
inline int cmd_run(const std::string& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed_override, std::optional<int> iterations_override) {
    try {
        const auto t0 = std::chrono::steady_clock::now();
        const std::string config_text = read_file_text(config_path);
        ScenarioConfig cfg = parse_config_text(config_text);
        if (seed_override) cfg.seed = *seed_override;
        if (iterations_override) {
            if (*iterations_override < 0) throw ConfigError("--iterations must be >= 0");
            cfg.iterations = *iterations_override;
        }
        validate_config(cfg);

        std::filesystem::create_directories(out_dir);
        const RunResult result = run(cfg);
        const std::string metrics_path = out_dir + "/metrics.csv";
        const std::string traj_path = out_dir + "/trajectory.jsonl";
        const std::string svg_path = out_dir + "/trajectory.svg";
        const std::string manifest_path = out_dir + "/manifest.json";
        write_metrics_csv(metrics_path, result.metrics);
        write_trajectory_jsonl(traj_path, result.trajectory);
        write_trajectory_svg(svg_path, result);
        const auto t1 = std::chrono::steady_clock::now();
        detail::write_json_file(
            manifest_path,
            detail::manifest_json(config_text, cfg.seed, {metrics_path, traj_path, svg_path},
                                  std::chrono::duration<double>(t1 - t0).count()));
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "run: " << e.what() << "\n";
        return 1;
    }
}

// A/B experiment: adaptive vs. standard rules, paired CSV plus summary JSON.
inline int cmd_compare(const std::string& config_path, const std::string& out_dir) {
    try {
        const auto t0 = std::chrono::steady_clock::now();
        const std::string config_text = read_file_text(config_path);
        const ScenarioConfig cfg = parse_config_text(config_text);
        std::filesystem::create_directories(out_dir);
        const ComparisonResult result = run_comparison(cfg);
        const std::string csv_path = out_dir + "/compare.csv";
        const std::string summary_path = out_dir + "/compare_summary.json";
        const std::string manifest_path = out_dir + "/manifest.json";
        detail::write_text_file(csv_path, comparison_csv_text(result));
        detail::write_json_file(summary_path, comparison_summary_json(result));
        const auto t1 = std::chrono::steady_clock::now();
        detail::write_json_file(manifest_path,
                                detail::manifest_json(config_text, cfg.seed, {csv_path, summary_path},
                                                      std::chrono::duration<double>(t1 - t0).count()));
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "compare: " << e.what() << "\n";
        return 1;
    }
}

// Population sweep with a shared seed: combined r_mean CSV plus summary JSON.
inline int cmd_sweep(const std::string& config_path, const std::vector<int>& values,
                     const std::string& out_dir) {
    try {
        const auto t0 = std::chrono::steady_clock::now();
        const std::string config_text = read_file_text(config_path);
        const ScenarioConfig cfg = parse_config_text(config_text);
        std::filesystem::create_directories(out_dir);
        const std::vector<SweepEntry> entries = run_sweep(cfg, values);
        const std::string csv_path = out_dir + "/sweep.csv";
        const std::string summary_path = out_dir + "/sweep_summary.json";
        const std::string manifest_path = out_dir + "/manifest.json";
        detail::write_text_file(csv_path, sweep_csv_text(entries));
        detail::write_json_file(summary_path, sweep_summary_json(entries, cfg.seed));
        const auto t1 = std::chrono::steady_clock::now();
        detail::write_json_file(manifest_path,
                                detail::manifest_json(config_text, cfg.seed, {csv_path, summary_path},
                                                      std::chrono::duration<double>(t1 - t0).count()));
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "sweep: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace crowddiff
