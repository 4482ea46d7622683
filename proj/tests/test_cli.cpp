#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "crowddiff/cli.hpp"

using namespace crowddiff;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    EXPECT_TRUE(in.good()) << path;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

int count_occurrences(const std::string& text, const std::string& needle) {
    int n = 0;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

int count_lines(const std::string& text) {
    return count_occurrences(text, "\n");
}

std::string test_dir(const std::string& leaf) {
    const fs::path dir = fs::path(testing::TempDir()) / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

const char* kSmallScenario =
    "n_agents = 8\n"
    "iterations = 20\n";

// flat corridor wider than the spacing-rule threshold everywhere, so the
// adaptive and standard rules act identically
const char* kWideScenario =
    "wall_upper = [30]\n"
    "wall_lower = [0]\n"
    "x_domain = [-40, 40]\n"
    "spawn_box = [-38, -24, 10, 20]\n"
    "target_mode = static\n"
    "target_position = [30, 15]\n"
    "n_agents = 8\n"
    "iterations = 20\n";

}  // namespace

TEST(Summary, CentroidSeriesMatchesTrajectory) {
    ScenarioConfig cfg;
    cfg.n_agents = 6;
    cfg.iterations = 12;
    const RunResult res = run(cfg);
    const std::vector<double> cx = centroid_x_series(res);
    ASSERT_EQ(cx.size(), 12u);
    for (int iter = 1; iter <= 12; ++iter) {
        double sum = 0.0;
        int count = 0;
        for (const TrajectoryRecord& t : res.trajectory) {
            if (t.iteration == iter) {
                sum += t.position.x;
                ++count;
            }
        }
        ASSERT_EQ(count, 6);
        EXPECT_NEAR(cx[iter - 1], sum / 6.0, 1e-12);
    }
}

TEST(Summary, WindowsFromHandBuiltRun) {
    RunResult r;
    r.config.n_agents = 2;
    r.band = {0.0, 1.0};
    r.metrics = {{1, 1.0, 3.0, 2, 0}, {2, 2.0, 2.5, 1, 5}, {3, 4.0, 2.0, 0, 3}, {4, 6.0, 5.0, 7, 1}};
    auto put = [&r](int iter, double x0, double x1) {
        r.trajectory.push_back({iter, 0, {x0, 0.0}, {}, Region::I, 3.0, 2.0, -1.0});
        r.trajectory.push_back({iter, 1, {x1, 0.0}, {}, Region::I, 3.0, 2.0, -1.0});
    };
    put(0, -5.0, -5.0);  // pre-run state, excluded from the windows
    put(1, -4.0, -6.0);  // centroid -5: wide side
    put(2, 0.0, 1.0);    // centroid 0.5: neck band
    put(3, -0.4, 0.0);   // centroid -0.2: neck band
    put(4, 6.0, 8.0);    // centroid 7: past the band, in neither window

    const RunSummary s = summarize_run(r);
    EXPECT_EQ(s.neck_window_iterations, 2);
    EXPECT_EQ(s.neck_window_first, 2);
    EXPECT_EQ(s.neck_window_last, 3);
    EXPECT_DOUBLE_EQ(s.neck_v_mean, 3.0);
    EXPECT_DOUBLE_EQ(s.neck_r_mean, 2.25);
    EXPECT_DOUBLE_EQ(s.neck_n_obs_mean, 0.5);
    EXPECT_DOUBLE_EQ(s.neck_n_neck_mean, 4.0);
    EXPECT_EQ(s.wide_window_iterations, 1);
    EXPECT_DOUBLE_EQ(s.wide_r_mean, 3.0);
    EXPECT_DOUBLE_EQ(s.wide_v_mean, 1.0);
    EXPECT_EQ(s.n_obs_total, 10);
    EXPECT_EQ(s.peak_n_neck, 5);
    EXPECT_EQ(s.peak_n_neck_iteration, 2);
    EXPECT_DOUBLE_EQ(s.min_r_mean, 2.0);
}

TEST(Report, CsvFormat) {
    const std::vector<MetricsRecord> metrics = {{1, 1.5, 0.1, 3, 2}};
    const std::string text = metrics_csv_text(metrics);
    EXPECT_EQ(text, "iteration,v_mean,r_mean,n_obs,n_neck\n1,1.5,0.1,3,2\n");
    EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Report, JsonlFormat) {
    std::vector<TrajectoryRecord> recs;
    recs.push_back({0, 3, {1.25, -2.0}, {0.5, 0.0}, Region::II, 2.5, 3.0, 4.5});
    recs.push_back({1, 0, {0.0, 0.0}, {0.0, 0.0}, Region::I, 3.0, 2.0, -1.0});
    const std::string text = trajectory_jsonl_text(recs);
    ASSERT_EQ(count_lines(text), 2);

    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    const auto j0 = nlohmann::json::parse(line);
    EXPECT_EQ(j0["iteration"], 0);
    EXPECT_EQ(j0["agent"], 3);
    EXPECT_DOUBLE_EQ(j0["x"].get<double>(), 1.25);
    EXPECT_DOUBLE_EQ(j0["y"].get<double>(), -2.0);
    EXPECT_EQ(j0["region"], "II");
    EXPECT_DOUBLE_EQ(j0["lc"].get<double>(), 4.5);

    std::getline(in, line);
    const auto j1 = nlohmann::json::parse(line);
    EXPECT_EQ(j1["region"], "I");
    EXPECT_TRUE(j1["lc"].is_null());
}

TEST(Report, SvgStructure) {
    ScenarioConfig cfg;
    cfg.n_agents = 5;
    cfg.iterations = 10;
    const RunResult res = run(cfg);
    const std::string svg = trajectory_svg_text(res);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_EQ(count_occurrences(svg, "<path "), 5);
    EXPECT_EQ(count_occurrences(svg, "<polyline "), 3);
    EXPECT_EQ(count_occurrences(svg, "class=\"wall\""), 2);
    EXPECT_EQ(count_occurrences(svg, "class=\"target\""), 1);
    EXPECT_EQ(count_occurrences(svg, "class=\"agent\""), 5);
}

TEST(CmdRun, WritesAllOutputs) {
    const std::string dir = test_dir("cmdrun_outputs");
    const std::string cfg_path = dir + "/scenario.cfg";
    spit(cfg_path, kSmallScenario);

    ASSERT_EQ(cmd_run(cfg_path, dir + "/out", std::nullopt, std::nullopt), 0);
    EXPECT_TRUE(fs::exists(dir + "/out/metrics.csv"));
    EXPECT_TRUE(fs::exists(dir + "/out/trajectory.jsonl"));
    EXPECT_TRUE(fs::exists(dir + "/out/trajectory.svg"));
    EXPECT_TRUE(fs::exists(dir + "/out/manifest.json"));

    const std::string csv = slurp(dir + "/out/metrics.csv");
    EXPECT_EQ(count_lines(csv), 21);  // header + 20 iterations
    EXPECT_EQ(csv.rfind("iteration,v_mean,r_mean,n_obs,n_neck\n", 0), 0u);

    const std::string jsonl = slurp(dir + "/out/trajectory.jsonl");
    EXPECT_EQ(count_lines(jsonl), 21 * 8);

    const auto manifest = nlohmann::json::parse(slurp(dir + "/out/manifest.json"));
    EXPECT_EQ(manifest["seed"], 1);
    EXPECT_EQ(manifest["tool_version"], kVersion);
    EXPECT_EQ(manifest["outputs"].size(), 3u);
    const std::string digest = manifest["config_hash"];
    EXPECT_EQ(digest.size(), 16u);
    EXPECT_EQ(digest.find_first_not_of("0123456789abcdef"), std::string::npos);
    EXPECT_EQ(digest, hex_digest(fnv1a64(kSmallScenario)));
}

TEST(CmdRun, IterationsOverrideZero) {
    const std::string dir = test_dir("cmdrun_zero");
    const std::string cfg_path = dir + "/scenario.cfg";
    spit(cfg_path, kSmallScenario);
    ASSERT_EQ(cmd_run(cfg_path, dir + "/out", std::nullopt, 0), 0);
    EXPECT_EQ(slurp(dir + "/out/metrics.csv"), "iteration,v_mean,r_mean,n_obs,n_neck\n");
}

TEST(CmdRun, SeedOverrideChangesResults) {
    const std::string dir = test_dir("cmdrun_seed");
    const std::string cfg_path = dir + "/scenario.cfg";
    spit(cfg_path, kSmallScenario);
    ASSERT_EQ(cmd_run(cfg_path, dir + "/a", std::nullopt, std::nullopt), 0);
    ASSERT_EQ(cmd_run(cfg_path, dir + "/b", 7, std::nullopt), 0);
    const auto manifest = nlohmann::json::parse(slurp(dir + "/b/manifest.json"));
    EXPECT_EQ(manifest["seed"], 7);
    EXPECT_NE(slurp(dir + "/a/metrics.csv"), slurp(dir + "/b/metrics.csv"));
}

TEST(CmdRun, RerunByteIdentical) {
    const std::string dir = test_dir("cmdrun_repeat");
    const std::string cfg_path = dir + "/scenario.cfg";
    spit(cfg_path, kSmallScenario);
    ASSERT_EQ(cmd_run(cfg_path, dir + "/a", std::nullopt, std::nullopt), 0);
    ASSERT_EQ(cmd_run(cfg_path, dir + "/b", std::nullopt, std::nullopt), 0);
    EXPECT_EQ(slurp(dir + "/a/metrics.csv"), slurp(dir + "/b/metrics.csv"));
    EXPECT_EQ(slurp(dir + "/a/trajectory.jsonl"), slurp(dir + "/b/trajectory.jsonl"));
    EXPECT_EQ(slurp(dir + "/a/trajectory.svg"), slurp(dir + "/b/trajectory.svg"));
}

TEST(CmdRun, MissingConfigFails) {
    const std::string dir = test_dir("cmdrun_missing");
    EXPECT_EQ(cmd_run(dir + "/no_such_file.cfg", dir + "/out", std::nullopt, std::nullopt), 1);
    EXPECT_FALSE(fs::exists(dir + "/out/metrics.csv"));
}

TEST(CmdCompare, WideCorridorMakesRulesCoincide) {
    const ScenarioConfig cfg = parse_config_text(kWideScenario);
    const ComparisonResult res = run_comparison(cfg);
    ASSERT_EQ(res.adaptive.metrics.size(), res.standard.metrics.size());
    for (std::size_t i = 0; i < res.adaptive.metrics.size(); ++i) {
        EXPECT_EQ(res.adaptive.metrics[i].v_mean, res.standard.metrics[i].v_mean);
        EXPECT_EQ(res.adaptive.metrics[i].r_mean, res.standard.metrics[i].r_mean);
        EXPECT_EQ(res.adaptive.metrics[i].n_obs, res.standard.metrics[i].n_obs);
        EXPECT_EQ(res.adaptive.metrics[i].n_neck, res.standard.metrics[i].n_neck);
    }
}

TEST(CmdCompare, PairedRunsShareInitialState) {
    const ScenarioConfig cfg = parse_config_text(kSmallScenario);
    const ComparisonResult res = run_comparison(cfg);
    for (int k = 0; k < cfg.n_agents; ++k) {
        EXPECT_EQ(res.adaptive.trajectory[k].position.x, res.standard.trajectory[k].position.x);
        EXPECT_EQ(res.adaptive.trajectory[k].position.y, res.standard.trajectory[k].position.y);
    }
}

TEST(CmdCompare, WritesOutputs) {
    const std::string dir = test_dir("cmdcompare");
    const std::string cfg_path = dir + "/scenario.cfg";
    spit(cfg_path, kWideScenario);
    ASSERT_EQ(cmd_compare(cfg_path, dir + "/out"), 0);

    const std::string csv = slurp(dir + "/out/compare.csv");
    EXPECT_EQ(csv.rfind("iteration,v_mean_adaptive,v_mean_standard,r_mean_adaptive,r_mean_standard,"
                        "n_obs_adaptive,n_obs_standard,n_neck_adaptive,n_neck_standard\n",
                        0),
              0u);
    EXPECT_EQ(count_lines(csv), 21);

    const auto summary = nlohmann::json::parse(slurp(dir + "/out/compare_summary.json"));
    ASSERT_TRUE(summary.contains("adaptive"));
    ASSERT_TRUE(summary.contains("standard"));
    ASSERT_TRUE(summary.contains("difference"));
    // the wide corridor keeps both rule sets identical, so every difference is 0
    EXPECT_DOUBLE_EQ(summary["difference"]["neck_v_mean"].get<double>(), 0.0);
    EXPECT_DOUBLE_EQ(summary["difference"]["neck_r_mean"].get<double>(), 0.0);
    EXPECT_EQ(summary["difference"]["n_obs_total"], 0);
}

TEST(CmdSweep, SingleValueMatchesPlainRun) {
    ScenarioConfig cfg = parse_config_text(kSmallScenario);
    const std::vector<SweepEntry> sweep = run_sweep(cfg, {8});
    ASSERT_EQ(sweep.size(), 1u);
    cfg.n_agents = 8;
    const RunResult direct = run(cfg);
    ASSERT_EQ(sweep[0].result.metrics.size(), direct.metrics.size());
    for (std::size_t i = 0; i < direct.metrics.size(); ++i)
        EXPECT_EQ(sweep[0].result.metrics[i].r_mean, direct.metrics[i].r_mean);
}

TEST(CmdSweep, WritesOutputs) {
    const std::string dir = test_dir("cmdsweep");
    const std::string cfg_path = dir + "/scenario.cfg";
    spit(cfg_path, "n_agents = 8\niterations = 10\n");
    ASSERT_EQ(cmd_sweep(cfg_path, {6, 9}, dir + "/out"), 0);

    const std::string csv = slurp(dir + "/out/sweep.csv");
    EXPECT_EQ(csv.rfind("iteration,r_mean_n6,r_mean_n9\n", 0), 0u);
    EXPECT_EQ(count_lines(csv), 11);

    const auto summary = nlohmann::json::parse(slurp(dir + "/out/sweep_summary.json"));
    ASSERT_EQ(summary["runs"].size(), 2u);
    EXPECT_EQ(summary["runs"][0]["n"], 6);
    EXPECT_EQ(summary["runs"][1]["n"], 9);
    EXPECT_EQ(summary["seed"], 1);
}

TEST(Binary, VersionFlag) {
    const std::string dir = test_dir("bin_version");
    const std::string out_path = dir + "/version.txt";
    const std::string cmd = std::string(CROWDSIM_BIN) + " --version > " + out_path + " 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_NE(slurp(out_path).find(kVersion), std::string::npos);
}

TEST(Binary, RunSubcommand) {
    const std::string dir = test_dir("bin_run");
    const std::string cfg_path = dir + "/scenario.cfg";
    spit(cfg_path, "n_agents = 6\niterations = 10\n");
    const std::string cmd =
        std::string(CROWDSIM_BIN) + " run " + cfg_path + " --out " + dir + "/out > /dev/null 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(dir + "/out/metrics.csv"));
    EXPECT_EQ(count_lines(slurp(dir + "/out/metrics.csv")), 11);
}

TEST(Binary, SweepSubcommandParsesPopulationList) {
    const std::string dir = test_dir("bin_sweep");
    const std::string cfg_path = dir + "/scenario.cfg";
    spit(cfg_path, "n_agents = 6\niterations = 5\n");
    const std::string cmd = std::string(CROWDSIM_BIN) + " sweep " + cfg_path + " --n 5,7 --out " + dir +
                            "/out > /dev/null 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    const std::string csv = slurp(dir + "/out/sweep.csv");
    EXPECT_EQ(csv.rfind("iteration,r_mean_n5,r_mean_n7\n", 0), 0u);
}

TEST(Binary, MissingConfigNonzeroExit) {
    const std::string dir = test_dir("bin_missing");
    const std::string cmd =
        std::string(CROWDSIM_BIN) + " run " + dir + "/absent.cfg --out " + dir + "/out > /dev/null 2>&1";
    EXPECT_NE(std::system(cmd.c_str()), 0);
}
