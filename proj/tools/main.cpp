#include <charconv>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "crowddiff/cli.hpp"
#include "crowddiff/version.hpp"

namespace {

std::optional<std::vector<int>> parse_population_list(const std::string& text) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        int value = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (ec != std::errc() || ptr != item.data() + item.size() || value < 1) return std::nullopt;
        out.push_back(value);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) return std::nullopt;
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diffusion-adaptation crowd simulator"};
    app.set_version_flag("--version", std::string(crowddiff::kVersion));
    app.require_subcommand(0, 1);

    std::string run_config;
    std::string run_out = "out";
    std::optional<std::uint64_t> run_seed;
    std::optional<int> run_iterations;
    CLI::App* cmd_run = app.add_subcommand("run", "simulate one scenario");
    cmd_run->add_option("config", run_config, "scenario config file")->required();
    cmd_run->add_option("--out", run_out, "output directory");
    cmd_run->add_option("--seed", run_seed, "override the scenario seed");
    cmd_run->add_option("--iterations", run_iterations, "override the iteration count");

    std::string cmp_config;
    std::string cmp_out = "out";
    CLI::App* cmd_compare = app.add_subcommand("compare", "adaptive vs standard rules on one seed");
    cmd_compare->add_option("config", cmp_config, "scenario config file")->required();
    cmd_compare->add_option("--out", cmp_out, "output directory");

    std::string sweep_config;
    std::string sweep_out = "out";
    std::string sweep_values;
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "population sweep with a shared seed");
    cmd_sweep->add_option("config", sweep_config, "scenario config file")->required();
    cmd_sweep->add_option("--n", sweep_values, "comma-separated population sizes")->required();
    cmd_sweep->add_option("--out", sweep_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    if (cmd_run->parsed()) return crowddiff::cmd_run(run_config, run_out, run_seed, run_iterations);
    if (cmd_compare->parsed()) return crowddiff::cmd_compare(cmp_config, cmp_out);
    if (cmd_sweep->parsed()) {
        const auto values = parse_population_list(sweep_values);
        if (!values) {
            std::cerr << "sweep: --n expects comma-separated positive integers, got '" << sweep_values
                      << "'\n";
            return 1;
        }
        return crowddiff::cmd_sweep(sweep_config, *values, sweep_out);
    }
    std::cerr << app.help();
    return 1;
}
