#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tbt/harness.hpp"

namespace {

int cmd_run(const std::string& config_path, std::uint64_t* seed_override,
            const std::string& out_override) {
    tbt::ExperimentConfig config = tbt::parse_config_file(config_path);
    if (seed_override) config.seed = *seed_override;
    if (!out_override.empty()) config.output_path = out_override;
    if (config.output_path.empty()) {
        throw std::invalid_argument("run: no output path (run.output or --out)");
    }
    const tbt::ExperimentRecord record = tbt::run_trial(config, config.seed);
    tbt::write_trial_csv(config.output_path, record);
    std::cout << "variant=" << tbt::kind_name(config.kind) << " depth=" << config.depth
              << " ber=" << tbt::ber(record, config.train_length)
              << " final_nmse=" << tbt::nmse_curve(record).back() << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override) {
    tbt::ExperimentConfig config = tbt::parse_config_file(config_path);
    if (!out_override.empty()) config.output_path = out_override;
    if (config.output_path.empty()) {
        throw std::invalid_argument("sweep: no output path (run.output or --out)");
    }
    const std::vector<tbt::SweepCell> cells = tbt::run_sweep(config);
    tbt::write_sweep_csv(config.output_path, cells);
    std::cout << cells.size() << " cells written to " << config.output_path << "\n";
    return 0;
}

int cmd_oracle_check() {
    std::vector<std::string> log;
    bool ok = tbt::check_combinatorics(log);
    ok &= tbt::check_combination_equivalence(log);
    ok &= tbt::check_boundary_gradient(log);
    for (const std::string& line : log) std::cout << line << "\n";
    if (!ok) {
        std::cerr << "oracle check FAILED\n";
        return 3;
    }
    std::cout << "all oracle checks passed\n";
    return 0;
}

int cmd_complexity(int h) {
    std::cout << "depth,combine_ops_per_sample,ratio\n";
    std::uint64_t prev = 0;
    for (int d = 1; d <= 5; ++d) {
        const std::uint64_t ops = tbt::measure_step_operations(d, h);
        std::cout << d << ',' << ops;
        if (prev > 0) std::cout << ',' << static_cast<double>(ops) / static_cast<double>(prev);
        std::cout << "\n";
        prev = ops;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Turning-boundaries-tree channel equalizer harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int complexity_h = 2;

    CLI::App* run = app.add_subcommand("run", "Run a single trial and write the trial CSV");
    run->add_option("--config", config_path, "Config file")->required();
    run->add_option("--seed", seed, "Seed override")->each([&](const std::string&) {
        seed_given = true;
    });
    run->add_option("--out", out_path, "Output CSV path");

    CLI::App* sweep = app.add_subcommand("sweep", "Run the configured sweep and write the CSV");
    sweep->add_option("--config", config_path, "Config file")->required();
    sweep->add_option("--out", out_path, "Output CSV path");

    app.add_subcommand("oracle-check",
                       "Run the combinatorics, equivalence and gradient oracles");

    CLI::App* complexity =
        app.add_subcommand("complexity", "Measure per-sample operation counts across depths");
    complexity->add_option("--window", complexity_h, "Equalizer window length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, seed_given ? &seed : nullptr, out_path);
        if (sweep->parsed()) return cmd_sweep(config_path, out_path);
        if (app.get_subcommand("oracle-check")->parsed()) return cmd_oracle_check();
        if (complexity->parsed()) return cmd_complexity(complexity_h);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
