#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tbt/channel.hpp"
#include "tbt/equalizer.hpp"

namespace tbt {

enum class TrainingSource { kPseudoRandom, kFile };

struct ExperimentConfig {
    ChannelConfig channel;

    EqualizerKind kind = EqualizerKind::kTbt;
    int depth = 2;
    int h = 8;
    int h_f = 0;
    double mu = 0.01;
    double eta = 0.01;
    double zeta = 0.01;
    BoundaryInit boundary_init = BoundaryInit::kAxis;

    int train_length = 2800;
    int total_symbols = 28000;
    int trials = 1;
    std::uint64_t seed = 1;

    TrainingSource training = TrainingSource::kPseudoRandom;
    std::string training_file;
    int training_period = 28;

    std::vector<double> snr_sweep;       // empty: use channel.snr_db only
    std::vector<EqualizerKind> variants; // empty: use kind only
    std::vector<int> depths;             // empty: use depth only

    std::string output_path;

    void validate() const;
};

/// Parses the flat key=value config format ('#' comments, unknown keys are
/// errors).  TBT_SEED in the environment overrides run.seed.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

EqualizerKind parse_kind(const std::string& name);
std::string kind_name(EqualizerKind kind);

/// Per-trial time series plus everything the regret analysis needs.
struct ExperimentRecord {
    std::vector<double> soft_errors;        // e(t) as used by the update loop
    std::vector<int> decisions;
    std::vector<int> true_bits;
    std::vector<double> references;         // b_bar(t)
    std::vector<std::vector<double>> features;  // phi(t) = Rho z(t); weighted kinds only
    std::vector<std::vector<double>> weight_snapshots;  // u every 100 samples
    int train_length = 0;
};

ExperimentRecord run_trial(const ExperimentConfig& config, std::uint64_t seed);

double ber(const ExperimentRecord& record, int skip);
std::vector<double> nmse_curve(const ExperimentRecord& record);

struct OfflineFit {
    std::vector<double> weights;  // z*
    double loss = 0.0;
};

/// Least-squares fit of a fixed combination weight against the recorded
/// features over t <= horizon (0: whole record), ridge floor 1e-9.
OfflineFit offline_best_weights(const ExperimentRecord& record, int horizon = 0);

struct RegretPoint {
    int t = 0;
    double regret = 0.0;
};

/// Cumulative loss minus the prefix-optimal fixed-weight loss at
/// logarithmically spaced checkpoints.
std::vector<RegretPoint> regret_curve(const ExperimentRecord& record);

struct SweepCell {
    EqualizerKind kind;
    int depth = 0;
    int h = 0;
    double snr_db = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    double ber = 0.0;
    double final_nmse = 0.0;
};

std::vector<SweepCell> run_sweep(const ExperimentConfig& config);

void write_trial_csv(const std::string& path, const ExperimentRecord& record);
void write_sweep_csv(const std::string& path, const std::vector<SweepCell>& cells);

/// Self-check suites behind the `oracle-check` subcommand.  Each returns
/// true on success and appends one line per check to `log`.
bool check_combinatorics(std::vector<std::string>& log);
bool check_combination_equivalence(std::vector<std::string>& log);
bool check_boundary_gradient(std::vector<std::string>& log);

/// Instrumented per-sample arithmetic-operation count of a TBT step.
std::uint64_t measure_step_operations(int depth, int h, int samples = 200);

}  // namespace tbt
