#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tbt/tree.hpp"

namespace tbt {

enum class EqualizerKind { kTbt, kFbt, kFt, kFf, kLinear };
enum class EqualizerMode { kTrain, kDecisionDirected };
enum class BoundaryInit { kAxis, kRandom };

/// Logistic routing function sigma = 1/(1 + exp(r.n)), clamped to
/// [floor, 1-floor].  The bias of the hyperplane is absorbed into the last
/// entry of n against the regressor's trailing 1.
double soft_separator(const std::vector<double>& r, const std::vector<double>& n,
                      double floor = 1e-12);

/// Complex-data variant: the exponent is r_re.n_re + r_im.n_im.
double soft_separator_complex(const std::vector<double>& r_re, const std::vector<double>& r_im,
                              const std::vector<double>& n_re, const std::vector<double>& n_im,
                              double floor = 1e-12);

/// Sign quantizer; a tie at exactly zero decides +1.
inline int quantize(double soft) { return soft >= 0.0 ? 1 : -1; }

/// Appends past quantized decisions and the bias 1 to a received window.
std::vector<double> dfe_extend(const std::vector<double>& window, const std::vector<int>& decisions);

struct SeparatorState {
    std::vector<double> direction;  // n with bias absorbed, length h + h_f + 1
    double step_size = 0.0;         // zeta
};

struct StepOutput {
    double soft_estimate = 0.0;
    int decision = 1;
    double soft_error = 0.0;
    std::vector<double> node_estimates;
    std::vector<double> indicators;
    std::vector<double> betas;
};

/// Full mutable state of a tree equalizer.  Node arrays are 0-based over
/// heap indices 1..N (entry i holds node i+1); separator entry j holds
/// internal node j+1.
struct TbtState {
    TreeTopology topology;
    RhoTable rho_table;
    EqualizerKind kind = EqualizerKind::kTbt;
    EqualizerMode mode = EqualizerMode::kTrain;

    std::vector<std::vector<double>> filters;  // w_k
    std::vector<double> node_weights;          // u_k
    std::vector<SeparatorState> separators;    // n_j, internal nodes only
    std::vector<double> filter_step;           // mu_k
    double weight_step = 0.0;                  // eta
    double sigma_floor = 1e-12;

    // When set, the combination-stage loops (betas, combined estimate,
    // weight updates, gradient subtree sums) add their multiply/add counts
    // here.  The per-node filtering cost is the same O(h) per node as any
    // LMS bank and is excluded so the counter isolates the tree overhead.
    std::uint64_t* op_counter = nullptr;

    int regressor_length() const { return static_cast<int>(filters.at(0).size()); }
};

struct TbtOptions {
    int depth = 2;
    int h = 8;        // received window length
    int h_f = 0;      // feedback taps (DFE); 0 disables
    double filter_step = 0.01;
    double weight_step = 0.01;
    double boundary_step = 0.01;
    double sigma_floor = 1e-12;
    BoundaryInit boundary_init = BoundaryInit::kAxis;
    std::uint64_t seed = 1;
    EqualizerKind kind = EqualizerKind::kTbt;
};

/// Builds a fresh state: w = 0, u = 1/N, boundaries per policy.  FBT and FF
/// get zero boundary steps regardless of the option.
TbtState init_state(const TbtOptions& options);

/// Per-internal-node separator values for a regressor.
std::vector<double> separator_values(const TbtState& state, const std::vector<double>& r);

/// Hierarchical soft indicators: id_1 = 1, id_2j = sigma_j id_j,
/// id_2j+1 = (1 - sigma_j) id_j.
std::vector<double> compute_indicators(const TreeTopology& topology,
                                       const std::vector<double>& sigma);

/// Per-node inner products w_k . r.
std::vector<double> node_estimates(const TbtState& state, const std::vector<double>& r);

/// beta_k = sum_j u_j rho(j,k) for the tree variants; for the
/// finest-partition variants, 1 on leaves and 0 elsewhere.
std::vector<double> compute_betas(const TbtState& state);

/// Final estimate sum_k id_k b_k beta_k.
double combine_direct(const std::vector<double>& indicators, const std::vector<double>& estimates,
                      const std::vector<double>& betas);

/// d(b_hat)/d(n_j) for every internal node j, via the subtree sums.
std::vector<std::vector<double>> boundary_gradient(const TbtState& state,
                                                   const std::vector<double>& r,
                                                   const std::vector<double>& sigma,
                                                   const std::vector<double>& indicators,
                                                   const std::vector<double>& estimates,
                                                   const std::vector<double>& betas);

/// One full equalizer iteration: estimate, error, and the three update
/// families, all from pre-update quantities.  true_bit is required in train
/// mode and ignored otherwise.
StepOutput tbt_step(TbtState& state, const std::vector<double>& r, std::optional<int> true_bit);

/// Reference combination that explicitly enumerates all alpha_d pruned
/// subtrees; must match combine_direct.  Guarded at depth <= 4.
double combine_via_models_oracle(const TbtState& state, const std::vector<double>& r);

/// Plain LMS filter used as the linear baseline.
struct LinearLms {
    std::vector<double> weights;
    double step = 0.01;
};

struct LmsOutput {
    double estimate = 0.0;
    double error = 0.0;
};

LmsOutput linear_lms_step(LinearLms& state, const std::vector<double>& r, double reference);

}  // namespace tbt
