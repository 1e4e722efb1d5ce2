#include "tbt/equalizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace tbt {

namespace {

double clamp_sigma(double exponent, double floor) {
    // exp overflow saturates the logistic at the clamp bounds.
    if (exponent > 700.0) return floor;
    if (exponent < -700.0) return 1.0 - floor;
    const double s = 1.0 / (1.0 + std::exp(exponent));
    return std::clamp(s, floor, 1.0 - floor);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

bool uses_node_weights(EqualizerKind kind) {
    return kind == EqualizerKind::kTbt || kind == EqualizerKind::kFbt;
}

// Accumulates beta_k b_k id_k scaled by 1/sigma (left subtree) or
// -1/(1-sigma) (right subtree) over all nodes of the subtree rooted at
// `root`.
double subtree_sum(const TbtState& state, int root, double scale,
                   const std::vector<double>& indicators, const std::vector<double>& estimates,
                   const std::vector<double>& betas) {
    const int n = state.topology.node_count();
    double acc = 0.0;
    std::vector<int> stack{root};
    while (!stack.empty()) {
        const int k = stack.back();
        stack.pop_back();
        if (k > n) continue;
        acc += betas[k - 1] * estimates[k - 1] * indicators[k - 1] * scale;
        if (state.op_counter) *state.op_counter += 4;
        if (2 * k <= n) {
            stack.push_back(2 * k);
            stack.push_back(2 * k + 1);
        }
    }
    return acc;
}

}  // namespace

double soft_separator(const std::vector<double>& r, const std::vector<double>& n, double floor) {
    return clamp_sigma(dot(r, n), floor);
}

double soft_separator_complex(const std::vector<double>& r_re, const std::vector<double>& r_im,
                              const std::vector<double>& n_re, const std::vector<double>& n_im,
                              double floor) {
    return clamp_sigma(dot(r_re, n_re) + dot(r_im, n_im), floor);
}

std::vector<double> dfe_extend(const std::vector<double>& window,
                               const std::vector<int>& decisions) {
    std::vector<double> out = window;
    out.reserve(window.size() + decisions.size() + 1);
    for (int b : decisions) {
        if (b != 1 && b != -1) throw std::domain_error("dfe_extend: decision outside {-1,+1}");
        out.push_back(static_cast<double>(b));
    }
    out.push_back(1.0);
    return out;
}

TbtState init_state(const TbtOptions& options) {
    if (options.depth < 0 || options.h <= 0 || options.h_f < 0) {
        throw std::invalid_argument("init_state: bad sizes");
    }
    if (options.sigma_floor <= 0.0 || options.sigma_floor > 1e-6) {
        throw std::invalid_argument("init_state: sigma_floor outside (0, 1e-6]");
    }
    TbtState state{TreeTopology(options.depth), RhoTable(options.depth)};
    state.kind = options.kind;

    const int n = state.topology.node_count();
    const int len = options.h + options.h_f + 1;
    state.filters.assign(static_cast<std::size_t>(n), std::vector<double>(len, 0.0));
    state.node_weights.assign(static_cast<std::size_t>(n), 1.0 / n);
    state.filter_step.assign(static_cast<std::size_t>(n), options.filter_step);
    state.weight_step = options.weight_step;
    state.sigma_floor = options.sigma_floor;

    const bool frozen =
        options.kind == EqualizerKind::kFbt || options.kind == EqualizerKind::kFf;
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    state.separators.resize(static_cast<std::size_t>(state.topology.internal_count()));
    for (int j = 1; j <= state.topology.internal_count(); ++j) {
        SeparatorState& sep = state.separators[static_cast<std::size_t>(j - 1)];
        sep.direction.assign(static_cast<std::size_t>(len), 0.0);
        if (options.boundary_init == BoundaryInit::kAxis) {
            sep.direction[static_cast<std::size_t>(TreeTopology::node_depth(j) % options.h)] = 1.0;
        } else {
            double norm = 0.0;
            for (int i = 0; i + 1 < len; ++i) {
                sep.direction[static_cast<std::size_t>(i)] = gauss(rng);
                norm += sep.direction[static_cast<std::size_t>(i)] *
                        sep.direction[static_cast<std::size_t>(i)];
            }
            norm = std::sqrt(norm);
            for (int i = 0; i + 1 < len; ++i) sep.direction[static_cast<std::size_t>(i)] /= norm;
        }
        sep.step_size = frozen ? 0.0 : options.boundary_step;
    }
    return state;
}

std::vector<double> separator_values(const TbtState& state, const std::vector<double>& r) {
    std::vector<double> sigma(state.separators.size());
    for (std::size_t j = 0; j < state.separators.size(); ++j) {
        sigma[j] = soft_separator(r, state.separators[j].direction, state.sigma_floor);
    }
    return sigma;
}

std::vector<double> compute_indicators(const TreeTopology& topology,
                                       const std::vector<double>& sigma) {
    if (static_cast<int>(sigma.size()) != topology.internal_count()) {
        throw std::invalid_argument("compute_indicators: sigma length mismatch");
    }
    std::vector<double> id(static_cast<std::size_t>(topology.node_count()), 0.0);
    id[0] = 1.0;
    for (int j = 1; j <= topology.internal_count(); ++j) {
        id[static_cast<std::size_t>(2 * j - 1)] = sigma[static_cast<std::size_t>(j - 1)] *
                                                  id[static_cast<std::size_t>(j - 1)];
        id[static_cast<std::size_t>(2 * j)] =
            (1.0 - sigma[static_cast<std::size_t>(j - 1)]) * id[static_cast<std::size_t>(j - 1)];
    }
    return id;
}

std::vector<double> node_estimates(const TbtState& state, const std::vector<double>& r) {
    std::vector<double> est(state.filters.size());
    for (std::size_t k = 0; k < state.filters.size(); ++k) {
        est[k] = dot(state.filters[k], r);
    }
    return est;
}

std::vector<double> compute_betas(const TbtState& state) {
    const int n = state.topology.node_count();
    if (uses_node_weights(state.kind)) {
        if (state.op_counter) *state.op_counter += 2ULL * n * n;
        return state.rho_table.apply(state.node_weights);
    }
    std::vector<double> beta(static_cast<std::size_t>(n), 0.0);
    for (int k = 1; k <= n; ++k) {
        if (state.topology.is_leaf(k)) beta[static_cast<std::size_t>(k - 1)] = 1.0;
    }
    return beta;
}

double combine_direct(const std::vector<double>& indicators, const std::vector<double>& estimates,
                      const std::vector<double>& betas) {
    if (indicators.size() != estimates.size() || estimates.size() != betas.size()) {
        throw std::invalid_argument("combine_direct: length mismatch");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < betas.size(); ++k) acc += indicators[k] * estimates[k] * betas[k];
    return acc;
}

std::vector<std::vector<double>> boundary_gradient(const TbtState& state,
                                                   const std::vector<double>& r,
                                                   const std::vector<double>& sigma,
                                                   const std::vector<double>& indicators,
                                                   const std::vector<double>& estimates,
                                                   const std::vector<double>& betas) {
    const int internal = state.topology.internal_count();
    std::vector<std::vector<double>> grads(static_cast<std::size_t>(internal));
    for (int j = 1; j <= internal; ++j) {
        const double s = sigma[static_cast<std::size_t>(j - 1)];
        // Left-subtree indicators carry sigma_j, right-subtree ones (1 - sigma_j).
        const double left = subtree_sum(state, 2 * j, 1.0 / s, indicators, estimates, betas);
        const double right =
            subtree_sum(state, 2 * j + 1, -1.0 / (1.0 - s), indicators, estimates, betas);
        const double scale = -s * (1.0 - s) * (left + right);
        std::vector<double>& g = grads[static_cast<std::size_t>(j - 1)];
        g.resize(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) g[i] = scale * r[i];
    }
    return grads;
}

StepOutput tbt_step(TbtState& state, const std::vector<double>& r, std::optional<int> true_bit) {
    if (state.mode == EqualizerMode::kTrain && !true_bit) {
        throw std::invalid_argument("tbt_step: train mode requires the true bit");
    }
    if (static_cast<int>(r.size()) != state.regressor_length()) {
        throw std::invalid_argument("tbt_step: regressor length mismatch");
    }

    StepOutput out;
    const std::vector<double> sigma = separator_values(state, r);
    out.indicators = compute_indicators(state.topology, sigma);
    out.node_estimates = node_estimates(state, r);
    out.betas = compute_betas(state);
    out.soft_estimate = combine_direct(out.indicators, out.node_estimates, out.betas);
    if (state.op_counter) *state.op_counter += 3ULL * static_cast<std::uint64_t>(out.betas.size());
    out.decision = quantize(out.soft_estimate);

    const double reference = (state.mode == EqualizerMode::kTrain)
                                 ? static_cast<double>(*true_bit)
                                 : static_cast<double>(out.decision);
    out.soft_error = reference - out.soft_estimate;
    const double e = out.soft_error;

    const std::vector<std::vector<double>> grads =
        boundary_gradient(state, r, sigma, out.indicators, out.node_estimates, out.betas);

    const int n = state.topology.node_count();
    const bool weighted = uses_node_weights(state.kind);
    for (int k = 1; k <= n; ++k) {
        if (!weighted && !state.topology.is_leaf(k)) continue;
        const double step = state.filter_step[static_cast<std::size_t>(k - 1)] * e *
                            out.indicators[static_cast<std::size_t>(k - 1)];
        std::vector<double>& w = state.filters[static_cast<std::size_t>(k - 1)];
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += step * r[i];
    }
    if (weighted) {
        for (int k = 1; k <= n; ++k) {
            const double z = out.indicators[static_cast<std::size_t>(k - 1)] *
                             out.node_estimates[static_cast<std::size_t>(k - 1)];
            state.node_weights[static_cast<std::size_t>(k - 1)] += state.weight_step * e * z;
            if (state.op_counter) *state.op_counter += 4;
        }
    }
    for (std::size_t j = 0; j < state.separators.size(); ++j) {
        SeparatorState& sep = state.separators[j];
        if (sep.step_size == 0.0) continue;
        const std::vector<double>& g = grads[j];
        for (std::size_t i = 0; i < sep.direction.size(); ++i) {
            sep.direction[i] += sep.step_size * e * g[i];
        }
    }
    return out;
}

double combine_via_models_oracle(const TbtState& state, const std::vector<double>& r) {
    const int d = state.topology.depth;
    const std::vector<double> sigma = separator_values(state, r);
    const std::vector<double> id = compute_indicators(state.topology, sigma);
    const std::vector<double> est = node_estimates(state, r);

    double total = 0.0;
    for (const SubtreeModel& model : enumerate_models(d)) {
        double model_estimate = 0.0;
        double model_weight = 0.0;
        for (int leaf : model.leaf_set) {
            model_estimate += id[static_cast<std::size_t>(leaf - 1)] *
                              est[static_cast<std::size_t>(leaf - 1)];
            model_weight += state.node_weights[static_cast<std::size_t>(leaf - 1)];
        }
        total += model_estimate * model_weight;
    }
    return total;
}

LmsOutput linear_lms_step(LinearLms& state, const std::vector<double>& r, double reference) {
    LmsOutput out;
    out.estimate = dot(state.weights, r);
    out.error = reference - out.estimate;
    for (std::size_t i = 0; i < state.weights.size(); ++i) {
        state.weights[i] += state.step * out.error * r[i];
    }
    return out;
}

}  // namespace tbt
