#include "tbt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

namespace tbt {

namespace {

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_double_list(text)) out.push_back(static_cast<int>(v));
    return out;
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw std::invalid_argument("config: bad boolean '" + text + "'");
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
    if (key == "channel.n1") c.channel.causal_taps = std::stoi(value);
    else if (key == "channel.n2") c.channel.anticausal_taps = std::stoi(value);
    else if (key == "channel.base_taps") c.channel.base_taps = parse_double_list(value);
    else if (key == "channel.variation") {
        if (value == "static") c.channel.variation = TapVariation::kStatic;
        else if (value == "sinusoidal") c.channel.variation = TapVariation::kSinusoidal;
        else if (value == "random_walk") c.channel.variation = TapVariation::kRandomWalk;
        else throw std::invalid_argument("config: unknown channel.variation '" + value + "'");
    } else if (key == "channel.sin_amplitude") c.channel.sin_amplitude = std::stod(value);
    else if (key == "channel.sin_frequency") c.channel.sin_frequency = parse_double_list(value);
    else if (key == "channel.sin_phase") c.channel.sin_phase = parse_double_list(value);
    else if (key == "channel.walk_step_std") c.channel.walk_step_std = std::stod(value);
    else if (key == "channel.snr_db") c.channel.snr_db = std::stod(value);
    else if (key == "channel.noiseless") c.channel.noiseless = parse_bool(value);
    else if (key == "channel.nonlinearity") {
        if (value == "none") c.channel.nonlinearity = Nonlinearity::kNone;
        else if (value == "saturating") c.channel.nonlinearity = Nonlinearity::kSaturating;
        else throw std::invalid_argument("config: unknown channel.nonlinearity '" + value + "'");
    } else if (key == "channel.saturation_scale") c.channel.saturation_scale = std::stod(value);
    else if (key == "equalizer.kind") c.kind = parse_kind(value);
    else if (key == "equalizer.depth") c.depth = std::stoi(value);
    else if (key == "equalizer.h") c.h = std::stoi(value);
    else if (key == "equalizer.h_f") c.h_f = std::stoi(value);
    else if (key == "equalizer.mu") c.mu = std::stod(value);
    else if (key == "equalizer.eta") c.eta = std::stod(value);
    else if (key == "equalizer.zeta") c.zeta = std::stod(value);
    else if (key == "equalizer.boundary_init") {
        if (value == "axis") c.boundary_init = BoundaryInit::kAxis;
        else if (value == "random") c.boundary_init = BoundaryInit::kRandom;
        else throw std::invalid_argument("config: unknown equalizer.boundary_init '" + value + "'");
    } else if (key == "run.train_length") c.train_length = std::stoi(value);
    else if (key == "run.total_symbols") c.total_symbols = std::stoi(value);
    else if (key == "run.trials") c.trials = std::stoi(value);
    else if (key == "run.seed") c.seed = std::stoull(value);
    else if (key == "run.training") {
        if (value == "pseudo_random") c.training = TrainingSource::kPseudoRandom;
        else if (value == "file") c.training = TrainingSource::kFile;
        else throw std::invalid_argument("config: unknown run.training '" + value + "'");
    } else if (key == "run.training_file") c.training_file = value;
    else if (key == "run.training_period") c.training_period = std::stoi(value);
    else if (key == "run.snr_sweep") c.snr_sweep = parse_double_list(value);
    else if (key == "run.variants") {
        c.variants.clear();
        std::stringstream ss(value);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) c.variants.push_back(parse_kind(trim(tok)));
        }
    } else if (key == "run.depths") c.depths = parse_int_list(value);
    else if (key == "run.output") c.output_path = value;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
    channel.validate();
    if (train_length >= total_symbols) {
        throw std::invalid_argument("config: train_length must be below total_symbols");
    }
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (h <= 0 || h_f < 0 || depth < 0) throw std::invalid_argument("config: bad equalizer sizes");
    if (training == TrainingSource::kFile && training_file.empty()) {
        throw std::invalid_argument("config: run.training=file requires run.training_file");
    }
    for (int d : depths) {
        if (d < 0) throw std::invalid_argument("config: negative depth in run.depths");
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        }
        apply_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    if (const char* env = std::getenv("TBT_SEED")) config.seed = std::stoull(env);
    config.validate();
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

EqualizerKind parse_kind(const std::string& name) {
    if (name == "TBT") return EqualizerKind::kTbt;
    if (name == "FBT") return EqualizerKind::kFbt;
    if (name == "FT") return EqualizerKind::kFt;
    if (name == "FF") return EqualizerKind::kFf;
    if (name == "LINEAR") return EqualizerKind::kLinear;
    throw std::invalid_argument("unknown equalizer kind '" + name + "'");
}

std::string kind_name(EqualizerKind kind) {
    switch (kind) {
        case EqualizerKind::kTbt: return "TBT";
        case EqualizerKind::kFbt: return "FBT";
        case EqualizerKind::kFt: return "FT";
        case EqualizerKind::kFf: return "FF";
        case EqualizerKind::kLinear: return "LINEAR";
    }
    return "?";
}

namespace {

std::vector<double> regressor_at(const std::vector<double>& received, int t, int h,
                                 const std::vector<int>& past_decisions, int h_f) {
    std::vector<double> window(static_cast<std::size_t>(h), 0.0);
    for (int i = 0; i < h; ++i) {
        const int idx = t - i;
        if (idx >= 0) window[static_cast<std::size_t>(i)] = received[static_cast<std::size_t>(idx)];
    }
    std::vector<int> feedback(static_cast<std::size_t>(h_f), 1);
    for (int i = 0; i < h_f; ++i) {
        const int idx = t - 1 - i;
        if (idx >= 0) feedback[static_cast<std::size_t>(i)] = past_decisions[static_cast<std::size_t>(idx)];
    }
    return dfe_extend(window, feedback);
}

}  // namespace

ExperimentRecord run_trial(const ExperimentConfig& config, std::uint64_t seed) {
    config.validate();

    const int length = config.total_symbols;
    std::vector<int> base;
    if (config.training == TrainingSource::kFile) {
        base = training_sequence_from_file(config.training_file);
    } else {
        base = training_sequence(config.training_period, seed ^ 0x5bf03635ULL);
    }
    const std::vector<int> bits = repeat_sequence(base, length);

    ChannelConfig channel = config.channel;
    channel.seed = seed;
    const std::vector<double> received = propagate(channel, bits);

    ExperimentRecord record;
    record.train_length = config.train_length;
    record.soft_errors.reserve(static_cast<std::size_t>(length));
    record.decisions.reserve(static_cast<std::size_t>(length));
    record.true_bits = bits;
    record.references.reserve(static_cast<std::size_t>(length));

    if (config.kind == EqualizerKind::kLinear) {
        LinearLms lms{std::vector<double>(static_cast<std::size_t>(config.h + config.h_f + 1), 0.0),
                      config.mu};
        for (int t = 0; t < length; ++t) {
            const std::vector<double> r =
                regressor_at(received, t, config.h, record.decisions, config.h_f);
            const double estimate = [&] {
                double acc = 0.0;
                for (std::size_t i = 0; i < r.size(); ++i) acc += lms.weights[i] * r[i];
                return acc;
            }();
            const int decision = quantize(estimate);
            const double reference = (t < config.train_length)
                                         ? static_cast<double>(bits[static_cast<std::size_t>(t)])
                                         : static_cast<double>(decision);
            const LmsOutput out = linear_lms_step(lms, r, reference);
            record.soft_errors.push_back(out.error);
            record.decisions.push_back(decision);
            record.references.push_back(reference);
        }
        return record;
    }

    TbtOptions options;
    options.depth = config.depth;
    options.h = config.h;
    options.h_f = config.h_f;
    options.filter_step = config.mu;
    options.weight_step = config.eta;
    options.boundary_step = config.zeta;
    options.boundary_init = config.boundary_init;
    options.seed = seed;
    options.kind = config.kind;
    TbtState state = init_state(options);

    const bool weighted =
        config.kind == EqualizerKind::kTbt || config.kind == EqualizerKind::kFbt;
    const RhoTable& rho = state.rho_table;

    for (int t = 0; t < length; ++t) {
        const std::vector<double> r =
            regressor_at(received, t, config.h, record.decisions, config.h_f);
        state.mode = (t < config.train_length) ? EqualizerMode::kTrain
                                               : EqualizerMode::kDecisionDirected;
        const StepOutput out = tbt_step(state, r, bits[static_cast<std::size_t>(t)]);
        record.soft_errors.push_back(out.soft_error);
        record.decisions.push_back(out.decision);
        record.references.push_back((t < config.train_length)
                                        ? static_cast<double>(bits[static_cast<std::size_t>(t)])
                                        : static_cast<double>(out.decision));
        if (weighted) {
            std::vector<double> z(out.indicators.size());
            for (std::size_t k = 0; k < z.size(); ++k) {
                z[k] = out.indicators[k] * out.node_estimates[k];
            }
            record.features.push_back(rho.apply(z));
            if (t % 100 == 0) record.weight_snapshots.push_back(state.node_weights);
        }
    }
    return record;
}

double ber(const ExperimentRecord& record, int skip) {
    const int length = static_cast<int>(record.decisions.size());
    if (skip >= length) throw std::invalid_argument("ber: skip beyond record length");
    int wrong = 0;
    for (int t = skip; t < length; ++t) {
        wrong += (record.decisions[static_cast<std::size_t>(t)] !=
                  record.true_bits[static_cast<std::size_t>(t)]);
    }
    return static_cast<double>(wrong) / static_cast<double>(length - skip);
}

std::vector<double> nmse_curve(const ExperimentRecord& record) {
    if (record.soft_errors.empty()) throw std::invalid_argument("nmse_curve: empty record");
    std::vector<double> out(record.soft_errors.size());
    double acc = 0.0;
    for (std::size_t t = 0; t < out.size(); ++t) {
        acc += record.soft_errors[t] * record.soft_errors[t];
        out[t] = acc / static_cast<double>(t + 1);
    }
    return out;
}

namespace {

// Symmetric positive-definite solve by Gaussian elimination with partial
// pivoting; the ridge floor keeps the system nonsingular.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int row = col + 1; row < n; ++row) {
            const double f = a[row][col] / a[col][col];
            for (int k = col; k < n; ++k) a[row][k] -= f * a[col][k];
            b[row] -= f * b[col];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int row = n - 1; row >= 0; --row) {
        double acc = b[row];
        for (int k = row + 1; k < n; ++k) acc -= a[row][k] * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(row)] = acc / a[row][row];
    }
    return x;
}

}  // namespace

OfflineFit offline_best_weights(const ExperimentRecord& record, int horizon) {
    if (record.features.empty()) {
        throw std::invalid_argument("offline_best_weights: record has no features");
    }
    const int length = (horizon > 0) ? horizon : static_cast<int>(record.features.size());
    const int dim = static_cast<int>(record.features.front().size());

    std::vector<std::vector<double>> gram(static_cast<std::size_t>(dim),
                                          std::vector<double>(static_cast<std::size_t>(dim), 0.0));
    std::vector<double> rhs(static_cast<std::size_t>(dim), 0.0);
    for (int t = 0; t < length; ++t) {
        const std::vector<double>& phi = record.features[static_cast<std::size_t>(t)];
        const double y = record.references[static_cast<std::size_t>(t)];
        for (int i = 0; i < dim; ++i) {
            rhs[static_cast<std::size_t>(i)] += y * phi[static_cast<std::size_t>(i)];
            for (int j = i; j < dim; ++j) {
                gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(j)];
            }
        }
    }
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < i; ++j) {
            gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                gram[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        }
        gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] += 1e-9;
    }

    OfflineFit fit;
    fit.weights = solve_dense(gram, rhs);
    for (int t = 0; t < length; ++t) {
        const std::vector<double>& phi = record.features[static_cast<std::size_t>(t)];
        double pred = 0.0;
        for (int i = 0; i < dim; ++i) {
            pred += fit.weights[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i)];
        }
        const double err = record.references[static_cast<std::size_t>(t)] - pred;
        fit.loss += err * err;
    }
    return fit;
}

std::vector<RegretPoint> regret_curve(const ExperimentRecord& record) {
    const int length = static_cast<int>(record.features.size());
    if (length == 0) throw std::invalid_argument("regret_curve: record has no features");

    std::vector<double> cumulative(static_cast<std::size_t>(length), 0.0);
    double acc = 0.0;
    for (int t = 0; t < length; ++t) {
        acc += record.soft_errors[static_cast<std::size_t>(t)] *
               record.soft_errors[static_cast<std::size_t>(t)];
        cumulative[static_cast<std::size_t>(t)] = acc;
    }

    std::vector<RegretPoint> out;
    for (int t = 1; t <= length; t *= 2) {
        const OfflineFit fit = offline_best_weights(record, t);
        out.push_back({t, cumulative[static_cast<std::size_t>(t - 1)] - fit.loss});
        if (t == length) break;
        if (2 * t > length) {
            const OfflineFit last = offline_best_weights(record, length);
            out.push_back({length, cumulative[static_cast<std::size_t>(length - 1)] - last.loss});
            break;
        }
    }
    return out;
}

std::vector<SweepCell> run_sweep(const ExperimentConfig& config) {
    config.validate();
    const std::vector<double> snrs =
        config.snr_sweep.empty() ? std::vector<double>{config.channel.snr_db} : config.snr_sweep;
    const std::vector<EqualizerKind> kinds =
        config.variants.empty() ? std::vector<EqualizerKind>{config.kind} : config.variants;
    const std::vector<int> depths =
        config.depths.empty() ? std::vector<int>{config.depth} : config.depths;

    std::vector<SweepCell> cells;
    for (double snr : snrs) {
        for (EqualizerKind kind : kinds) {
            for (int depth : depths) {
                for (int trial = 0; trial < config.trials; ++trial) {
                    ExperimentConfig cell_config = config;
                    cell_config.channel.snr_db = snr;
                    cell_config.kind = kind;
                    cell_config.depth = depth;
                    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(trial);
                    const ExperimentRecord record = run_trial(cell_config, seed);
                    SweepCell cell{kind, depth, config.h, snr, trial, seed, 0.0, 0.0};
                    cell.ber = ber(record, config.train_length);
                    cell.final_nmse = nmse_curve(record).back();
                    cells.push_back(cell);
                }
            }
        }
    }
    return cells;
}

void write_trial_csv(const std::string& path, const ExperimentRecord& record) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << std::setprecision(12);
    const std::vector<double> nmse = nmse_curve(record);
    const int weights =
        record.weight_snapshots.empty() ? 0 : static_cast<int>(record.weight_snapshots[0].size());

    out << "t,e,nmse,decision,true_bit";
    for (int k = 1; k <= weights; ++k) out << ",u_" << k;
    out << "\n";
    for (std::size_t t = 0; t < record.soft_errors.size(); ++t) {
        out << t + 1 << ',' << record.soft_errors[t] << ',' << nmse[t] << ','
            << record.decisions[t] << ',' << record.true_bits[t];
        if (weights > 0) {
            if (t % 100 == 0 && t / 100 < record.weight_snapshots.size()) {
                for (double u : record.weight_snapshots[t / 100]) out << ',' << u;
            } else {
                for (int k = 0; k < weights; ++k) out << ',';
            }
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

void write_sweep_csv(const std::string& path, const std::vector<SweepCell>& cells) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << std::setprecision(12);
    out << "variant,depth,h,snr_db,trial,seed,ber,final_nmse\n";
    for (const SweepCell& cell : cells) {
        out << kind_name(cell.kind) << ',' << cell.depth << ',' << cell.h << ',' << cell.snr_db
            << ',' << cell.trial << ',' << cell.seed << ',' << cell.ber << ',' << cell.final_nmse
            << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

namespace {

TbtState random_state(int depth, int h, std::mt19937_64& rng) {
    TbtOptions options;
    options.depth = depth;
    options.h = h;
    options.seed = rng();
    TbtState state = init_state(options);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto& w : state.filters) {
        for (double& v : w) v = gauss(rng);
    }
    for (double& u : state.node_weights) u = unit(rng);
    for (auto& sep : state.separators) {
        for (double& v : sep.direction) v = gauss(rng);
    }
    return state;
}

std::vector<double> random_regressor(int h, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> r(static_cast<std::size_t>(h + 1));
    for (int i = 0; i < h; ++i) r[static_cast<std::size_t>(i)] = gauss(rng);
    r.back() = 1.0;
    return r;
}

}  // namespace

bool check_combinatorics(std::vector<std::string>& log) {
    bool ok = true;
    for (int d = 1; d <= 4; ++d) {
        const auto models = enumerate_models(d);
        bool match = static_cast<std::int64_t>(models.size()) == alpha(d);
        const int n = (1 << (d + 1)) - 1;
        for (int j = 1; j <= n && match; ++j) {
            for (int k = j; k <= n; ++k) {
                if (rho(j, k, d) != rho_oracle(j, k, d)) {
                    match = false;
                    break;
                }
            }
        }
        log.push_back("combinatorics d=" + std::to_string(d) + (match ? ": ok" : ": MISMATCH"));
        ok &= match;
    }
    return ok;
}

bool check_combination_equivalence(std::vector<std::string>& log) {
    std::mt19937_64 rng(7);
    bool ok = true;
    for (int d = 1; d <= 3; ++d) {
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            TbtState state = random_state(d, 4, rng);
            const std::vector<double> r = random_regressor(4, rng);
            const std::vector<double> sigma = separator_values(state, r);
            const std::vector<double> id = compute_indicators(state.topology, sigma);
            const double direct =
                combine_direct(id, node_estimates(state, r), compute_betas(state));
            worst = std::max(worst, std::abs(direct - combine_via_models_oracle(state, r)));
        }
        const bool pass = worst <= 1e-10;
        log.push_back("combination equivalence d=" + std::to_string(d) +
                      " worst |delta|=" + std::to_string(worst) + (pass ? ": ok" : ": FAIL"));
        ok &= pass;
    }
    return ok;
}

bool check_boundary_gradient(std::vector<std::string>& log) {
    std::mt19937_64 rng(11);
    const int depth = 2;
    const int h = 3;
    const double step = 1e-6;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        TbtState state = random_state(depth, h, rng);
        const std::vector<double> r = random_regressor(h, rng);
        const std::vector<double> sigma = separator_values(state, r);
        const std::vector<double> id = compute_indicators(state.topology, sigma);
        const std::vector<double> est = node_estimates(state, r);
        const std::vector<double> beta = compute_betas(state);
        const auto grads = boundary_gradient(state, r, sigma, id, est, beta);

        for (std::size_t j = 0; j < state.separators.size(); ++j) {
            double diff2 = 0.0;
            double fd2 = 0.0;
            double an2 = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                auto eval = [&](double delta) {
                    state.separators[j].direction[i] += delta;
                    const std::vector<double> s2 = separator_values(state, r);
                    state.separators[j].direction[i] -= delta;
                    return combine_direct(compute_indicators(state.topology, s2), est, beta);
                };
                const double fd = (eval(step) - eval(-step)) / (2.0 * step);
                diff2 += (fd - grads[j][i]) * (fd - grads[j][i]);
                fd2 += fd * fd;
                an2 += grads[j][i] * grads[j][i];
            }
            const double scale = std::max({std::sqrt(fd2), std::sqrt(an2), 1e-3});
            worst = std::max(worst, std::sqrt(diff2) / scale);
        }
    }
    const bool pass = worst <= 1e-5;
    log.push_back("boundary gradient worst rel err=" + std::to_string(worst) +
                  (pass ? ": ok" : ": FAIL"));
    return pass;
}

std::uint64_t measure_step_operations(int depth, int h, int samples) {
    TbtOptions options;
    options.depth = depth;
    options.h = h;
    options.seed = 3;
    TbtState state = init_state(options);
    state.mode = EqualizerMode::kTrain;
    std::uint64_t ops = 0;
    state.op_counter = &ops;
    std::mt19937_64 rng(5);
    std::bernoulli_distribution coin(0.5);
    for (int t = 0; t < samples; ++t) {
        tbt_step(state, random_regressor(h, rng), coin(rng) ? 1 : -1);
    }
    return ops / static_cast<std::uint64_t>(samples);
}

}  // namespace tbt
