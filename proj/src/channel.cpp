#include "tbt/channel.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace tbt {

namespace {

double broadcast(const std::vector<double>& v, int i, const char* name) {
    if (v.size() == 1) return v[0];
    if (i < 0 || i >= static_cast<int>(v.size())) {
        throw std::invalid_argument(std::string("ChannelConfig: ") + name +
                                    " must have 1 entry or one per tap");
    }
    return v[static_cast<std::size_t>(i)];
}

double saturate(double r, double scale) {
    return r / (1.0 + std::abs(r) / scale);
}

}  // namespace

void ChannelConfig::validate() const {
    if (causal_taps < 0 || anticausal_taps < 0) {
        throw std::invalid_argument("ChannelConfig: negative tap counts");
    }
    if (static_cast<int>(base_taps.size()) != causal_taps + anticausal_taps + 1) {
        throw std::invalid_argument("ChannelConfig: base_taps length must be N1+N2+1");
    }
    bool any = false;
    for (double g : base_taps) any |= (g != 0.0);
    if (!any) throw std::invalid_argument("ChannelConfig: all-zero base taps");
    if (!std::isfinite(snr_db)) throw std::invalid_argument("ChannelConfig: snr_db not finite");
    if (sin_amplitude < 0.0 || sin_amplitude >= 1.0) {
        throw std::invalid_argument("ChannelConfig: sin_amplitude outside [0,1)");
    }
    if (walk_step_std < 0.0) throw std::invalid_argument("ChannelConfig: negative walk_step_std");
    if (nonlinearity == Nonlinearity::kSaturating && saturation_scale <= 0.0) {
        throw std::invalid_argument("ChannelConfig: saturation_scale must be positive");
    }
}

double noise_variance_from_snr(const ChannelConfig& config) {
    config.validate();
    double p_sig = 0.0;
    for (double g : config.base_taps) p_sig += g * g;
    return p_sig * std::pow(10.0, -config.snr_db / 10.0);
}

std::vector<double> taps_at(const ChannelConfig& config, int t) {
    if (t < 0) throw std::domain_error("taps_at: negative time index");
    switch (config.variation) {
        case TapVariation::kStatic:
            return config.base_taps;
        case TapVariation::kSinusoidal: {
            std::vector<double> taps(config.base_taps.size());
            for (int i = 0; i < static_cast<int>(taps.size()); ++i) {
                const double f = broadcast(config.sin_frequency, i, "sin_frequency");
                const double phi = broadcast(config.sin_phase, i, "sin_phase");
                taps[static_cast<std::size_t>(i)] =
                    config.base_taps[static_cast<std::size_t>(i)] *
                    (1.0 + config.sin_amplitude *
                               std::sin(2.0 * std::numbers::pi * f * t + phi));
            }
            return taps;
        }
        case TapVariation::kRandomWalk: {
            // Replay of the seeded walk; propagate() advances it incrementally.
            std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
            std::normal_distribution<double> step(0.0, config.walk_step_std);
            std::vector<double> taps = config.base_taps;
            for (int s = 1; s <= t; ++s) {
                for (double& g : taps) g += step(rng);
            }
            return taps;
        }
    }
    throw std::logic_error("taps_at: unknown variation");
}

std::vector<double> propagate(const ChannelConfig& config, const std::vector<int>& bits) {
    config.validate();
    if (bits.empty()) throw std::invalid_argument("propagate: empty bit sequence");

    const int n = static_cast<int>(bits.size());
    const int n1 = config.causal_taps;
    const int n2 = config.anticausal_taps;
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);

    std::mt19937_64 walk_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> walk_step(0.0, config.walk_step_std);
    std::vector<double> walk_taps = config.base_taps;

    std::mt19937_64 noise_rng(config.seed ^ 0xda942042e4dd58b5ULL);
    const double sigma = config.noiseless ? 0.0 : std::sqrt(noise_variance_from_snr(config));
    std::normal_distribution<double> noise(0.0, 1.0);

    for (int t = 0; t < n; ++t) {
        std::vector<double> taps;
        if (config.variation == TapVariation::kRandomWalk) {
            if (t > 0) {
                for (double& g : walk_taps) g += walk_step(walk_rng);
            }
            taps = walk_taps;
        } else {
            taps = taps_at(config, t);
        }
        double r = 0.0;
        for (int k = -n2; k <= n1; ++k) {
            const int idx = t - k;
            if (idx < 0 || idx >= n) continue;
            r += static_cast<double>(bits[static_cast<std::size_t>(idx)]) *
                 taps[static_cast<std::size_t>(k + n2)];
        }
        if (sigma > 0.0) r += sigma * noise(noise_rng);
        if (config.nonlinearity == Nonlinearity::kSaturating) {
            r = saturate(r, config.saturation_scale);
        }
        out[static_cast<std::size_t>(t)] = r;
    }
    return out;
}

std::vector<int> training_sequence(int length, std::uint64_t seed) {
    if (length <= 0) throw std::invalid_argument("training_sequence: length must be positive");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::vector<int> bits(static_cast<std::size_t>(length));
    for (int& b : bits) b = coin(rng) ? 1 : -1;
    return bits;
}

std::vector<int> training_sequence_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("training_sequence_from_file: cannot open " + path);
    std::vector<int> bits;
    std::string tok;
    while (in >> tok) {
        // Tolerate U+2212 minus from copy-pasted sequences.
        std::string norm = tok;
        if (norm.rfind("\xe2\x88\x92", 0) == 0) norm = "-" + norm.substr(3);
        if (norm == "+1" || norm == "1") {
            bits.push_back(1);
        } else if (norm == "-1") {
            bits.push_back(-1);
        } else {
            throw std::runtime_error("training_sequence_from_file: bad symbol '" + tok + "'");
        }
    }
    if (bits.empty()) throw std::runtime_error("training_sequence_from_file: empty sequence");
    return bits;
}

std::vector<int> repeat_sequence(const std::vector<int>& base, int length) {
    if (base.empty() || length <= 0) {
        throw std::invalid_argument("repeat_sequence: empty base or non-positive length");
    }
    std::vector<int> out(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) out[static_cast<std::size_t>(i)] = base[i % base.size()];
    return out;
}

}  // namespace tbt
