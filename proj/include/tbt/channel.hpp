#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tbt {

enum class TapVariation { kStatic, kSinusoidal, kRandomWalk };
enum class Nonlinearity { kNone, kSaturating };

/// Discrete tap-delay ISI channel with additive white Gaussian noise.
/// base_taps holds the anticausal taps first: index i is the tap at lag
/// i - anticausal_taps, so taps run over lags -N2..N1.
struct ChannelConfig {
    int causal_taps = 0;      // N1
    int anticausal_taps = 0;  // N2
    std::vector<double> base_taps{1.0};

    TapVariation variation = TapVariation::kStatic;
    double sin_amplitude = 0.0;              // a in [0, 1)
    std::vector<double> sin_frequency{0.0};  // cycles per sample, per tap (broadcast if size 1)
    std::vector<double> sin_phase{0.0};      // radians, per tap (broadcast if size 1)
    double walk_step_std = 0.0;

    double snr_db = 30.0;
    bool noiseless = false;

    Nonlinearity nonlinearity = Nonlinearity::kNone;
    double saturation_scale = 1.0;

    std::uint64_t seed = 0;

    void validate() const;
};

/// Received-signal power through the base taps for unit-power BPSK input;
/// sigma^2 = P_sig * 10^(-snr_db/10).
double noise_variance_from_snr(const ChannelConfig& config);

/// Tap vector at sample t.  For random-walk variation the walk is replayed
/// from the seed, so the call is a pure function of (config, t).
std::vector<double> taps_at(const ChannelConfig& config, int t);

/// Pushes a BPSK block through the channel: convolution with the
/// time-varying taps, additive Gaussian noise, optional memoryless
/// saturation.  Symbols outside the block are zero.
std::vector<double> propagate(const ChannelConfig& config, const std::vector<int>& bits);

/// Seeded pseudo-random +/-1 training sequence.
std::vector<int> training_sequence(int length, std::uint64_t seed);

/// Reads a whitespace-separated +1/-1 sequence from a file.
std::vector<int> training_sequence_from_file(const std::string& path);

/// Repeats a base sequence until `length` symbols.
std::vector<int> repeat_sequence(const std::vector<int>& base, int length);

}  // namespace tbt
