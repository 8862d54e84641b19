#pragma once

#include <cmath>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "chanalloc/channels.hpp"

namespace chanalloc {

/// Raw per-bin samples collected by a continuous-RSSI analyzer. Keys are grid
/// bin indices; each listed bin carries at least one sample in dBm.
struct PointMeasurementSet {
    std::map<int, std::vector<double>> samples;
    int samples_per_point = 100;
};

/// Per-channel signal levels attributed to one device, dBm.
using ChannelLevels = std::map<int, double>;

/// A weighted per-channel report from one external analyzer.
struct ExternalReport {
    double mu = 1.0;
    ChannelLevels levels;
};

/// One network seen by a built-in Wi-Fi card scan.
struct WifiScanEntry {
    ChannelId network_channel;
    double level_dbm = 0.0;

    auto operator<=>(const WifiScanEntry&) const = default;
};

/// A weighted scan list from one built-in card.
struct CardReport {
    double mu = 1.0;
    std::vector<WifiScanEntry> entries;
};

/// Mean level of a channel: each bin is first reduced to the mean of its
/// per-point samples, then the channel value is the arithmetic mean (in dBm)
/// over the channel's bins. Throws insufficient_data when the channel has no
/// sampled bins on the grid.
double channel_average(const PointMeasurementSet& points, ChannelId ch,
                       std::span<const FrequencyBin> grid);

/// Rescale raw weights so their mean is exactly 1. An all-zero set falls back
/// to equal weights.
std::vector<double> normalize_weights(std::span<const double> raw);

/// Importance-weighted average over M external analyzers:
/// (1/M) * sum(mu_j * L_j). With weights normalized to mean 1 this is a
/// weighted mean. Reports that do not carry the channel are skipped; throws
/// insufficient_data when none carries it.
double fuse_external(std::span<const ExternalReport> reports, ChannelId ch);

enum class CardMode {
    /// Crossing coefficients applied to linear power: per card,
    /// P = sum_k v(ch,k) * 10^(L_k/10) mW, floored at the configured noise
    /// floor before conversion back to dBm, then importance-averaged.
    LinearPower,
    /// The printed form taken literally: (1/H) * sum_j mu_j * sum_k v_k * L_k
    /// with L_k in dBm. Fractional coefficients on negative dBm raise the
    /// apparent level of adjacent channels, so this mode is kept for audit
    /// only; LinearPower is the default.
    PaperLiteral,
};

struct CardEstimateConfig {
    CardMode mode = CardMode::LinearPower;
    double noise_floor_dbm = -100.0;
};

/// Channel level inferred from built-in Wi-Fi card scans, spreading each seen
/// network across neighbouring channels by the crossing coefficient.
double card_channel_estimate(std::span<const CardReport> cards, ChannelId ch,
                             const CardEstimateConfig& cfg = {});

/// Parameters of the binary-flag level estimator. l_av_dbm is the flag trigger
/// threshold; l_min_dbm the receiver sensitivity.
struct BinaryEstimatorConfig {
    double l_min_dbm = -85.0;
    double l_av_dbm = -64.0;
    int n_samples = 200;

    /// dB gained per flag hit: 2 * (l_av - l_min) / n. Equals 0.21 for the
    /// default -85/-64/200 configuration.
    double slope() const { return 2.0 * (l_av_dbm - l_min_dbm) / n_samples; }

    void validate() const;
};

/// Level reconstructed from hit counts of a one-bit power detector, per bin:
/// P_i = l_min + (2 * (l_av - l_min) / N) * hits_i. Affine and monotone in the
/// hit count with range [l_min, 2*l_av - l_min].
std::vector<double> binary_estimate(std::span<const int> hits, const BinaryEstimatorConfig& cfg);

/// Single-bin form of binary_estimate.
double binary_estimate_point(int hits, const BinaryEstimatorConfig& cfg);

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

}  // namespace chanalloc
