#include "chanalloc/estimation.hpp"

#include <cmath>
#include <numeric>

namespace chanalloc {

double channel_average(const PointMeasurementSet& points, ChannelId ch,
                       std::span<const FrequencyBin> grid) {
    const auto bins = bins_for_channel(ch, grid);
    double sum = 0.0;
    int used = 0;
    for (const auto& bin : bins) {
        auto it = points.samples.find(bin.index);
        if (it == points.samples.end() || it->second.empty()) {
            continue;
        }
        const auto& samples = it->second;
        const double point_mean =
            std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
        sum += point_mean;
        ++used;
    }
    if (used == 0) {
        fail(Errc::insufficient_data,
             "no sampled bins for channel " + std::to_string(ch.index));
    }
    return sum / used;
}

std::vector<double> normalize_weights(std::span<const double> raw) {
    std::vector<double> out(raw.begin(), raw.end());
    if (out.empty()) {
        return out;
    }
    for (double w : out) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            fail(Errc::invalid_argument, "sensor weights must be finite and >= 0");
        }
    }
    const double sum = std::accumulate(out.begin(), out.end(), 0.0);
    if (sum <= 0.0) {
        std::fill(out.begin(), out.end(), 1.0);
        return out;
    }
    const double scale = static_cast<double>(out.size()) / sum;
    for (double& w : out) {
        w *= scale;
    }
    return out;
}

double fuse_external(std::span<const ExternalReport> reports, ChannelId ch) {
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& report : reports) {
        auto it = report.levels.find(ch.index);
        if (it == report.levels.end()) {
            continue;
        }
        sum += report.mu * it->second;
        ++used;
    }
    if (used == 0) {
        fail(Errc::insufficient_data,
             "no external report carries channel " + std::to_string(ch.index));
    }
    return sum / static_cast<double>(used);
}

double card_channel_estimate(std::span<const CardReport> cards, ChannelId ch,
                             const CardEstimateConfig& cfg) {
    if (cards.empty()) {
        fail(Errc::insufficient_data, "no wifi card reports");
    }
    double acc = 0.0;
    if (cfg.mode == CardMode::PaperLiteral) {
        for (const auto& card : cards) {
            double inner = 0.0;
            for (const auto& entry : card.entries) {
                inner += crossing_coefficient(entry.network_channel, ch) * entry.level_dbm;
            }
            acc += card.mu * inner;
        }
        return acc / static_cast<double>(cards.size());
    }
    const double floor_mw = dbm_to_mw(cfg.noise_floor_dbm);
    for (const auto& card : cards) {
        double power_mw = 0.0;
        for (const auto& entry : card.entries) {
            power_mw += crossing_coefficient(entry.network_channel, ch) *
                        dbm_to_mw(entry.level_dbm);
        }
        acc += card.mu * mw_to_dbm(std::max(power_mw, floor_mw));
    }
    return acc / static_cast<double>(cards.size());
}

void BinaryEstimatorConfig::validate() const {
    if (!(l_min_dbm < l_av_dbm)) {
        fail(Errc::invalid_argument, "binary estimator requires l_min < l_av");
    }
    if (n_samples < 1) {
        fail(Errc::invalid_argument, "binary estimator requires n_samples >= 1");
    }
}

double binary_estimate_point(int hits, const BinaryEstimatorConfig& cfg) {
    cfg.validate();
    if (hits < 0 || hits > cfg.n_samples) {
        fail(Errc::invalid_argument,
             "hit count " + std::to_string(hits) + " outside [0, " +
                 std::to_string(cfg.n_samples) + "]");
    }
    // Multiply before dividing so the printed special cases come out exact.
    return cfg.l_min_dbm + 2.0 * (cfg.l_av_dbm - cfg.l_min_dbm) * hits / cfg.n_samples;
}

std::vector<double> binary_estimate(std::span<const int> hits, const BinaryEstimatorConfig& cfg) {
    std::vector<double> out;
    out.reserve(hits.size());
    for (int h : hits) {
        out.push_back(binary_estimate_point(h, cfg));
    }
    return out;
}

}  // namespace chanalloc
