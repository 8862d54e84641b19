#include "chanalloc/sensors.hpp"

#include <algorithm>
#include <cmath>

#include "chanalloc/rng.hpp"

namespace chanalloc {

double quantize_half_down(double value, double step) {
    return step * std::ceil(value / step - 0.5);
}

namespace {

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730950488);
}

}  // namespace

PointMeasurementSet rssi_scan(const RssiSensor& sensor, const RfScenario& scenario,
                              std::span<const FrequencyBin> grid, std::uint64_t slot) {
    PointMeasurementSet out;
    out.samples_per_point = sensor.samples_per_point;
    const Position where = sensor.position_at(slot);
    const int polls = std::max(1, sensor.samples_per_point);
    // With zero shadowing every sub-slot snapshot is identical; take one.
    const int distinct = scenario.propagation.shadowing_sigma_db > 0.0 ? polls : 1;
    std::vector<std::vector<double>> sweeps;
    sweeps.reserve(distinct);
    for (int sub = 0; sub < distinct; ++sub) {
        sweeps.push_back(snapshot_sub(scenario, where, grid, slot, static_cast<std::uint32_t>(sub)));
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> samples;
        samples.reserve(polls);
        for (int poll = 0; poll < polls; ++poll) {
            const double truth = sweeps[poll % distinct][i];
            const double clipped = std::clamp(truth, sensor.chip.min_dbm, sensor.chip.max_dbm);
            samples.push_back(quantize_half_down(clipped, 0.5));
        }
        out.samples.emplace(grid[i].index, std::move(samples));
    }
    return out;
}

std::vector<int> binary_scan(const BinarySensor& sensor, const RfScenario& scenario,
                             std::span<const FrequencyBin> grid, std::uint64_t slot) {
    const Position where = sensor.position_at(slot);
    const std::uint64_t stream = mix(mix(scenario.rng_seed, hash_str(sensor.id)), slot);
    const int n = std::max(1, sensor.n_samples);
    const int distinct = scenario.propagation.shadowing_sigma_db > 0.0 ? n : 1;
    std::vector<std::vector<double>> sweeps;
    sweeps.reserve(distinct);
    for (int sub = 0; sub < distinct; ++sub) {
        sweeps.push_back(snapshot_sub(scenario, where, grid, slot, static_cast<std::uint32_t>(sub)));
    }
    std::vector<int> hits(grid.size(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::uint64_t bin_key = mix(stream, static_cast<std::uint64_t>(grid[i].index));
        for (int sample = 0; sample < n; ++sample) {
            const double truth = sweeps[sample % distinct][i];
            bool hit;
            if (sensor.jitter_sigma_db > 0.0) {
                const double p =
                    std_normal_cdf((truth - sensor.threshold_dbm) / sensor.jitter_sigma_db);
                hit = uniform01(mix(bin_key, static_cast<std::uint64_t>(sample))) < p;
            } else {
                hit = truth >= sensor.threshold_dbm;
            }
            hits[i] += hit ? 1 : 0;
        }
    }
    return hits;
}

std::vector<WifiScanEntry> wifi_scan(const WifiCardScanner& sensor, const RfScenario& scenario,
                                     std::uint64_t slot) {
    const Position where = sensor.position_at(slot);
    std::vector<std::pair<WifiScanEntry, std::string>> seen;
    for (const auto& emitter : scenario.emitters) {
        const auto* wifi = std::get_if<Wifi20Spec>(&emitter.kind);
        if (wifi == nullptr || !emitter.active_at(slot)) {
            continue;
        }
        const double loss =
            path_loss_db(scenario.propagation, distance_m(emitter.position, where));
        const double level = emitter.tx_power_dbm - loss;
        if (level >= sensor.detection_floor_dbm) {
            seen.push_back({{wifi->channel, level}, emitter.id});
        }
    }
    std::sort(seen.begin(), seen.end(), [](const auto& a, const auto& b) {
        if (a.first.network_channel != b.first.network_channel) {
            return a.first.network_channel < b.first.network_channel;
        }
        if (a.first.level_dbm != b.first.level_dbm) {
            return a.first.level_dbm < b.first.level_dbm;
        }
        return a.second < b.second;
    });
    std::vector<WifiScanEntry> out;
    out.reserve(seen.size());
    for (auto& [entry, id] : seen) {
        out.push_back(entry);
    }
    return out;
}

namespace {

std::vector<proto::ChannelEntry> channels_from_points(const PointMeasurementSet& points,
                                                      std::span<const FrequencyBin> grid) {
    std::vector<proto::ChannelEntry> out;
    for (int ch = ChannelId::kMin; ch <= ChannelId::kMax; ++ch) {
        out.push_back({ch, channel_average(points, ChannelId{ch}, grid)});
    }
    return out;
}

}  // namespace

proto::ChannelReport report_from_rssi(const RssiSensor& sensor, const PointMeasurementSet& points,
                                      std::span<const FrequencyBin> grid, std::uint64_t seq,
                                      std::uint64_t slot) {
    proto::ChannelReport report;
    report.device_id = sensor.id;
    report.seq = seq;
    report.slot = slot;
    report.channels = channels_from_points(points, grid);
    return report;
}

proto::ChannelReport report_from_binary(const BinarySensor& sensor, std::span<const int> hits,
                                        std::span<const FrequencyBin> grid, std::uint64_t seq,
                                        std::uint64_t slot) {
    if (hits.size() != grid.size()) {
        fail(Errc::invalid_argument, "hit vector does not match grid size");
    }
    const auto levels = binary_estimate(hits, sensor.estimator());
    PointMeasurementSet points;
    points.samples_per_point = 1;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        points.samples.emplace(grid[i].index, std::vector<double>{levels[i]});
    }
    proto::ChannelReport report;
    report.device_id = sensor.id;
    report.seq = seq;
    report.slot = slot;
    report.channels = channels_from_points(points, grid);
    return report;
}

proto::WifiCardReport report_from_wifi(const WifiCardScanner& sensor,
                                       std::span<const WifiScanEntry> entries, std::uint64_t seq,
                                       std::uint64_t slot) {
    proto::WifiCardReport report;
    report.device_id = sensor.id;
    report.seq = seq;
    report.slot = slot;
    report.entries.reserve(entries.size());
    for (const auto& entry : entries) {
        report.entries.push_back({entry.network_channel.index, entry.level_dbm});
    }
    return report;
}

}  // namespace chanalloc
