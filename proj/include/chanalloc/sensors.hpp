#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chanalloc/estimation.hpp"
#include "chanalloc/protocol.hpp"
#include "chanalloc/rfsim.hpp"

namespace chanalloc {

/// Receiver chip characteristics. Defaults are the CC2500 row of the common
/// 2.4 GHz monitoring chips: range -104..-13 dBm, ~58 kHz resolution.
struct ChipProfile {
    double min_dbm = -104.0;
    double max_dbm = -13.0;
    double resolution_khz = 58.0;

    bool operator==(const ChipProfile&) const = default;
};

/// Shared placement fields. A non-empty waypoint list moves the sensor to
/// waypoints[slot % size] instead of the fixed position.
struct SensorBase {
    std::string id;
    Position position;
    double weight = 1.0;
    std::vector<Position> waypoints;

    Position position_at(std::uint64_t slot) const {
        return waypoints.empty() ? position : waypoints[slot % waypoints.size()];
    }

    bool operator==(const SensorBase&) const = default;
};

/// Continuous-RSSI analyzer; readings clip to the chip range and quantize to
/// 0.5 dB steps (round half down).
struct RssiSensor : SensorBase {
    ChipProfile chip;
    int samples_per_point = 100;

    bool operator==(const RssiSensor&) const = default;
};

/// One-bit power detector: per sample, flag raised when instantaneous power
/// crosses threshold_dbm. jitter_sigma_db widens the comparator into a
/// Gaussian sigmoid; zero recovers a hard step.
struct BinarySensor : SensorBase {
    double threshold_dbm = -64.0;
    double l_min_dbm = -85.0;
    int n_samples = 200;
    double jitter_sigma_db = 2.0;

    BinaryEstimatorConfig estimator() const {
        return BinaryEstimatorConfig{l_min_dbm, threshold_dbm, n_samples};
    }

    bool operator==(const BinarySensor&) const = default;
};

/// Built-in Wi-Fi card: sees only Wi-Fi networks (one scan entry per emitter
/// above the detection floor), never Bluetooth or wideband noise.
struct WifiCardScanner : SensorBase {
    double detection_floor_dbm = -90.0;

    bool operator==(const WifiCardScanner&) const = default;
};

/// Poll every grid bin samples_per_point times at consecutive sub-slots of
/// `slot`, then clip and quantize per the chip profile.
PointMeasurementSet rssi_scan(const RssiSensor& sensor, const RfScenario& scenario,
                              std::span<const FrequencyBin> grid, std::uint64_t slot);

/// Per-bin hit counts out of n_samples polls at consecutive sub-slots. The
/// Bernoulli draws come from the sensor's own stream, seeded from
/// (scenario seed, sensor id, slot).
std::vector<int> binary_scan(const BinarySensor& sensor, const RfScenario& scenario,
                             std::span<const FrequencyBin> grid, std::uint64_t slot);

/// One entry per active Wi-Fi emitter whose received level at the sensor is
/// at or above the detection floor. Entries sorted by (channel, level, id).
std::vector<WifiScanEntry> wifi_scan(const WifiCardScanner& sensor, const RfScenario& scenario,
                                     std::uint64_t slot);

/// Reduce raw sensor output to the unified per-channel report the controller
/// ingests: per-channel averaging for the RSSI path, binary level estimation
/// followed by the same averaging for the flag path.
proto::ChannelReport report_from_rssi(const RssiSensor& sensor, const PointMeasurementSet& points,
                                      std::span<const FrequencyBin> grid, std::uint64_t seq,
                                      std::uint64_t slot);

proto::ChannelReport report_from_binary(const BinarySensor& sensor, std::span<const int> hits,
                                        std::span<const FrequencyBin> grid, std::uint64_t seq,
                                        std::uint64_t slot);

/// Wi-Fi card entries are forwarded raw; crossing-coefficient fusion happens
/// at the controller.
proto::WifiCardReport report_from_wifi(const WifiCardScanner& sensor,
                                       std::span<const WifiScanEntry> entries, std::uint64_t seq,
                                       std::uint64_t slot);

/// Quantize to `step`-sized levels, rounding exact midpoints down.
double quantize_half_down(double value, double step);

}  // namespace chanalloc
