#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chanalloc/estimation.hpp"
#include "chanalloc/protocol.hpp"
#include "chanalloc/rfsim.hpp"

namespace chanalloc {

struct ApConfig {
    std::string id;
    Position position;
    int initial_channel = 1;
    double tx_power_dbm = 17.0;

    bool operator==(const ApConfig&) const = default;
};

struct AllocatorConfig {
    double hysteresis_db = 3.0;
    int collection_window_slots = 10;
    std::vector<int> allowed_channels;  // empty -> 1..13
    // AP id -> device ids feeding it. Empty map binds every sensor to every AP.
    std::map<std::string, std::set<std::string>> sensor_binding;
    double w_ext = 0.5;
    double w_int = 0.5;
    double virtual_ap_level_dbm = -50.0;
    int report_ttl_windows = 3;
    double noise_floor_dbm = -100.0;
    CardMode card_mode = CardMode::LinearPower;

    std::vector<int> effective_allowed() const;
    bool is_bound(const std::string& ap_id, const std::string& device_id) const;

    bool operator==(const AllocatorConfig&) const = default;
};

/// The controller's allocation state machine: device registry, freshest
/// report per device, per-AP channels and the round counter. Single-writer;
/// feed messages through ingest() and close each collection window with
/// allocate_round().
class Controller {
  public:
    Controller(AllocatorConfig config, std::vector<ApConfig> aps);

    struct DeviceInfo {
        proto::DeviceKind kind = proto::DeviceKind::RssiSensor;
        double raw_weight = 1.0;
        double effective_weight = 1.0;
        std::uint64_t last_seq = 0;
        bool has_report = false;
    };

    /// Register or ingest one device message; returns the reply to send back
    /// (Ack on success, Error{stale} on sequence regression, nothing for
    /// inbound acks/errors).
    std::optional<proto::Message> ingest(const proto::Message& msg);

    struct RoundResult {
        std::uint64_t round = 0;
        std::vector<proto::AssignChannel> assignments;
        // Unpenalized occupancy per AP over the allowed channels (only APs
        // with fresh data appear).
        std::map<std::string, std::map<int, double>> occupancy;
        std::vector<std::string> skipped_aps;
    };

    /// Close the current collection window: fuse fresh reports into per-AP
    /// occupancy, pick the emptiest allowed channel per AP (hysteresis-gated,
    /// greedy over APs with virtual-emitter coupling) and advance the round.
    RoundResult allocate_round();

    /// Fused level the AP would see on a channel, from its bound fresh
    /// reports. Throws insufficient_data when nothing fresh is bound.
    double occupancy(const std::string& ap_id, ChannelId ch) const;

    const std::map<std::string, int>& ap_channels() const { return ap_channels_; }
    std::uint64_t round() const { return round_; }
    const std::map<std::string, DeviceInfo>& devices() const { return devices_; }
    const AllocatorConfig& config() const { return config_; }
    const std::vector<ApConfig>& aps() const { return aps_; }

    /// End slot of the collection window the next allocate_round() closes.
    std::uint64_t window_end_slot() const;

    /// Snapshot of round, channels and the last occupancy matrix as a JSON
    /// object (the read-only status surface).
    std::string status_json() const;

  private:
    struct StoredReport {
        proto::Message msg;  // ChannelReport or WifiCardReport
        std::uint64_t slot = 0;
    };

    bool fresh(const StoredReport& report) const;
    std::optional<double> try_occupancy(const std::string& ap_id, int channel,
                                        std::uint64_t min_slot) const;
    std::vector<std::string> ap_order() const;
    void renormalize_weights();

    AllocatorConfig config_;
    std::vector<ApConfig> aps_;
    std::map<std::string, DeviceInfo> devices_;
    std::map<std::string, StoredReport> reports_;
    std::map<std::string, int> ap_channels_;
    std::uint64_t round_ = 0;
    RoundResult last_result_;
};

}  // namespace chanalloc
