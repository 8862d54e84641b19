#include "chanalloc/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "chanalloc/log.hpp"

namespace chanalloc {

std::vector<int> AllocatorConfig::effective_allowed() const {
    std::vector<int> out = allowed_channels;
    if (out.empty()) {
        for (int ch = ChannelId::kMin; ch <= ChannelId::kMax; ++ch) {
            out.push_back(ch);
        }
        return out;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (int ch : out) {
        if (!ChannelId::valid(ch)) {
            fail(Errc::invalid_argument, "allowed channel outside 1..13");
        }
    }
    return out;
}

bool AllocatorConfig::is_bound(const std::string& ap_id, const std::string& device_id) const {
    if (sensor_binding.empty()) {
        return true;
    }
    auto it = sensor_binding.find(ap_id);
    return it != sensor_binding.end() && it->second.count(device_id) > 0;
}

Controller::Controller(AllocatorConfig config, std::vector<ApConfig> aps)
    : config_(std::move(config)), aps_(std::move(aps)) {
    if (config_.collection_window_slots < 1) {
        fail(Errc::invalid_argument, "collection_window_slots must be >= 1");
    }
    if (config_.hysteresis_db < 0.0) {
        fail(Errc::invalid_argument, "hysteresis_db must be >= 0");
    }
    if (std::abs(config_.w_ext + config_.w_int - 1.0) > 1e-9) {
        fail(Errc::invalid_argument, "combine weights must sum to 1");
    }
    (void)config_.effective_allowed();  // validates the channel set
    for (const auto& ap : aps_) {
        if (!ChannelId::valid(ap.initial_channel)) {
            fail(Errc::invalid_argument, "AP " + ap.id + ": initial channel outside 1..13");
        }
        if (!ap_channels_.emplace(ap.id, ap.initial_channel).second) {
            fail(Errc::invalid_argument, "duplicate AP id: " + ap.id);
        }
    }
}

std::uint64_t Controller::window_end_slot() const {
    const auto window = static_cast<std::uint64_t>(config_.collection_window_slots);
    return (round_ + 1) * window - 1;
}

void Controller::renormalize_weights() {
    const auto apply = [this](bool external) {
        std::vector<std::string> ids;
        std::vector<double> raw;
        for (const auto& [id, info] : devices_) {
            const bool is_ext = info.kind == proto::DeviceKind::RssiSensor ||
                                info.kind == proto::DeviceKind::BinarySensor;
            const bool is_card = info.kind == proto::DeviceKind::WifiCard;
            if ((external && is_ext) || (!external && is_card)) {
                ids.push_back(id);
                raw.push_back(info.raw_weight);
            }
        }
        const auto normalized = normalize_weights(raw);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            devices_[ids[i]].effective_weight = normalized[i];
        }
    };
    apply(true);
    apply(false);
}

std::optional<proto::Message> Controller::ingest(const proto::Message& msg) {
    if (const auto* hello = std::get_if<proto::Hello>(&msg)) {
        auto& info = devices_[hello->device_id];
        info.kind = hello->device_kind;
        info.raw_weight = hello->weight;
        renormalize_weights();
        log::info("registered device " + hello->device_id + " (" +
                  proto::device_kind_name(hello->device_kind) + ")");
        return proto::Ack{0};
    }
    if (const auto* report = std::get_if<proto::ChannelReport>(&msg)) {
        auto it = devices_.find(report->device_id);
        if (it == devices_.end()) {
            return proto::ErrorMsg{proto::kErrUnregistered,
                                   "unknown device: " + report->device_id};
        }
        if (it->second.kind != proto::DeviceKind::RssiSensor &&
            it->second.kind != proto::DeviceKind::BinarySensor) {
            return proto::ErrorMsg{"unexpected",
                                   "channel_report from non-analyzer device " + report->device_id};
        }
        if (it->second.has_report && report->seq <= it->second.last_seq) {
            return proto::ErrorMsg{proto::kErrStale,
                                   "seq " + std::to_string(report->seq) + " not above " +
                                       std::to_string(it->second.last_seq)};
        }
        it->second.last_seq = report->seq;
        it->second.has_report = true;
        reports_[report->device_id] = StoredReport{msg, report->slot};
        return proto::Ack{report->seq};
    }
    if (const auto* card = std::get_if<proto::WifiCardReport>(&msg)) {
        auto it = devices_.find(card->device_id);
        if (it == devices_.end()) {
            return proto::ErrorMsg{proto::kErrUnregistered, "unknown device: " + card->device_id};
        }
        if (it->second.kind != proto::DeviceKind::WifiCard) {
            return proto::ErrorMsg{"unexpected",
                                   "wifi_card_report from non-card device " + card->device_id};
        }
        if (it->second.has_report && card->seq <= it->second.last_seq) {
            return proto::ErrorMsg{proto::kErrStale,
                                   "seq " + std::to_string(card->seq) + " not above " +
                                       std::to_string(it->second.last_seq)};
        }
        it->second.last_seq = card->seq;
        it->second.has_report = true;
        reports_[card->device_id] = StoredReport{msg, card->slot};
        return proto::Ack{card->seq};
    }
    if (std::holds_alternative<proto::AssignChannel>(msg)) {
        return proto::ErrorMsg{"unexpected", "assign_channel is controller-originated"};
    }
    if (const auto* err = std::get_if<proto::ErrorMsg>(&msg)) {
        log::warn("peer error: " + err->code + ": " + err->detail);
    }
    return std::nullopt;
}

bool Controller::fresh(const StoredReport& report) const {
    const auto window = static_cast<std::uint64_t>(config_.collection_window_slots);
    const auto ttl = static_cast<std::uint64_t>(config_.report_ttl_windows) * window;
    return report.slot + ttl >= window_end_slot();
}

std::optional<double> Controller::try_occupancy(const std::string& ap_id, int channel,
                                                std::uint64_t min_slot) const {
    std::vector<ExternalReport> external;
    std::vector<CardReport> cards;
    for (const auto& [device_id, stored] : reports_) {
        if (stored.slot < min_slot || !config_.is_bound(ap_id, device_id)) {
            continue;
        }
        const auto& info = devices_.at(device_id);
        if (const auto* report = std::get_if<proto::ChannelReport>(&stored.msg)) {
            ChannelLevels levels;
            for (const auto& entry : report->channels) {
                levels[entry.channel] = entry.level_dbm;
            }
            external.push_back({info.effective_weight, std::move(levels)});
        } else if (const auto* card = std::get_if<proto::WifiCardReport>(&stored.msg)) {
            std::vector<WifiScanEntry> entries;
            entries.reserve(card->entries.size());
            for (const auto& entry : card->entries) {
                entries.push_back({ChannelId{entry.channel}, entry.level_dbm});
            }
            cards.push_back({info.effective_weight, std::move(entries)});
        }
    }
    std::optional<double> ext;
    if (!external.empty()) {
        const ChannelId ch{channel};
        bool carried = false;
        for (const auto& report : external) {
            if (report.levels.count(channel) > 0) {
                carried = true;
                break;
            }
        }
        if (carried) {
            ext = fuse_external(external, ch);
        }
    }
    std::optional<double> internal;
    if (!cards.empty()) {
        internal = card_channel_estimate(
            cards, ChannelId{channel},
            CardEstimateConfig{config_.card_mode, config_.noise_floor_dbm});
    }
    if (ext && internal) {
        return config_.w_ext * *ext + config_.w_int * *internal;
    }
    if (ext) {
        return ext;
    }
    return internal;
}

double Controller::occupancy(const std::string& ap_id, ChannelId ch) const {
    if (ap_channels_.count(ap_id) == 0) {
        fail(Errc::invalid_argument, "unknown AP: " + ap_id);
    }
    const auto window = static_cast<std::uint64_t>(config_.collection_window_slots);
    const auto ttl = static_cast<std::uint64_t>(config_.report_ttl_windows) * window;
    const std::uint64_t end = window_end_slot();
    const std::uint64_t min_slot = ttl >= end ? 0 : end - ttl;
    const auto value = try_occupancy(ap_id, ch.index, min_slot);
    if (!value) {
        fail(Errc::insufficient_data, "no fresh reports bound to AP " + ap_id);
    }
    return *value;
}

std::vector<std::string> Controller::ap_order() const {
    std::vector<std::pair<int, std::string>> keyed;
    keyed.reserve(aps_.size());
    for (const auto& ap : aps_) {
        int bound = 0;
        for (const auto& [device_id, info] : devices_) {
            if (info.kind != proto::DeviceKind::AccessPoint &&
                config_.is_bound(ap.id, device_id)) {
                ++bound;
            }
        }
        keyed.emplace_back(bound, ap.id);
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) {
            return a.first > b.first;  // descending bound-sensor count
        }
        return a.second < b.second;  // ascending AP id
    });
    std::vector<std::string> out;
    out.reserve(keyed.size());
    for (auto& [count, id] : keyed) {
        out.push_back(std::move(id));
    }
    return out;
}

Controller::RoundResult Controller::allocate_round() {
    const auto window = static_cast<std::uint64_t>(config_.collection_window_slots);
    const auto ttl = static_cast<std::uint64_t>(config_.report_ttl_windows) * window;
    const std::uint64_t end = window_end_slot();
    const std::uint64_t min_slot = ttl >= end ? 0 : end - ttl;
    const auto allowed = config_.effective_allowed();
    const double virtual_mw = dbm_to_mw(config_.virtual_ap_level_dbm);

    RoundResult result;
    result.round = round_;

    // APs decided earlier in this round (assigned or confirmed) show up as
    // virtual emitters for the ones that follow; their new channel is not in
    // any sensor data yet.
    std::vector<std::pair<std::string, int>> committed;

    for (const auto& ap_id : ap_order()) {
        std::map<int, double> row;
        for (int ch : allowed) {
            if (auto value = try_occupancy(ap_id, ch, min_slot)) {
                row[ch] = *value;
            }
        }
        if (row.empty()) {
            result.skipped_aps.push_back(ap_id);
            log::info("round " + std::to_string(round_) + ": AP " + ap_id +
                      " has no fresh data, keeping channel " +
                      std::to_string(ap_channels_.at(ap_id)));
            continue;
        }
        result.occupancy[ap_id] = row;

        const auto penalized = [&](int ch) {
            double mw = dbm_to_mw(row.at(ch));
            for (const auto& [other_id, other_ch] : committed) {
                mw += crossing_coefficient_for_distance(ch - other_ch) * virtual_mw;
            }
            return mw_to_dbm(mw);
        };

        int best = 0;
        double best_score = std::numeric_limits<double>::infinity();
        for (const auto& [ch, level] : row) {  // ascending channel: ties keep the lowest
            const double score = penalized(ch);
            if (score < best_score) {
                best_score = score;
                best = ch;
            }
        }

        const int current = ap_channels_.at(ap_id);
        const double current_score = row.count(current) > 0
                                         ? penalized(current)
                                         : std::numeric_limits<double>::infinity();
        if (best != current && current_score - best_score > config_.hysteresis_db) {
            result.assignments.push_back({ap_id, best, round_});
            ap_channels_[ap_id] = best;
            committed.emplace_back(ap_id, best);
        } else {
            committed.emplace_back(ap_id, current);
        }
    }

    ++round_;
    last_result_ = result;
    return result;
}

std::string Controller::status_json() const {
    nlohmann::json status;
    status["round"] = round_;
    status["window_end_slot"] = window_end_slot();
    status["ap_channels"] = nlohmann::json::object();
    for (const auto& [ap_id, channel] : ap_channels_) {
        status["ap_channels"][ap_id] = channel;
    }
    status["devices"] = nlohmann::json::object();
    for (const auto& [device_id, info] : devices_) {
        status["devices"][device_id] = {
            {"kind", proto::device_kind_name(info.kind)},
            {"weight", info.effective_weight},
            {"last_seq", info.last_seq},
            {"has_report", info.has_report},
        };
    }
    status["reports_stored"] = reports_.size();
    nlohmann::json last;
    last["round"] = last_result_.round;
    last["assignments"] = nlohmann::json::array();
    for (const auto& assign : last_result_.assignments) {
        last["assignments"].push_back(
            {{"ap_id", assign.ap_id}, {"channel", assign.channel}, {"round", assign.round}});
    }
    last["occupancy"] = nlohmann::json::object();
    for (const auto& [ap_id, row] : last_result_.occupancy) {
        nlohmann::json levels = nlohmann::json::object();
        for (const auto& [ch, level] : row) {
            levels[std::to_string(ch)] = level;
        }
        last["occupancy"][ap_id] = levels;
    }
    last["skipped_aps"] = last_result_.skipped_aps;
    status["last_round"] = last;
    return status.dump();
}

}  // namespace chanalloc
