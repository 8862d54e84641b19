#include "chanalloc/protocol.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "chanalloc/channels.hpp"

namespace chanalloc::proto {

using nlohmann::json;

const char* device_kind_name(DeviceKind kind) {
    switch (kind) {
        case DeviceKind::RssiSensor: return "rssi_sensor";
        case DeviceKind::BinarySensor: return "binary_sensor";
        case DeviceKind::WifiCard: return "wifi_card";
        case DeviceKind::AccessPoint: return "access_point";
    }
    return "?";
}

std::optional<DeviceKind> device_kind_from(std::string_view name) {
    if (name == "rssi_sensor") return DeviceKind::RssiSensor;
    if (name == "binary_sensor") return DeviceKind::BinarySensor;
    if (name == "wifi_card") return DeviceKind::WifiCard;
    if (name == "access_point") return DeviceKind::AccessPoint;
    return std::nullopt;
}

std::string format_number(double value) {
    if (!std::isfinite(value)) {
        fail(Errc::invalid_argument, "non-finite number on the wire");
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    std::string s(buf);
    const auto dot = s.find('.');
    auto end = s.find_last_not_of('0');
    if (end == dot) {
        --end;
    }
    s.erase(end + 1);
    if (s == "-0") {
        s = "0";
    }
    return s;
}

namespace {

[[noreturn]] void parse_fail(const std::string& detail) {
    fail(Errc::parse, detail);
}

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

void validate_entries(const std::vector<ChannelEntry>& entries, bool strict_ascending,
                      const char* what) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!ChannelId::valid(entries[i].channel)) {
            fail(Errc::parse, std::string(what) + ": channel outside 1..13");
        }
        if (!std::isfinite(entries[i].level_dbm)) {
            fail(Errc::parse, std::string(what) + ": level_dbm not finite");
        }
        if (i > 0) {
            if (strict_ascending && entries[i].channel <= entries[i - 1].channel) {
                fail(Errc::parse, std::string(what) + ": channels not strictly ascending");
            }
            if (!strict_ascending && entries[i].channel < entries[i - 1].channel) {
                fail(Errc::parse, std::string(what) + ": entries not sorted by channel");
            }
        }
    }
}

void append_entries(std::string& out, const char* key, const std::vector<ChannelEntry>& entries) {
    out += '"';
    out += key;
    out += "\":[";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += "{\"channel\":" + std::to_string(entries[i].channel) +
               ",\"level_dbm\":" + format_number(entries[i].level_dbm) + "}";
    }
    out += ']';
}

// --- decode helpers -------------------------------------------------------

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        parse_fail(std::string("missing field: ") + key);
    }
    return *it;
}

std::string get_string(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_string()) {
        parse_fail(std::string(key) + " must be a string");
    }
    return v.get<std::string>();
}

std::uint64_t get_u64(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_number_integer()) {
        parse_fail(std::string(key) + " must be a non-negative integer");
    }
    if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
        parse_fail(std::string(key) + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

int get_int(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_number_integer()) {
        parse_fail(std::string(key) + " must be an integer");
    }
    return v.get<int>();
}

double get_double(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_number()) {
        parse_fail(std::string(key) + " must be a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        parse_fail(std::string(key) + " must be finite");
    }
    return d;
}

std::vector<ChannelEntry> get_entries(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_array()) {
        parse_fail(std::string(key) + " must be an array");
    }
    std::vector<ChannelEntry> out;
    out.reserve(v.size());
    for (const auto& item : v) {
        if (!item.is_object()) {
            parse_fail(std::string(key) + " entries must be objects");
        }
        out.push_back({get_int(item, "channel"), get_double(item, "level_dbm")});
    }
    return out;
}

}  // namespace

std::string encode(const Message& msg) {
    std::string out;
    if (const auto* hello = std::get_if<Hello>(&msg)) {
        if (hello->device_id.empty()) {
            fail(Errc::invalid_argument, "hello: empty device_id");
        }
        if (!std::isfinite(hello->weight) || hello->weight < 0.0) {
            fail(Errc::invalid_argument, "hello: weight must be finite and >= 0");
        }
        out = "{\"type\":\"hello\",\"device_id\":\"" + escape(hello->device_id) +
              "\",\"device_kind\":\"" + device_kind_name(hello->device_kind) +
              "\",\"weight\":" + format_number(hello->weight) +
              ",\"format_version\":" + std::to_string(hello->format_version) + "}";
    } else if (const auto* report = std::get_if<ChannelReport>(&msg)) {
        validate_entries(report->channels, true, "channel_report");
        out = "{\"type\":\"channel_report\",\"device_id\":\"" + escape(report->device_id) +
              "\",\"seq\":" + std::to_string(report->seq) +
              ",\"slot\":" + std::to_string(report->slot) + ",";
        append_entries(out, "channels", report->channels);
        out += '}';
    } else if (const auto* card = std::get_if<WifiCardReport>(&msg)) {
        validate_entries(card->entries, false, "wifi_card_report");
        out = "{\"type\":\"wifi_card_report\",\"device_id\":\"" + escape(card->device_id) +
              "\",\"seq\":" + std::to_string(card->seq) +
              ",\"slot\":" + std::to_string(card->slot) + ",";
        append_entries(out, "entries", card->entries);
        out += '}';
    } else if (const auto* assign = std::get_if<AssignChannel>(&msg)) {
        if (!ChannelId::valid(assign->channel)) {
            fail(Errc::invalid_argument, "assign_channel: channel outside 1..13");
        }
        out = "{\"type\":\"assign_channel\",\"ap_id\":\"" + escape(assign->ap_id) +
              "\",\"channel\":" + std::to_string(assign->channel) +
              ",\"round\":" + std::to_string(assign->round) + "}";
    } else if (const auto* ack = std::get_if<Ack>(&msg)) {
        out = "{\"type\":\"ack\",\"ref_seq\":" + std::to_string(ack->ref_seq) + "}";
    } else if (const auto* err = std::get_if<ErrorMsg>(&msg)) {
        out = "{\"type\":\"error\",\"code\":\"" + escape(err->code) + "\",\"detail\":\"" +
              escape(err->detail) + "\"}";
    } else {
        fail(Errc::internal, "unhandled message alternative");
    }
    out += '\n';
    return out;
}

Message decode(std::string_view line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) {
        line.remove_suffix(1);
    }
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        parse_fail("line is not a JSON object");
    }
    const std::string type = get_string(obj, "type");
    if (type == "hello") {
        Hello hello;
        hello.device_id = get_string(obj, "device_id");
        if (hello.device_id.empty()) {
            parse_fail("hello: empty device_id");
        }
        const std::string kind = get_string(obj, "device_kind");
        const auto parsed = device_kind_from(kind);
        if (!parsed) {
            parse_fail("hello: unknown device_kind: " + kind);
        }
        hello.device_kind = *parsed;
        hello.weight = get_double(obj, "weight");
        if (hello.weight < 0.0) {
            parse_fail("hello: weight must be >= 0");
        }
        hello.format_version = get_int(obj, "format_version");
        return hello;
    }
    if (type == "channel_report") {
        ChannelReport report;
        report.device_id = get_string(obj, "device_id");
        report.seq = get_u64(obj, "seq");
        report.slot = get_u64(obj, "slot");
        report.channels = get_entries(obj, "channels");
        validate_entries(report.channels, true, "channel_report");
        return report;
    }
    if (type == "wifi_card_report") {
        WifiCardReport card;
        card.device_id = get_string(obj, "device_id");
        card.seq = get_u64(obj, "seq");
        card.slot = get_u64(obj, "slot");
        card.entries = get_entries(obj, "entries");
        validate_entries(card.entries, false, "wifi_card_report");
        return card;
    }
    if (type == "assign_channel") {
        AssignChannel assign;
        assign.ap_id = get_string(obj, "ap_id");
        assign.channel = get_int(obj, "channel");
        if (!ChannelId::valid(assign.channel)) {
            parse_fail("assign_channel: channel outside 1..13");
        }
        assign.round = get_u64(obj, "round");
        return assign;
    }
    if (type == "ack") {
        return Ack{get_u64(obj, "ref_seq")};
    }
    if (type == "error") {
        return ErrorMsg{get_string(obj, "code"), get_string(obj, "detail")};
    }
    parse_fail("unknown message type: " + type);
}

}  // namespace chanalloc::proto
