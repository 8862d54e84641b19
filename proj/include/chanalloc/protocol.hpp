#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chanalloc/errors.hpp"

namespace chanalloc::proto {

inline constexpr int kFormatVersion = 1;

// Error{code} values used on the wire.
inline constexpr const char* kErrParse = "parse";
inline constexpr const char* kErrStale = "stale";
inline constexpr const char* kErrUnregistered = "unregistered";

enum class DeviceKind { RssiSensor, BinarySensor, WifiCard, AccessPoint };

const char* device_kind_name(DeviceKind kind);
std::optional<DeviceKind> device_kind_from(std::string_view name);

/// Device introduction; first message on a connection.
struct Hello {
    std::string device_id;
    DeviceKind device_kind = DeviceKind::RssiSensor;
    double weight = 1.0;
    int format_version = kFormatVersion;

    bool operator==(const Hello&) const = default;
};

struct ChannelEntry {
    int channel = 1;  // 1..13
    double level_dbm = 0.0;

    auto operator<=>(const ChannelEntry&) const = default;
};

/// Unified per-channel levels from a spectrum analyzer. `channels` is sorted
/// strictly ascending (one entry per channel).
struct ChannelReport {
    std::string device_id;
    std::uint64_t seq = 0;
    std::uint64_t slot = 0;
    std::vector<ChannelEntry> channels;

    bool operator==(const ChannelReport&) const = default;
};

/// Raw scan list from a built-in Wi-Fi card: one entry per seen network,
/// sorted ascending by channel; equal channels are allowed (several networks
/// can share one channel) and sort by level.
struct WifiCardReport {
    std::string device_id;
    std::uint64_t seq = 0;
    std::uint64_t slot = 0;
    std::vector<ChannelEntry> entries;

    bool operator==(const WifiCardReport&) const = default;
};

/// Controller command: move an AP to a channel.
struct AssignChannel {
    std::string ap_id;
    int channel = 1;
    std::uint64_t round = 0;

    bool operator==(const AssignChannel&) const = default;
};

struct Ack {
    std::uint64_t ref_seq = 0;

    bool operator==(const Ack&) const = default;
};

struct ErrorMsg {
    std::string code;
    std::string detail;

    bool operator==(const ErrorMsg&) const = default;
};

using Message = std::variant<Hello, ChannelReport, WifiCardReport, AssignChannel, Ack, ErrorMsg>;

/// Serialize one message as a single JSON object line terminated by a
/// linefeed. Field names and order are fixed (see docs/protocol.md); numbers
/// carry at most six fractional digits. Throws on invariant-violating input.
std::string encode(const Message& msg);

/// Parse one line (with or without the trailing linefeed). Unknown fields are
/// ignored; missing or invalid required fields throw Error(Errc::parse).
Message decode(std::string_view line);

/// Wire representation of a level value: fixed-point, at most six fractional
/// digits, trailing zeros trimmed.
std::string format_number(double value);

}  // namespace chanalloc::proto
