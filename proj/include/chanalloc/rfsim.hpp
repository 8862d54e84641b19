#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chanalloc/channels.hpp"

namespace chanalloc {

struct Position {
    double x = 0.0;
    double y = 0.0;

    auto operator<=>(const Position&) const = default;
};

double distance_m(Position a, Position b);

/// 20 MHz Wi-Fi transmission, flat over +/-10 MHz of the channel center.
struct Wifi20Spec {
    ChannelId channel;

    auto operator<=>(const Wifi20Spec&) const = default;
};

/// Frequency hopper over the 79 1-MHz channels 2402..2480 MHz; occupies one
/// seeded-pseudorandom hop per time slot.
struct BluetoothHopperSpec {
    auto operator<=>(const BluetoothHopperSpec&) const = default;
};

/// Flat wideband interferer over [low_mhz, high_mhz].
struct WidebandNoiseSpec {
    double low_mhz = 2400.0;
    double high_mhz = 2500.0;

    auto operator<=>(const WidebandNoiseSpec&) const = default;
};

inline constexpr int kBluetoothHopCount = 79;
inline constexpr double kBluetoothBaseMhz = 2402.0;
inline constexpr std::uint64_t kAlwaysActive = std::numeric_limits<std::uint64_t>::max();

struct Emitter {
    std::string id;
    std::variant<Wifi20Spec, BluetoothHopperSpec, WidebandNoiseSpec> kind;
    Position position;
    double tx_power_dbm = 0.0;  // [-30, +30]
    // Slot window during which the emitter radiates: [from, until).
    std::uint64_t active_from_slot = 0;
    std::uint64_t active_until_slot = kAlwaysActive;

    bool active_at(std::uint64_t slot) const {
        return slot >= active_from_slot && slot < active_until_slot;
    }

    bool operator==(const Emitter&) const = default;
};

/// Log-distance path loss: pl0 at 1 m plus 10*n*log10(d), optional log-normal
/// shadowing on top.
struct Propagation {
    double pl0_db = 40.0;
    double exponent_n = 2.7;
    double shadowing_sigma_db = 0.0;

    bool operator==(const Propagation&) const = default;
};

struct RfScenario {
    std::vector<Emitter> emitters;
    Propagation propagation;
    double noise_floor_dbm = -100.0;
    std::uint64_t rng_seed = 0;

    bool operator==(const RfScenario&) const = default;
};

/// Distances below 0.1 m clamp to 0.1 m.
double path_loss_db(const Propagation& prop, double dist_m);

/// Hop channel index (0..78) of a Bluetooth emitter at a slot. Pure function
/// of (scenario seed, emitter id, slot).
int bluetooth_hop(const RfScenario& scenario, const Emitter& emitter, std::uint64_t slot);

/// Received level at a point for one grid bin: per-emitter contributions
/// (tx - path loss - shadowing), gated by spectral occupancy at the slot,
/// summed in milliwatts on top of the noise floor. `sub` indexes the polling
/// sub-slot inside the slot; it only affects the shadowing draw.
double received_power_sub(const RfScenario& scenario, Position point, const FrequencyBin& bin,
                          std::uint64_t slot, std::uint32_t sub);

double received_power(const RfScenario& scenario, Position point, const FrequencyBin& bin,
                      std::uint64_t slot);

/// Vectorized received_power over a grid. Deterministic given (seed, slot).
std::vector<double> snapshot_sub(const RfScenario& scenario, Position point,
                                 std::span<const FrequencyBin> grid, std::uint64_t slot,
                                 std::uint32_t sub);

std::vector<double> snapshot(const RfScenario& scenario, Position point,
                             std::span<const FrequencyBin> grid, std::uint64_t slot);

}  // namespace chanalloc
