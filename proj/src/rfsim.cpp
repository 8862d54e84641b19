#include "chanalloc/rfsim.hpp"

#include <bit>
#include <cmath>

#include "chanalloc/estimation.hpp"
#include "chanalloc/rng.hpp"

namespace chanalloc {

double distance_m(Position a, Position b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double path_loss_db(const Propagation& prop, double dist_m) {
    const double d = std::max(dist_m, 0.1);
    return prop.pl0_db + 10.0 * prop.exponent_n * std::log10(d);
}

namespace {

std::uint64_t position_bits(Position p) {
    return mix(std::bit_cast<std::uint64_t>(p.x), std::bit_cast<std::uint64_t>(p.y));
}

double shadowing_db(const RfScenario& scenario, const Emitter& emitter, Position point,
                    std::uint64_t slot, std::uint32_t sub) {
    const double sigma = scenario.propagation.shadowing_sigma_db;
    if (sigma <= 0.0) {
        return 0.0;
    }
    std::uint64_t key = mix(scenario.rng_seed, hash_str(emitter.id));
    key = mix(key, position_bits(point));
    key = mix(key, slot);
    key = mix(key, 0x5bd1e995u ^ sub);
    return sigma * normal01(key);
}

/// Does the emitter's spectral occupancy cover the bin center at this slot?
bool covers_bin(const RfScenario& scenario, const Emitter& emitter, double bin_mhz,
                std::uint64_t slot) {
    if (const auto* wifi = std::get_if<Wifi20Spec>(&emitter.kind)) {
        return std::abs(bin_mhz - wifi->channel.center_mhz()) <= ChannelId::kWidthMhz / 2.0;
    }
    if (std::holds_alternative<BluetoothHopperSpec>(emitter.kind)) {
        const double hop_mhz = kBluetoothBaseMhz + bluetooth_hop(scenario, emitter, slot);
        return std::abs(bin_mhz - hop_mhz) <= 0.5;
    }
    const auto& noise = std::get<WidebandNoiseSpec>(emitter.kind);
    return bin_mhz >= noise.low_mhz && bin_mhz <= noise.high_mhz;
}

double contribution_dbm(const RfScenario& scenario, const Emitter& emitter, Position point,
                        std::uint64_t slot, std::uint32_t sub) {
    const double loss = path_loss_db(scenario.propagation, distance_m(emitter.position, point));
    return emitter.tx_power_dbm - loss - shadowing_db(scenario, emitter, point, slot, sub);
}

}  // namespace

int bluetooth_hop(const RfScenario& scenario, const Emitter& emitter, std::uint64_t slot) {
    const std::uint64_t key = mix(mix(scenario.rng_seed, hash_str(emitter.id)), slot);
    return static_cast<int>(uniform_below(key, kBluetoothHopCount));
}

double received_power_sub(const RfScenario& scenario, Position point, const FrequencyBin& bin,
                          std::uint64_t slot, std::uint32_t sub) {
    double sum_mw = 0.0;
    bool any = false;
    for (const auto& emitter : scenario.emitters) {
        if (!emitter.active_at(slot) || !covers_bin(scenario, emitter, bin.center_mhz, slot)) {
            continue;
        }
        sum_mw += dbm_to_mw(contribution_dbm(scenario, emitter, point, slot, sub));
        any = true;
    }
    if (!any) {
        return scenario.noise_floor_dbm;
    }
    return mw_to_dbm(sum_mw + dbm_to_mw(scenario.noise_floor_dbm));
}

double received_power(const RfScenario& scenario, Position point, const FrequencyBin& bin,
                      std::uint64_t slot) {
    return received_power_sub(scenario, point, bin, slot, 0);
}

std::vector<double> snapshot_sub(const RfScenario& scenario, Position point,
                                 std::span<const FrequencyBin> grid, std::uint64_t slot,
                                 std::uint32_t sub) {
    // One contribution evaluation per emitter, spread over its covered bins.
    const double floor_mw = dbm_to_mw(scenario.noise_floor_dbm);
    std::vector<double> sum_mw(grid.size(), 0.0);
    std::vector<bool> any(grid.size(), false);
    for (const auto& emitter : scenario.emitters) {
        if (!emitter.active_at(slot)) {
            continue;
        }
        const double level_mw = dbm_to_mw(contribution_dbm(scenario, emitter, point, slot, sub));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (covers_bin(scenario, emitter, grid[i].center_mhz, slot)) {
                sum_mw[i] += level_mw;
                any[i] = true;
            }
        }
    }
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = any[i] ? mw_to_dbm(sum_mw[i] + floor_mw) : scenario.noise_floor_dbm;
    }
    return out;
}

std::vector<double> snapshot(const RfScenario& scenario, Position point,
                             std::span<const FrequencyBin> grid, std::uint64_t slot) {
    return snapshot_sub(scenario, point, grid, slot, 0);
}

}  // namespace chanalloc
