#pragma once

#include <string>
#include <vector>

#include "chanalloc/allocator.hpp"
#include "chanalloc/rfsim.hpp"
#include "chanalloc/sensors.hpp"

namespace chanalloc {

/// Everything a run needs: the RF ground truth plus AP/sensor placements and
/// the allocator configuration. Round-trips losslessly through the JSON
/// scenario format (format_version 1, see docs/scenario.md).
struct SimScenario {
    RfScenario rf;
    std::vector<ApConfig> aps;
    std::vector<RssiSensor> rssi_sensors;
    std::vector<BinarySensor> binary_sensors;
    std::vector<WifiCardScanner> wifi_cards;
    AllocatorConfig allocator;

    /// Ids of all declared sensor devices, sorted.
    std::vector<std::string> sensor_ids() const;
    bool has_sensor(const std::string& id) const;

    bool operator==(const SimScenario&) const = default;
};

inline constexpr int kScenarioFormatVersion = 1;

/// Parse and validate a scenario. Errors name the offending field.
SimScenario load_scenario(const std::string& path);
SimScenario parse_scenario(const std::string& text);

std::string scenario_to_json(const SimScenario& scenario);
void save_scenario(const SimScenario& scenario, const std::string& path);

}  // namespace chanalloc
