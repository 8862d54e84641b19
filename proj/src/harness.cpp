#include "chanalloc/harness.hpp"

#include <algorithm>

#include "chanalloc/sensors.hpp"

namespace chanalloc {

RfScenario sensor_environment(const SimScenario& scenario,
                              const std::map<std::string, int>& ap_channels,
                              const std::string& device_id) {
    RfScenario env = scenario.rf;
    for (const auto& ap : scenario.aps) {
        if (scenario.allocator.is_bound(ap.id, device_id)) {
            continue;  // silent mode towards its own sensors
        }
        auto it = ap_channels.find(ap.id);
        const int channel = it != ap_channels.end() ? it->second : ap.initial_channel;
        Emitter emitter;
        emitter.id = ap.id;
        emitter.kind = Wifi20Spec{ChannelId{channel}};
        emitter.position = ap.position;
        emitter.tx_power_dbm = ap.tx_power_dbm;
        env.emitters.push_back(std::move(emitter));
    }
    return env;
}

proto::Message make_sensor_report(const SimScenario& scenario, const std::string& device_id,
                                  const std::map<std::string, int>& ap_channels,
                                  std::uint64_t seq, std::uint64_t slot) {
    const RfScenario env = sensor_environment(scenario, ap_channels, device_id);
    const auto grid = default_grid();
    for (const auto& sensor : scenario.rssi_sensors) {
        if (sensor.id == device_id) {
            const auto points = rssi_scan(sensor, env, grid, slot);
            return report_from_rssi(sensor, points, grid, seq, slot);
        }
    }
    for (const auto& sensor : scenario.binary_sensors) {
        if (sensor.id == device_id) {
            const auto hits = binary_scan(sensor, env, grid, slot);
            return report_from_binary(sensor, hits, grid, seq, slot);
        }
    }
    for (const auto& sensor : scenario.wifi_cards) {
        if (sensor.id == device_id) {
            const auto entries = wifi_scan(sensor, env, slot);
            return report_from_wifi(sensor, entries, seq, slot);
        }
    }
    fail(Errc::invalid_argument, "unknown sensor device: " + device_id);
}

namespace {

double sensor_weight(const SimScenario& scenario, const std::string& device_id) {
    for (const auto& s : scenario.rssi_sensors) {
        if (s.id == device_id) return s.weight;
    }
    for (const auto& s : scenario.binary_sensors) {
        if (s.id == device_id) return s.weight;
    }
    for (const auto& s : scenario.wifi_cards) {
        if (s.id == device_id) return s.weight;
    }
    fail(Errc::invalid_argument, "unknown sensor device: " + device_id);
}

proto::DeviceKind sensor_kind(const SimScenario& scenario, const std::string& device_id) {
    for (const auto& s : scenario.rssi_sensors) {
        if (s.id == device_id) return proto::DeviceKind::RssiSensor;
    }
    for (const auto& s : scenario.binary_sensors) {
        if (s.id == device_id) return proto::DeviceKind::BinarySensor;
    }
    return proto::DeviceKind::WifiCard;
}

SimScenario with_seed(SimScenario scenario, std::optional<std::uint64_t> seed_override) {
    if (seed_override) {
        scenario.rf.rng_seed = *seed_override;
    }
    return scenario;
}

}  // namespace

SimHarness::SimHarness(SimScenario scenario, std::optional<std::uint64_t> seed_override)
    : scenario_(with_seed(std::move(scenario), seed_override)),
      controller_(scenario_.allocator, scenario_.aps) {
    for (const auto& device_id : scenario_.sensor_ids()) {
        proto::Hello hello;
        hello.device_id = device_id;
        hello.device_kind = sensor_kind(scenario_, device_id);
        hello.weight = sensor_weight(scenario_, device_id);
        controller_.ingest(proto::decode(proto::encode(hello)));
    }
    report_.seed = scenario_.rf.rng_seed;
}

void SimHarness::accumulate(RunReport& report, const Controller::RoundResult& result,
                            const std::map<std::string, int>& ap_channels) {
    for (const auto& assign : result.assignments) {
        report.assignments.push_back(assign);
    }
    for (const auto& [ap_id, row] : result.occupancy) {
        report.occupancy.push_back({result.round, ap_id, row});
    }
    bool any = false;
    double sum = 0.0;
    for (const auto& [ap_id, row] : result.occupancy) {
        const auto it = row.find(ap_channels.at(ap_id));
        if (it != row.end()) {
            sum += it->second;
            any = true;
        }
    }
    if (any) {
        report.interference_sum_dbm.emplace_back(result.round, sum);
    }
    for (const auto& [ap_id, channel] : ap_channels) {
        report.final_channels[ap_id] = channel;
    }
    report.rounds = static_cast<int>(result.round) + 1;
}

SimHarness::RoundTrace SimHarness::step() {
    RoundTrace trace;
    const std::uint64_t slot = controller_.window_end_slot();
    ++seq_;
    for (const auto& device_id : scenario_.sensor_ids()) {
        const auto report = make_sensor_report(scenario_, device_id, controller_.ap_channels(),
                                               seq_, slot);
        // Through the codec: the controller must see wire-identical values.
        const auto decoded = proto::decode(proto::encode(report));
        trace.reports.push_back(decoded);
        controller_.ingest(decoded);
    }
    trace.result = controller_.allocate_round();
    accumulate(report_, trace.result, controller_.ap_channels());
    return trace;
}

RunReport SimHarness::run(int rounds) {
    if (rounds < 0) {
        fail(Errc::invalid_argument, "rounds must be >= 0");
    }
    for (int i = 0; i < rounds; ++i) {
        step();
    }
    for (const auto& [ap_id, channel] : controller_.ap_channels()) {
        report_.final_channels[ap_id] = channel;
    }
    return report_;
}

}  // namespace chanalloc
