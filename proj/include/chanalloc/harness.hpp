#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chanalloc/allocator.hpp"
#include "chanalloc/report.hpp"
#include "chanalloc/scenario.hpp"

namespace chanalloc {

/// Ground truth as one sensor sees it: scenario emitters plus every AP
/// radiating on its current channel, with the APs bound to this sensor
/// silenced (they pause their own transmission while their sensors sample).
RfScenario sensor_environment(const SimScenario& scenario,
                              const std::map<std::string, int>& ap_channels,
                              const std::string& device_id);

/// Produce the wire report one sensor would send for the given slot.
proto::Message make_sensor_report(const SimScenario& scenario, const std::string& device_id,
                                  const std::map<std::string, int>& ap_channels,
                                  std::uint64_t seq, std::uint64_t slot);

/// In-process wiring of simulator, sensors and controller: one collection
/// window per round, every sensor reporting at the window-end slot. Reports
/// pass through the wire codec so in-process and networked runs see identical
/// values.
class SimHarness {
  public:
    SimHarness(SimScenario scenario, std::optional<std::uint64_t> seed_override = {});

    struct RoundTrace {
        Controller::RoundResult result;
        std::vector<proto::Message> reports;
    };

    RoundTrace step();
    RunReport run(int rounds);

    const Controller& controller() const { return controller_; }
    const SimScenario& scenario() const { return scenario_; }

    /// Fold one closed round into a report (shared with the served path).
    static void accumulate(RunReport& report, const Controller::RoundResult& result,
                           const std::map<std::string, int>& ap_channels);

  private:
    SimScenario scenario_;
    Controller controller_;
    std::uint64_t seq_ = 0;
    RunReport report_;
};

}  // namespace chanalloc
