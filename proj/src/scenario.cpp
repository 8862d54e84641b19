#include "chanalloc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace chanalloc {

using nlohmann::json;

std::vector<std::string> SimScenario::sensor_ids() const {
    std::vector<std::string> ids;
    for (const auto& s : rssi_sensors) ids.push_back(s.id);
    for (const auto& s : binary_sensors) ids.push_back(s.id);
    for (const auto& s : wifi_cards) ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

bool SimScenario::has_sensor(const std::string& id) const {
    const auto ids = sensor_ids();
    return std::binary_search(ids.begin(), ids.end(), id);
}

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
    fail(Errc::parse, "scenario field " + path + ": " + why);
}

const json& require(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        bad_field(path + "." + key, "missing");
    }
    return *it;
}

double num(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_number()) {
        bad_field(path + "." + key, "must be a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        bad_field(path + "." + key, "must be finite");
    }
    return d;
}

double num_or(const json& obj, const std::string& path, const char* key, double fallback) {
    return obj.contains(key) ? num(obj, path, key) : fallback;
}

int integer(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_number_integer()) {
        bad_field(path + "." + key, "must be an integer");
    }
    return v.get<int>();
}

int integer_or(const json& obj, const std::string& path, const char* key, int fallback) {
    return obj.contains(key) ? integer(obj, path, key) : fallback;
}

std::string str(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_string() || v.get<std::string>().empty()) {
        bad_field(path + "." + key, "must be a non-empty string");
    }
    return v.get<std::string>();
}

Position position(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        bad_field(path + "." + key, "must be [x, y]");
    }
    Position p{v[0].get<double>(), v[1].get<double>()};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        bad_field(path + "." + key, "must be finite");
    }
    return p;
}

void read_base(const json& obj, const std::string& path, SensorBase& base) {
    base.id = str(obj, path, "id");
    base.position = position(obj, path, "position");
    base.weight = num_or(obj, path, "weight", 1.0);
    if (base.weight < 0.0) {
        bad_field(path + ".weight", "must be >= 0");
    }
    if (obj.contains("waypoints")) {
        const json& w = obj["waypoints"];
        if (!w.is_array() || w.empty()) {
            bad_field(path + ".waypoints", "must be a non-empty array of [x, y]");
        }
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!w[i].is_array() || w[i].size() != 2) {
                bad_field(path + ".waypoints[" + std::to_string(i) + "]", "must be [x, y]");
            }
            base.waypoints.push_back({w[i][0].get<double>(), w[i][1].get<double>()});
        }
    }
}

Emitter read_emitter(const json& obj, const std::string& path) {
    Emitter emitter;
    emitter.id = str(obj, path, "id");
    const std::string kind = str(obj, path, "kind");
    if (kind == "wifi20") {
        const int ch = integer(obj, path, "channel");
        if (!ChannelId::valid(ch)) {
            bad_field(path + ".channel", "outside 1..13");
        }
        emitter.kind = Wifi20Spec{ChannelId{ch}};
    } else if (kind == "bluetooth_hopper") {
        emitter.kind = BluetoothHopperSpec{};
    } else if (kind == "wideband_noise") {
        const json& band = require(obj, path, "band_mhz");
        if (!band.is_array() || band.size() != 2 || !band[0].is_number() ||
            !band[1].is_number() || band[0].get<double>() >= band[1].get<double>()) {
            bad_field(path + ".band_mhz", "must be [low, high] with low < high");
        }
        emitter.kind = WidebandNoiseSpec{band[0].get<double>(), band[1].get<double>()};
    } else {
        bad_field(path + ".kind", "unknown emitter kind: " + kind);
    }
    emitter.position = position(obj, path, "position");
    emitter.tx_power_dbm = num(obj, path, "tx_power_dbm");
    if (emitter.tx_power_dbm < -30.0 || emitter.tx_power_dbm > 30.0) {
        bad_field(path + ".tx_power_dbm", "outside [-30, 30]");
    }
    if (obj.contains("active_from_slot")) {
        emitter.active_from_slot = require(obj, path, "active_from_slot").get<std::uint64_t>();
    }
    if (obj.contains("active_until_slot")) {
        emitter.active_until_slot = require(obj, path, "active_until_slot").get<std::uint64_t>();
    }
    return emitter;
}

}  // namespace

SimScenario parse_scenario(const std::string& text) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded() || !root.is_object()) {
        fail(Errc::parse, "scenario is not a JSON object");
    }
    const std::string top = "scenario";
    const int version = integer(root, top, "format_version");
    if (version != kScenarioFormatVersion) {
        bad_field("scenario.format_version",
                  "unsupported version " + std::to_string(version));
    }

    SimScenario scenario;
    if (root.contains("rng_seed")) {
        scenario.rf.rng_seed = require(root, top, "rng_seed").get<std::uint64_t>();
    }
    scenario.rf.noise_floor_dbm = num_or(root, top, "noise_floor_dbm", -100.0);

    if (root.contains("propagation")) {
        const json& prop = root["propagation"];
        const std::string path = "scenario.propagation";
        scenario.rf.propagation.pl0_db = num_or(prop, path, "pl0_db", 40.0);
        scenario.rf.propagation.exponent_n = num_or(prop, path, "exponent_n", 2.7);
        scenario.rf.propagation.shadowing_sigma_db =
            num_or(prop, path, "shadowing_sigma_db", 0.0);
        if (scenario.rf.propagation.pl0_db <= 0.0) {
            bad_field(path + ".pl0_db", "must be > 0");
        }
        if (scenario.rf.propagation.exponent_n < 1.6 ||
            scenario.rf.propagation.exponent_n > 6.0) {
            bad_field(path + ".exponent_n", "outside [1.6, 6]");
        }
        if (scenario.rf.propagation.shadowing_sigma_db < 0.0) {
            bad_field(path + ".shadowing_sigma_db", "must be >= 0");
        }
    }

    std::set<std::string> ids;
    const auto claim_id = [&ids](const std::string& id, const std::string& path) {
        if (!ids.insert(id).second) {
            bad_field(path + ".id", "duplicate id: " + id);
        }
    };

    if (root.contains("emitters")) {
        const json& emitters = root["emitters"];
        if (!emitters.is_array()) {
            bad_field("scenario.emitters", "must be an array");
        }
        for (std::size_t i = 0; i < emitters.size(); ++i) {
            const std::string path = "scenario.emitters[" + std::to_string(i) + "]";
            auto emitter = read_emitter(emitters[i], path);
            claim_id(emitter.id, path);
            scenario.rf.emitters.push_back(std::move(emitter));
        }
    }

    if (root.contains("access_points")) {
        const json& aps = root["access_points"];
        if (!aps.is_array()) {
            bad_field("scenario.access_points", "must be an array");
        }
        for (std::size_t i = 0; i < aps.size(); ++i) {
            const std::string path = "scenario.access_points[" + std::to_string(i) + "]";
            const json& obj = aps[i];
            ApConfig ap;
            ap.id = str(obj, path, "id");
            claim_id(ap.id, path);
            ap.position = position(obj, path, "position");
            ap.initial_channel = integer(obj, path, "initial_channel");
            if (!ChannelId::valid(ap.initial_channel)) {
                bad_field(path + ".initial_channel", "outside 1..13");
            }
            ap.tx_power_dbm = num_or(obj, path, "tx_power_dbm", 17.0);
            if (ap.tx_power_dbm < -30.0 || ap.tx_power_dbm > 30.0) {
                bad_field(path + ".tx_power_dbm", "outside [-30, 30]");
            }
            scenario.aps.push_back(std::move(ap));
        }
    }

    if (root.contains("sensors")) {
        const json& sensors = root["sensors"];
        if (!sensors.is_array()) {
            bad_field("scenario.sensors", "must be an array");
        }
        for (std::size_t i = 0; i < sensors.size(); ++i) {
            const std::string path = "scenario.sensors[" + std::to_string(i) + "]";
            const json& obj = sensors[i];
            const std::string kind = str(obj, path, "kind");
            if (kind == "rssi") {
                RssiSensor sensor;
                read_base(obj, path, sensor);
                if (obj.contains("chip_profile")) {
                    const json& chip = obj["chip_profile"];
                    const std::string cpath = path + ".chip_profile";
                    sensor.chip.min_dbm = num_or(chip, cpath, "min_dbm", -104.0);
                    sensor.chip.max_dbm = num_or(chip, cpath, "max_dbm", -13.0);
                    sensor.chip.resolution_khz = num_or(chip, cpath, "resolution_khz", 58.0);
                    if (sensor.chip.min_dbm >= sensor.chip.max_dbm) {
                        bad_field(cpath, "min_dbm must be below max_dbm");
                    }
                }
                sensor.samples_per_point = integer_or(obj, path, "samples_per_point", 100);
                if (sensor.samples_per_point < 1) {
                    bad_field(path + ".samples_per_point", "must be >= 1");
                }
                claim_id(sensor.id, path);
                scenario.rssi_sensors.push_back(std::move(sensor));
            } else if (kind == "binary") {
                BinarySensor sensor;
                read_base(obj, path, sensor);
                sensor.threshold_dbm = num_or(obj, path, "threshold_dbm", -64.0);
                sensor.l_min_dbm = num_or(obj, path, "l_min_dbm", -85.0);
                sensor.n_samples = integer_or(obj, path, "n_samples", 200);
                sensor.jitter_sigma_db = num_or(obj, path, "jitter_sigma_db", 2.0);
                if (sensor.l_min_dbm >= sensor.threshold_dbm) {
                    bad_field(path + ".l_min_dbm", "must be below threshold_dbm");
                }
                if (sensor.n_samples < 1) {
                    bad_field(path + ".n_samples", "must be >= 1");
                }
                if (sensor.jitter_sigma_db < 0.0) {
                    bad_field(path + ".jitter_sigma_db", "must be >= 0");
                }
                claim_id(sensor.id, path);
                scenario.binary_sensors.push_back(std::move(sensor));
            } else if (kind == "wifi_card") {
                WifiCardScanner sensor;
                read_base(obj, path, sensor);
                sensor.detection_floor_dbm = num_or(obj, path, "detection_floor_dbm", -90.0);
                claim_id(sensor.id, path);
                scenario.wifi_cards.push_back(std::move(sensor));
            } else {
                bad_field(path + ".kind", "unknown sensor kind: " + kind);
            }
        }
    }

    if (root.contains("allocator")) {
        const json& alloc = root["allocator"];
        const std::string path = "scenario.allocator";
        auto& cfg = scenario.allocator;
        cfg.hysteresis_db = num_or(alloc, path, "hysteresis_db", 3.0);
        if (cfg.hysteresis_db < 0.0) {
            bad_field(path + ".hysteresis_db", "must be >= 0");
        }
        cfg.collection_window_slots = integer_or(alloc, path, "collection_window_slots", 10);
        if (cfg.collection_window_slots < 1) {
            bad_field(path + ".collection_window_slots", "must be >= 1");
        }
        if (alloc.contains("allowed_channels")) {
            const json& channels = alloc["allowed_channels"];
            if (!channels.is_array() || channels.empty()) {
                bad_field(path + ".allowed_channels", "must be a non-empty array");
            }
            for (const auto& ch : channels) {
                if (!ch.is_number_integer() || !ChannelId::valid(ch.get<int>())) {
                    bad_field(path + ".allowed_channels", "entries must be channels 1..13");
                }
                cfg.allowed_channels.push_back(ch.get<int>());
            }
        }
        if (alloc.contains("combine_weights")) {
            const json& weights = alloc["combine_weights"];
            const std::string wpath = path + ".combine_weights";
            cfg.w_ext = num(weights, wpath, "w_ext");
            cfg.w_int = num(weights, wpath, "w_int");
            if (cfg.w_ext < 0.0 || cfg.w_int < 0.0 ||
                std::abs(cfg.w_ext + cfg.w_int - 1.0) > 1e-9) {
                bad_field(wpath, "w_ext and w_int must be >= 0 and sum to 1");
            }
        }
        cfg.virtual_ap_level_dbm = num_or(alloc, path, "virtual_ap_level_dbm", -50.0);
        cfg.report_ttl_windows = integer_or(alloc, path, "report_ttl_windows", 3);
        if (cfg.report_ttl_windows < 1) {
            bad_field(path + ".report_ttl_windows", "must be >= 1");
        }
        if (alloc.contains("card_mode")) {
            const std::string mode = str(alloc, path, "card_mode");
            if (mode == "linear_power") {
                cfg.card_mode = CardMode::LinearPower;
            } else if (mode == "paper_literal") {
                cfg.card_mode = CardMode::PaperLiteral;
            } else {
                bad_field(path + ".card_mode", "must be linear_power or paper_literal");
            }
        }
        if (alloc.contains("sensor_binding")) {
            const json& binding = alloc["sensor_binding"];
            if (!binding.is_object()) {
                bad_field(path + ".sensor_binding", "must be an object of ap -> [device ids]");
            }
            for (const auto& [ap_id, devices] : binding.items()) {
                if (!devices.is_array()) {
                    bad_field(path + ".sensor_binding." + ap_id, "must be an array");
                }
                auto& bound = cfg.sensor_binding[ap_id];
                for (const auto& device : devices) {
                    if (!device.is_string()) {
                        bad_field(path + ".sensor_binding." + ap_id,
                                  "entries must be device ids");
                    }
                    bound.insert(device.get<std::string>());
                }
            }
        }
    }
    scenario.allocator.noise_floor_dbm = scenario.rf.noise_floor_dbm;

    // Cross checks: bindings must reference declared ids.
    for (const auto& [ap_id, bound] : scenario.allocator.sensor_binding) {
        const bool ap_known = std::any_of(scenario.aps.begin(), scenario.aps.end(),
                                          [&](const ApConfig& ap) { return ap.id == ap_id; });
        if (!ap_known) {
            bad_field("scenario.allocator.sensor_binding." + ap_id, "unknown AP id");
        }
        for (const auto& device : bound) {
            if (!scenario.has_sensor(device)) {
                bad_field("scenario.allocator.sensor_binding." + ap_id,
                          "unknown device id: " + device);
            }
        }
    }
    return scenario;
}

SimScenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(Errc::io, "cannot open scenario file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

namespace {

json position_json(Position p) { return json::array({p.x, p.y}); }

void write_base(json& obj, const SensorBase& base) {
    obj["id"] = base.id;
    obj["position"] = position_json(base.position);
    obj["weight"] = base.weight;
    if (!base.waypoints.empty()) {
        json waypoints = json::array();
        for (const auto& w : base.waypoints) {
            waypoints.push_back(position_json(w));
        }
        obj["waypoints"] = waypoints;
    }
}

}  // namespace

std::string scenario_to_json(const SimScenario& scenario) {
    json root;
    root["format_version"] = kScenarioFormatVersion;
    root["rng_seed"] = scenario.rf.rng_seed;
    root["noise_floor_dbm"] = scenario.rf.noise_floor_dbm;
    root["propagation"] = {
        {"pl0_db", scenario.rf.propagation.pl0_db},
        {"exponent_n", scenario.rf.propagation.exponent_n},
        {"shadowing_sigma_db", scenario.rf.propagation.shadowing_sigma_db},
    };
    json emitters = json::array();
    for (const auto& emitter : scenario.rf.emitters) {
        json obj;
        obj["id"] = emitter.id;
        if (const auto* wifi = std::get_if<Wifi20Spec>(&emitter.kind)) {
            obj["kind"] = "wifi20";
            obj["channel"] = wifi->channel.index;
        } else if (std::holds_alternative<BluetoothHopperSpec>(emitter.kind)) {
            obj["kind"] = "bluetooth_hopper";
        } else {
            const auto& noise = std::get<WidebandNoiseSpec>(emitter.kind);
            obj["kind"] = "wideband_noise";
            obj["band_mhz"] = json::array({noise.low_mhz, noise.high_mhz});
        }
        obj["position"] = position_json(emitter.position);
        obj["tx_power_dbm"] = emitter.tx_power_dbm;
        if (emitter.active_from_slot != 0) {
            obj["active_from_slot"] = emitter.active_from_slot;
        }
        if (emitter.active_until_slot != kAlwaysActive) {
            obj["active_until_slot"] = emitter.active_until_slot;
        }
        emitters.push_back(obj);
    }
    root["emitters"] = emitters;

    json aps = json::array();
    for (const auto& ap : scenario.aps) {
        aps.push_back({
            {"id", ap.id},
            {"position", position_json(ap.position)},
            {"initial_channel", ap.initial_channel},
            {"tx_power_dbm", ap.tx_power_dbm},
        });
    }
    root["access_points"] = aps;

    json sensors = json::array();
    for (const auto& sensor : scenario.rssi_sensors) {
        json obj;
        obj["kind"] = "rssi";
        write_base(obj, sensor);
        obj["chip_profile"] = {
            {"min_dbm", sensor.chip.min_dbm},
            {"max_dbm", sensor.chip.max_dbm},
            {"resolution_khz", sensor.chip.resolution_khz},
        };
        obj["samples_per_point"] = sensor.samples_per_point;
        sensors.push_back(obj);
    }
    for (const auto& sensor : scenario.binary_sensors) {
        json obj;
        obj["kind"] = "binary";
        write_base(obj, sensor);
        obj["threshold_dbm"] = sensor.threshold_dbm;
        obj["l_min_dbm"] = sensor.l_min_dbm;
        obj["n_samples"] = sensor.n_samples;
        obj["jitter_sigma_db"] = sensor.jitter_sigma_db;
        sensors.push_back(obj);
    }
    for (const auto& sensor : scenario.wifi_cards) {
        json obj;
        obj["kind"] = "wifi_card";
        write_base(obj, sensor);
        obj["detection_floor_dbm"] = sensor.detection_floor_dbm;
        sensors.push_back(obj);
    }
    root["sensors"] = sensors;

    const auto& cfg = scenario.allocator;
    json alloc;
    alloc["hysteresis_db"] = cfg.hysteresis_db;
    alloc["collection_window_slots"] = cfg.collection_window_slots;
    if (!cfg.allowed_channels.empty()) {
        alloc["allowed_channels"] = cfg.allowed_channels;
    }
    alloc["combine_weights"] = {{"w_ext", cfg.w_ext}, {"w_int", cfg.w_int}};
    alloc["virtual_ap_level_dbm"] = cfg.virtual_ap_level_dbm;
    alloc["report_ttl_windows"] = cfg.report_ttl_windows;
    alloc["card_mode"] =
        cfg.card_mode == CardMode::LinearPower ? "linear_power" : "paper_literal";
    if (!cfg.sensor_binding.empty()) {
        json binding = json::object();
        for (const auto& [ap_id, devices] : cfg.sensor_binding) {
            binding[ap_id] = std::vector<std::string>(devices.begin(), devices.end());
        }
        alloc["sensor_binding"] = binding;
    }
    root["allocator"] = alloc;
    return root.dump(2) + "\n";
}

void save_scenario(const SimScenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        fail(Errc::io, "cannot write scenario file: " + path);
    }
    out << scenario_to_json(scenario);
}

}  // namespace chanalloc
