#include "chanalloc/report.hpp"

#include <cinttypes>
#include <cstdio>

#include <json.hpp>

#include "chanalloc/channels.hpp"

namespace chanalloc {

using nlohmann::json;

namespace {

/// Full-precision decimal form that parses back to the identical double.
std::string full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string two_digits(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string RunReport::to_json() const {
    // Hand-assembled so the byte layout is deterministic and numbers keep
    // full precision.
    std::string out = "{\n";
    out += "  \"format_version\": " + std::to_string(format_version) + ",\n";
    out += "  \"seed\": " + std::to_string(seed) + ",\n";
    out += "  \"rounds\": " + std::to_string(rounds) + ",\n";
    out += "  \"assignments\": [";
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        out += i == 0 ? "\n" : ",\n";
        out += "    {\"round\": " + std::to_string(assignments[i].round) + ", \"ap_id\": \"" +
               assignments[i].ap_id + "\", \"channel\": " + std::to_string(assignments[i].channel) +
               "}";
    }
    out += assignments.empty() ? "],\n" : "\n  ],\n";
    out += "  \"final_channels\": {";
    bool first = true;
    for (const auto& [ap_id, channel] : final_channels) {
        out += first ? "\n" : ",\n";
        out += "    \"" + ap_id + "\": " + std::to_string(channel);
        first = false;
    }
    out += final_channels.empty() ? "},\n" : "\n  },\n";
    out += "  \"occupancy\": [";
    for (std::size_t i = 0; i < occupancy.size(); ++i) {
        out += i == 0 ? "\n" : ",\n";
        out += "    {\"round\": " + std::to_string(occupancy[i].round) + ", \"ap_id\": \"" +
               occupancy[i].ap_id + "\", \"levels_dbm\": {";
        bool inner_first = true;
        for (const auto& [ch, level] : occupancy[i].levels_dbm) {
            if (!inner_first) {
                out += ", ";
            }
            out += "\"" + std::to_string(ch) + "\": " + full(level);
            inner_first = false;
        }
        out += "}}";
    }
    out += occupancy.empty() ? "],\n" : "\n  ],\n";
    out += "  \"interference_sum_dbm\": [";
    for (std::size_t i = 0; i < interference_sum_dbm.size(); ++i) {
        out += i == 0 ? "\n" : ",\n";
        out += "    {\"round\": " + std::to_string(interference_sum_dbm[i].first) +
               ", \"sum_dbm\": " + full(interference_sum_dbm[i].second) + "}";
    }
    out += interference_sum_dbm.empty() ? "]\n" : "\n  ]\n";
    out += "}\n";
    return out;
}

std::string RunReport::to_csv() const {
    std::string out = "record,round,ap_id,channel,value\n";
    out += "format_version,,,," + std::to_string(format_version) + "\n";
    out += "seed,,,," + std::to_string(seed) + "\n";
    out += "rounds,,,," + std::to_string(rounds) + "\n";
    for (const auto& assign : assignments) {
        out += "assignment," + std::to_string(assign.round) + "," + assign.ap_id + "," +
               std::to_string(assign.channel) + ",\n";
    }
    for (const auto& [ap_id, channel] : final_channels) {
        out += "final,," + ap_id + "," + std::to_string(channel) + ",\n";
    }
    for (const auto& row : occupancy) {
        for (const auto& [ch, level] : row.levels_dbm) {
            out += "occupancy," + std::to_string(row.round) + "," + row.ap_id + "," +
                   std::to_string(ch) + "," + full(level) + "\n";
        }
    }
    for (const auto& [round, sum] : interference_sum_dbm) {
        out += "interference," + std::to_string(round) + ",,," + full(sum) + "\n";
    }
    return out;
}

std::string RunReport::to_table() const {
    std::string out;
    out += "rounds run: " + std::to_string(rounds) + " (seed " + std::to_string(seed) + ")\n";
    out += "assignments:\n";
    if (assignments.empty()) {
        out += "  (none)\n";
    }
    for (const auto& assign : assignments) {
        out += "  round " + std::to_string(assign.round) + ": " + assign.ap_id + " -> ch " +
               std::to_string(assign.channel) + "\n";
    }
    out += "final channels:\n";
    for (const auto& [ap_id, channel] : final_channels) {
        out += "  " + ap_id + ": ch " + std::to_string(channel) + "\n";
    }
    if (!occupancy.empty()) {
        const auto& last_round = occupancy.back().round;
        out += "occupancy, round " + std::to_string(last_round) + " (dBm):\n";
        for (const auto& row : occupancy) {
            if (row.round != last_round) {
                continue;
            }
            out += "  " + row.ap_id + ":";
            for (const auto& [ch, level] : row.levels_dbm) {
                out += " ch" + std::to_string(ch) + "=" + two_digits(level);
            }
            out += "\n";
        }
    }
    if (!interference_sum_dbm.empty()) {
        out += "interference at assigned channels (dBm sum): " +
               two_digits(interference_sum_dbm.back().second) + "\n";
    }
    return out;
}

std::string RunReport::render(const std::string& format) const {
    if (format == "structured") {
        return to_json();
    }
    if (format == "table") {
        return to_csv();
    }
    fail(Errc::invalid_argument, "unknown report format: " + format);
}

RunReport RunReport::from_json(const std::string& text) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded() || !root.is_object()) {
        fail(Errc::parse, "run report is not a JSON object");
    }
    RunReport report;
    report.format_version = root.at("format_version").get<int>();
    report.seed = root.at("seed").get<std::uint64_t>();
    report.rounds = root.at("rounds").get<int>();
    for (const auto& assign : root.at("assignments")) {
        report.assignments.push_back({assign.at("ap_id").get<std::string>(),
                                      assign.at("channel").get<int>(),
                                      assign.at("round").get<std::uint64_t>()});
    }
    for (const auto& [ap_id, channel] : root.at("final_channels").items()) {
        report.final_channels[ap_id] = channel.get<int>();
    }
    for (const auto& row : root.at("occupancy")) {
        OccupancyRow occ;
        occ.round = row.at("round").get<std::uint64_t>();
        occ.ap_id = row.at("ap_id").get<std::string>();
        for (const auto& [ch, level] : row.at("levels_dbm").items()) {
            occ.levels_dbm[std::stoi(ch)] = level.get<double>();
        }
        report.occupancy.push_back(std::move(occ));
    }
    for (const auto& item : root.at("interference_sum_dbm")) {
        report.interference_sum_dbm.emplace_back(item.at("round").get<std::uint64_t>(),
                                                 item.at("sum_dbm").get<double>());
    }
    return report;
}

}  // namespace chanalloc
