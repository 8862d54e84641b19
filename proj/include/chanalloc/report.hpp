#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chanalloc/protocol.hpp"

namespace chanalloc {

/// Outcome of a simulation or a served control-loop run. Serializes to
/// structured JSON and to a flat CSV table; both carry full-precision
/// numbers and identical content. to_table() is the human view with levels
/// rounded to two fractional digits.
struct RunReport {
    int format_version = 1;
    std::uint64_t seed = 0;
    int rounds = 0;
    std::vector<proto::AssignChannel> assignments;
    std::map<std::string, int> final_channels;

    struct OccupancyRow {
        std::uint64_t round = 0;
        std::string ap_id;
        std::map<int, double> levels_dbm;

        bool operator==(const OccupancyRow&) const = default;
    };
    std::vector<OccupancyRow> occupancy;

    /// Per-round sum over APs of their occupancy at the channel they ended
    /// the round on. Rounds where no AP had data are omitted.
    std::vector<std::pair<std::uint64_t, double>> interference_sum_dbm;

    std::string to_json() const;
    std::string to_csv() const;
    std::string to_table() const;
    std::string render(const std::string& format) const;  // "structured" | "table"

    static RunReport from_json(const std::string& text);

    bool operator==(const RunReport&) const = default;
};

}  // namespace chanalloc
