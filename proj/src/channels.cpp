#include "chanalloc/channels.hpp"

#include <cmath>
#include <limits>

namespace chanalloc {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::invalid_argument: return "invalid_argument";
        case Errc::domain: return "domain";
        case Errc::parse: return "parse";
        case Errc::insufficient_data: return "insufficient_data";
        case Errc::io: return "io";
        case Errc::bind: return "bind";
        case Errc::state: return "state";
        case Errc::internal: return "internal";
    }
    return "unknown";
}

ChannelId ChannelId::checked(int index) {
    if (!valid(index)) {
        fail(Errc::domain, "channel index " + std::to_string(index) + " outside 1..13");
    }
    return ChannelId{index};
}

std::vector<FrequencyBin> default_grid() {
    std::vector<FrequencyBin> grid;
    grid.reserve(kGridBinCount);
    for (int i = 0; i < kGridBinCount; ++i) {
        grid.push_back({i, kGridStartMhz + kGridSpacingMhz * i});
    }
    return grid;
}

double crossing_coefficient_for_distance(int distance) {
    switch (distance < 0 ? -distance : distance) {
        case 0: return 1.0;
        case 1: return 3.0 / 4.0;
        case 2: return 1.0 / 2.0;
        case 3: return 1.0 / 4.0;
        default: return 0.0;
    }
}

double crossing_coefficient(ChannelId ch, ChannelId k) {
    return crossing_coefficient_for_distance(ch.index - k.index);
}

const std::array<QualityBand, 5>& quality_bands() {
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    static const std::array<QualityBand, 5> bands = {{
        {Quality::Unacceptable, -kInf, -90.0},
        {Quality::Bad, -90.0, -81.0},
        {Quality::Acceptable, -81.0, -71.0},
        {Quality::VeryGood, -71.0, -67.0},
        {Quality::Excellent, -67.0, kInf},
    }};
    return bands;
}

Quality classify_quality(double level_dbm) {
    if (!std::isfinite(level_dbm)) {
        fail(Errc::invalid_argument, "level must be finite");
    }
    for (const auto& band : quality_bands()) {
        if (level_dbm > band.lower_dbm && level_dbm <= band.upper_dbm) {
            return band.label;
        }
    }
    return Quality::Excellent;  // unreachable: bands cover the line
}

const char* quality_label(Quality q) {
    switch (q) {
        case Quality::Unacceptable: return "Unacceptable";
        case Quality::Bad: return "Bad";
        case Quality::Acceptable: return "Acceptable";
        case Quality::VeryGood: return "Very good";
        case Quality::Excellent: return "Excellent";
    }
    return "?";
}

std::vector<FrequencyBin> bins_for_channel(ChannelId ch, std::span<const FrequencyBin> grid) {
    if (grid.empty()) {
        fail(Errc::invalid_argument, "bin grid is empty");
    }
    const double center = ch.center_mhz();
    const double half_width = ChannelId::kWidthMhz / 2.0;
    std::vector<FrequencyBin> out;
    for (const auto& bin : grid) {
        if (std::abs(bin.center_mhz - center) <= half_width) {
            out.push_back(bin);
        }
    }
    if (out.empty()) {
        fail(Errc::invalid_argument,
             "grid does not cover channel " + std::to_string(ch.index));
    }
    return out;
}

double growth_model(int year) {
    if (year <= 2000) {
        fail(Errc::domain, "growth model defined for year > 2000");
    }
    return std::pow(static_cast<double>(year - 2000), kGrowthExponent) + kGrowthOffset;
}

}  // namespace chanalloc
