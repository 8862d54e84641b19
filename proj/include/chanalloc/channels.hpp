#pragma once

#include <array>
#include <compare>
#include <span>
#include <vector>

#include "chanalloc/errors.hpp"

namespace chanalloc {

/// 2.4 GHz Wi-Fi channel, ETSI numbering 1..13. Channels are 20 MHz wide with
/// 5 MHz spacing, so neighbours overlap.
struct ChannelId {
    int index = 1;

    static constexpr int kMin = 1;
    static constexpr int kMax = 13;
    static constexpr double kWidthMhz = 20.0;

    static ChannelId checked(int index);
    static bool valid(int index) { return index >= kMin && index <= kMax; }

    double center_mhz() const { return 2412.0 + 5.0 * (index - 1); }

    auto operator<=>(const ChannelId&) const = default;
};

/// One measuring point of the 128-point scan grid: 976.5625 kHz spacing
/// starting at 2400 MHz, covering 2.400-2.525 GHz.
struct FrequencyBin {
    int index = 0;
    double center_mhz = 2400.0;

    auto operator<=>(const FrequencyBin&) const = default;
};

inline constexpr int kGridBinCount = 128;
inline constexpr double kGridSpacingMhz = 0.9765625;
inline constexpr double kGridStartMhz = 2400.0;

/// The 128-bin measurement grid.
std::vector<FrequencyBin> default_grid();

/// Energy fraction one channel counts against another as a function of
/// channel-index distance: 1, 3/4, 1/2, 1/4 at d = 0..3, zero beyond.
double crossing_coefficient_for_distance(int distance);
double crossing_coefficient(ChannelId ch, ChannelId k);

enum class Quality { Unacceptable, Bad, Acceptable, VeryGood, Excellent };

/// Half-open level band (lower_dbm, upper_dbm]. The five bands partition the
/// real line; interior boundaries are -90, -81, -71 and -67 dBm, each owned by
/// the band below it.
struct QualityBand {
    Quality label;
    double lower_dbm;
    double upper_dbm;
};

const std::array<QualityBand, 5>& quality_bands();
Quality classify_quality(double level_dbm);

/// Human-readable band name ("Very good", ...).
const char* quality_label(Quality q);

/// All grid bins whose center lies within +/-10 MHz of the channel center.
/// Throws if the grid is empty or does not cover the channel.
std::vector<FrequencyBin> bins_for_channel(ChannelId ch, std::span<const FrequencyBin> grid);

/// Fitted model of worldwide AP count at the end of a year:
/// (year - 2000)^4.54 + 3450. Valid for year > 2000.
///
/// Note: the literal model evaluates to roughly 5.0e5 at year 2018;
/// extrapolations citing hundreds of millions of deployed APs for that year
/// are not reproduced by this formula.
double growth_model(int year);

inline constexpr double kGrowthExponent = 4.54;
inline constexpr double kGrowthOffset = 3450.0;

}  // namespace chanalloc
