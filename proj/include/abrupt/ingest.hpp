#pragma once

// Daily count tables (e.g. case reports per county) turned into binned
// counting processes, with day-resolution derivative analysis.

#include "abrupt/derivative.hpp"
#include "abrupt/process.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace abrupt {

enum class CountMode { Daily, Cumulative };

CountMode parse_count_mode(std::string_view name);

struct IngestOptions {
    CountMode mode = CountMode::Daily;
    // Keep only rows whose `region` column equals this value.
    std::optional<std::string> region;
    // Largest tolerated drop in cumulative input, as a fraction of the running
    // total; drops within it are clamped to zero daily cases, larger ones fail.
    double cumulative_tolerance = 0.05;
};

struct RegionSeries {
    std::string region;
    // First day; set when the input used ISO dates rather than day numbers.
    std::optional<std::chrono::sys_days> start_date;
    std::int64_t start_index = 0;
    // One entry per day from the first to the last input row.
    std::vector<Count> daily;
    // Day offsets that were absent from the input and zero-filled.
    std::vector<std::size_t> filled_days;
    // Human-readable record of every clamp and fill.
    std::vector<std::string> audit;

    std::size_t size() const { return daily.size(); }
    // ISO date or day number of offset i.
    std::string day_label(std::size_t i) const;
    BinnedSeries to_binned() const;
};

// Header must contain `date` and `cases`; an optional `region` column enables
// filtering. Dates are YYYY-MM-DD or integer day numbers. Throws ParseError
// with the offending row.
RegionSeries parse_daily_csv(std::string_view text, const std::string& source,
                             const IngestOptions& options);
RegionSeries load_daily_csv(const std::filesystem::path& path, const IngestOptions& options);

// Daily-mode CSV (`region,date,cases` or `date,cases`) that parses back to the same series.
std::string format_daily_csv(const RegionSeries& series);

struct BinnedAnalysis {
    int order = 2;
    int delta_days = 1;
    // Profile times are day offsets; the value at day e is the stencil at the
    // boundary between day e-1 and day e, and so involves day e's count first.
    DerivativeProfile profile;
    std::size_t argmax_day = 0;
    Count argmax_value = 0;
};

// Throws std::invalid_argument when the series is shorter than (order + 1) * delta_days.
BinnedAnalysis analyze_binned(const RegionSeries& series, int order, int delta_days);

// CSV `day,value` with day labels.
std::string format_binned_profile_csv(const BinnedAnalysis& analysis, const RegionSeries& series);
std::string format_binned_summary(const BinnedAnalysis& analysis, const RegionSeries& series);

}  // namespace abrupt
