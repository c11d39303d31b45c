#pragma once

// Observed point-process data: raw event times, binned counts, and the
// counting function N(t) built from either.
//
// Counting convention: N(t) counts events at times <= t (right-closed), so a
// discrete derivative evaluated exactly at an event time includes that event.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace abrupt {

using Count = std::int64_t;

// Sorted event timestamps observed on [0, horizon]. Duplicates are allowed.
class EventTimes {
public:
    EventTimes() = default;
    // Throws std::invalid_argument if times are unsorted, non-finite or outside [0, horizon].
    EventTimes(std::vector<double> times, double horizon);

    std::span<const double> times() const { return times_; }
    double horizon() const { return horizon_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    // |{s : s <= t}|, by bisection.
    Count count_at(double t) const;

    // Order-sensitive FNV-1a hash of the raw timestamps and horizon.
    std::uint64_t checksum() const;

private:
    std::vector<double> times_;
    double horizon_ = 0.0;
};

// counts[i] is the number of events in [start + i*width, start + (i+1)*width).
struct BinnedSeries {
    double bin_width = 1.0;
    std::vector<Count> counts;
    double start_time = 0.0;

    double end_time() const { return start_time + bin_width * static_cast<double>(counts.size()); }
    // Throws std::invalid_argument on a non-positive width or a negative count.
    void validate() const;
};

// Prefix sums of the counts; same length.
std::vector<Count> cumulative(const BinnedSeries& series);

// Step counting function from binned data: all of a bin's events sit on its
// right edge, so N is exact at every bin boundary and constant in between.
class StepCounts {
public:
    StepCounts() = default;
    StepCounts(double start, double width, std::vector<Count> cumulative);

    Count count_at(double t) const;
    double horizon() const { return start_ + width_ * static_cast<double>(cumulative_.size()); }
    double start() const { return start_; }
    double width() const { return width_; }
    std::span<const Count> cumulative() const { return cumulative_; }

private:
    double start_ = 0.0;
    double width_ = 1.0;
    std::vector<Count> cumulative_;
};

StepCounts from_binned(const BinnedSeries& series);

// Either representation behind one N(t) interface.
class CountingFunction {
public:
    CountingFunction() = default;
    CountingFunction(EventTimes events) : repr_(std::move(events)) {}
    CountingFunction(StepCounts steps) : repr_(std::move(steps)) {}

    Count operator()(double t) const { return count_at(t); }
    Count count_at(double t) const;
    double horizon() const;
    Count total() const { return count_at(horizon()); }

    const EventTimes* events() const { return std::get_if<EventTimes>(&repr_); }
    const StepCounts* steps() const { return std::get_if<StepCounts>(&repr_); }

private:
    std::variant<EventTimes, StepCounts> repr_;
};

Count count_at(const EventTimes& events, double t);

// Histogram of events into `bins` bins of `width` starting at `start`;
// events outside the binned range are dropped.
BinnedSeries bin_events(const EventTimes& events, double width, double start, std::size_t bins);

// Event-times text: one timestamp per line, '#' comments. An optional
// "# horizon=<T>" comment records the observation window; otherwise the
// horizon defaults to `fallback_horizon`, or the last event when that is negative.
EventTimes parse_event_times(std::string_view text, const std::string& source,
                             double fallback_horizon = -1.0);
EventTimes read_event_times(const std::filesystem::path& path, double fallback_horizon = -1.0);
std::string format_event_times(const EventTimes& events);
void write_event_times(const std::filesystem::path& path, const EventTimes& events);

// Binned CSV with header `bin_start,count`; bins must be contiguous and uniform.
BinnedSeries parse_binned_csv(std::string_view text, const std::string& source);
BinnedSeries read_binned_csv(const std::filesystem::path& path);
std::string format_binned_csv(const BinnedSeries& series);

}  // namespace abrupt
