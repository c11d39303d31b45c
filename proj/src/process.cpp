#include "abrupt/process.hpp"

#include "abrupt/error.hpp"
#include "abrupt/text_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace abrupt {

namespace {

// Relative slack used when locating bin edges that were computed in floating point.
constexpr double kEdgeSlack = 1e-9;

}  // namespace

EventTimes::EventTimes(std::vector<double> times, double horizon)
    : times_(std::move(times)), horizon_(horizon) {
    if (!std::isfinite(horizon_) || horizon_ < 0.0) {
        throw std::invalid_argument("event horizon must be finite and non-negative");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
        const double t = times_[i];
        if (!std::isfinite(t)) throw std::invalid_argument("event time is not finite");
        if (t < 0.0 || t > horizon_) {
            throw std::invalid_argument("event time " + text::format_double(t) +
                                        " outside [0, " + text::format_double(horizon_) + "]");
        }
        if (i > 0 && t < times_[i - 1]) {
            throw std::invalid_argument("event times must be sorted (index " + std::to_string(i) +
                                        ")");
        }
    }
}

Count EventTimes::count_at(double t) const {
    return static_cast<Count>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
}

std::uint64_t EventTimes::checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t word) {
        for (int b = 0; b < 8; ++b) {
            h ^= (word >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    for (double t : times_) mix(std::bit_cast<std::uint64_t>(t));
    mix(std::bit_cast<std::uint64_t>(horizon_));
    return h;
}

Count count_at(const EventTimes& events, double t) { return events.count_at(t); }

void BinnedSeries::validate() const {
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
        throw std::invalid_argument("bin width must be positive");
    }
    if (!std::isfinite(start_time)) throw std::invalid_argument("bin start must be finite");
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0) {
            throw std::invalid_argument("negative count " + std::to_string(counts[i]) +
                                        " in bin " + std::to_string(i));
        }
    }
}

std::vector<Count> cumulative(const BinnedSeries& series) {
    std::vector<Count> out(series.counts.size());
    Count running = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        running += series.counts[i];
        out[i] = running;
    }
    return out;
}

StepCounts::StepCounts(double start, double width, std::vector<Count> cumulative)
    : start_(start), width_(width), cumulative_(std::move(cumulative)) {
    if (!(width_ > 0.0)) throw std::invalid_argument("bin width must be positive");
    for (std::size_t i = 1; i < cumulative_.size(); ++i) {
        if (cumulative_[i] < cumulative_[i - 1]) {
            throw std::invalid_argument("cumulative counts must be non-decreasing");
        }
    }
}

Count StepCounts::count_at(double t) const {
    if (cumulative_.empty()) return 0;
    const double edges = std::floor((t - start_) / width_ + kEdgeSlack);
    // `edges` right edges lie at or before t; the first right edge is start + width.
    if (edges < 1.0) return 0;
    const auto n = cumulative_.size();
    if (edges >= static_cast<double>(n)) return cumulative_.back();
    return cumulative_[static_cast<std::size_t>(edges) - 1];
}

StepCounts from_binned(const BinnedSeries& series) {
    series.validate();
    return StepCounts(series.start_time, series.bin_width, cumulative(series));
}

Count CountingFunction::count_at(double t) const {
    return std::visit([t](const auto& r) { return r.count_at(t); }, repr_);
}

double CountingFunction::horizon() const {
    return std::visit([](const auto& r) { return r.horizon(); }, repr_);
}

BinnedSeries bin_events(const EventTimes& events, double width, double start, std::size_t bins) {
    if (!(width > 0.0)) throw std::invalid_argument("bin width must be positive");
    BinnedSeries out{width, std::vector<Count>(bins, 0), start};
    for (double t : events.times()) {
        const double pos = std::floor((t - start) / width);
        if (pos < 0.0 || pos >= static_cast<double>(bins)) continue;
        ++out.counts[static_cast<std::size_t>(pos)];
    }
    return out;
}

EventTimes parse_event_times(std::string_view contents, const std::string& source,
                             double fallback_horizon) {
    std::vector<double> times;
    double horizon = fallback_horizon;
    bool explicit_horizon = false;
    std::size_t lineno = 0;
    for (auto line : text::split(contents, '\n')) {
        ++lineno;
        line = text::trim(line);
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto body = text::trim(line.substr(1));
            if (body.starts_with("horizon=")) {
                try {
                    horizon = text::parse_double(body.substr(8), "horizon");
                } catch (const std::invalid_argument& e) {
                    throw ParseError(source, lineno, e.what());
                }
                explicit_horizon = true;
            }
            continue;
        }
        try {
            times.push_back(text::parse_double(line, "event time"));
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, lineno, e.what());
        }
        if (times.size() > 1 && times.back() < times[times.size() - 2]) {
            throw ParseError(source, lineno, "event times must be non-decreasing");
        }
    }
    if (!explicit_horizon && horizon < 0.0) horizon = times.empty() ? 0.0 : times.back();
    try {
        return EventTimes(std::move(times), horizon);
    } catch (const std::invalid_argument& e) {
        throw ParseError(source, lineno, e.what());
    }
}

EventTimes read_event_times(const std::filesystem::path& path, double fallback_horizon) {
    return parse_event_times(text::read_file(path), path.string(), fallback_horizon);
}

std::string format_event_times(const EventTimes& events) {
    std::string out = "# horizon=" + text::format_double(events.horizon()) + "\n";
    for (double t : events.times()) {
        out += text::format_double(t);
        out += '\n';
    }
    return out;
}

void write_event_times(const std::filesystem::path& path, const EventTimes& events) {
    text::write_file(path, format_event_times(events));
}

BinnedSeries parse_binned_csv(std::string_view contents, const std::string& source) {
    auto lines = text::split(contents, '\n');
    std::size_t lineno = 0;
    bool header_seen = false;
    std::vector<double> starts;
    std::vector<std::size_t> rows;
    BinnedSeries series;
    for (auto line : lines) {
        ++lineno;
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        auto fields = text::split(line, ',');
        if (!header_seen) {
            if (fields.size() != 2 || text::trim(fields[0]) != "bin_start" ||
                text::trim(fields[1]) != "count") {
                throw ParseError(source, lineno, "expected header 'bin_start,count'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 2) throw ParseError(source, lineno, "expected 2 fields");
        try {
            starts.push_back(text::parse_double(fields[0], "bin_start"));
            rows.push_back(lineno);
            const Count c = text::parse_int(fields[1], "count");
            if (c < 0) throw std::invalid_argument("negative count");
            series.counts.push_back(c);
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    if (!header_seen) throw ParseError(source, lineno, "missing header 'bin_start,count'");
    if (starts.empty()) {
        series.start_time = 0.0;
        series.bin_width = 1.0;
        return series;
    }
    series.start_time = starts.front();
    if (starts.size() == 1) {
        series.bin_width = 1.0;
        return series;
    }
    series.bin_width = starts[1] - starts[0];
    if (!(series.bin_width > 0.0)) throw ParseError(source, rows[1], "bins must be increasing");
    for (std::size_t i = 1; i < starts.size(); ++i) {
        const double expected = series.start_time + series.bin_width * static_cast<double>(i);
        if (std::abs(starts[i] - expected) > 1e-6 * std::max(1.0, std::abs(expected))) {
            throw ParseError(source, rows[i], "bins are not contiguous and uniform");
        }
    }
    return series;
}

BinnedSeries read_binned_csv(const std::filesystem::path& path) {
    return parse_binned_csv(text::read_file(path), path.string());
}

std::string format_binned_csv(const BinnedSeries& series) {
    std::string out = "bin_start,count\n";
    for (std::size_t i = 0; i < series.counts.size(); ++i) {
        out += text::format_double(series.start_time + series.bin_width * static_cast<double>(i));
        out += ',';
        out += std::to_string(series.counts[i]);
        out += '\n';
    }
    return out;
}

}  // namespace abrupt
