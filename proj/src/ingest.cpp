#include "abrupt/ingest.hpp"

#include "abrupt/detector.hpp"
#include "abrupt/error.hpp"
#include "abrupt/text_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace abrupt {

namespace {

using std::chrono::sys_days;

struct ParsedDate {
    std::int64_t index;
    std::optional<sys_days> date;
};

ParsedDate parse_date(std::string_view s) {
    s = text::trim(s);
    if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
        int y = 0;
        unsigned m = 0;
        unsigned d = 0;
        auto field = [&](std::size_t pos, std::size_t len, auto& out) {
            auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
            return ec == std::errc{} && p == s.data() + pos + len;
        };
        if (field(0, 4, y) && field(5, 2, m) && field(8, 2, d)) {
            const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                                  std::chrono::day{d}};
            if (ymd.ok()) {
                const sys_days days{ymd};
                return {days.time_since_epoch().count(), days};
            }
        }
        throw std::invalid_argument("invalid date '" + std::string(s) + "'");
    }
    try {
        return {text::parse_int(s, "date"), std::nullopt};
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("unparseable date '" + std::string(s) +
                                    "' (expected YYYY-MM-DD or a day number)");
    }
}

std::string format_date(sys_days d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

}  // namespace

CountMode parse_count_mode(std::string_view name) {
    if (name == "daily") return CountMode::Daily;
    if (name == "cumulative") return CountMode::Cumulative;
    throw std::invalid_argument("mode must be 'daily' or 'cumulative'");
}

std::string RegionSeries::day_label(std::size_t i) const {
    const auto offset = static_cast<std::int64_t>(i);
    if (start_date) return format_date(*start_date + std::chrono::days{offset});
    return std::to_string(start_index + offset);
}

BinnedSeries RegionSeries::to_binned() const { return BinnedSeries{1.0, daily, 0.0}; }

RegionSeries parse_daily_csv(std::string_view contents, const std::string& source,
                             const IngestOptions& options) {
    if (!(options.cumulative_tolerance >= 0.0)) {
        throw std::invalid_argument("cumulative tolerance must be non-negative");
    }
    std::optional<std::size_t> date_col;
    std::optional<std::size_t> cases_col;
    std::optional<std::size_t> region_col;
    std::size_t columns = 0;
    bool header = false;
    std::size_t lineno = 0;

    struct Row {
        std::size_t line;
        ParsedDate date;
        Count value;
    };
    std::vector<Row> rows;
    std::string region_seen;
    bool mixed_regions = false;

    for (auto line : text::split(contents, '\n')) {
        ++lineno;
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = text::split(line, ',');
        if (!header) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const auto name = text::trim(fields[i]);
                if (name == "date") date_col = i;
                if (name == "cases") cases_col = i;
                if (name == "region") region_col = i;
            }
            if (!date_col) throw ParseError(source, lineno, "missing column 'date'");
            if (!cases_col) throw ParseError(source, lineno, "missing column 'cases'");
            if (options.region && !region_col) {
                throw ParseError(source, lineno, "region filter given but no 'region' column");
            }
            columns = fields.size();
            header = true;
            continue;
        }
        if (fields.size() != columns) {
            throw ParseError(source, lineno, "expected " + std::to_string(columns) + " fields, got " +
                                                 std::to_string(fields.size()));
        }
        if (region_col) {
            const std::string region(text::trim(fields[*region_col]));
            if (options.region && region != *options.region) continue;
            if (region_seen.empty()) region_seen = region;
            mixed_regions = mixed_regions || region != region_seen;
        }
        try {
            const ParsedDate date = parse_date(fields[*date_col]);
            const auto cases = text::parse_int(fields[*cases_col], "cases");
            rows.push_back({lineno, date, cases});
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    if (!header) throw ParseError(source, lineno, "missing header with 'date' and 'cases'");
    if (mixed_regions) {
        throw ParseError(source, 0, "input holds several regions; select one with a region filter");
    }
    if (rows.empty()) {
        throw ParseError(source, 0, options.region ? "no rows for region '" + *options.region + "'"
                                                   : std::string("no data rows"));
    }

    RegionSeries series;
    series.region = options.region.value_or(region_seen);
    series.start_date = rows.front().date.date;
    series.start_index = rows.front().date.index;
    const bool iso = rows.front().date.date.has_value();
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date.date.has_value() != iso) {
            throw ParseError(source, rows[i].line, "mixes ISO dates and day numbers");
        }
        if (rows[i].date.index <= rows[i - 1].date.index) {
            throw ParseError(source, rows[i].line, "dates must be strictly increasing");
        }
    }

    Count running = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& row = rows[i];
        if (i > 0) {
            for (auto day = rows[i - 1].date.index + 1; day < row.date.index; ++day) {
                const auto offset = static_cast<std::size_t>(day - series.start_index);
                series.filled_days.push_back(offset);
                series.daily.push_back(0);
                series.audit.push_back("row " + std::to_string(row.line) + ": day " +
                                       series.day_label(offset) + " missing, filled with 0");
            }
        }
        Count daily = row.value;
        if (options.mode == CountMode::Cumulative) {
            if (row.value < 0) throw ParseError(source, row.line, "negative cumulative count");
            daily = row.value - running;
            if (daily < 0) {
                const double allowed = options.cumulative_tolerance * static_cast<double>(running);
                if (static_cast<double>(-daily) > allowed) {
                    throw ParseError(source, row.line,
                                     "cumulative count drops from " + std::to_string(running) + " to " +
                                         std::to_string(row.value) + ", beyond tolerance");
                }
            } else {
                running = row.value;
            }
        }
        if (daily < 0) {
            series.audit.push_back("row " + std::to_string(row.line) + ": daily count " +
                                   std::to_string(daily) + " clamped to 0");
            daily = 0;
        }
        series.daily.push_back(daily);
    }
    return series;
}

RegionSeries load_daily_csv(const std::filesystem::path& path, const IngestOptions& options) {
    return parse_daily_csv(text::read_file(path), path.string(), options);
}

std::string format_daily_csv(const RegionSeries& series) {
    const bool with_region = !series.region.empty();
    std::string out = with_region ? "region,date,cases\n" : "date,cases\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (with_region) out += series.region + ',';
        out += series.day_label(i) + ',' + std::to_string(series.daily[i]) + '\n';
    }
    return out;
}

BinnedAnalysis analyze_binned(const RegionSeries& series, int order, int delta_days) {
    if (delta_days < 1) throw std::invalid_argument("delta_days must be a positive integer");
    DerivativeStencil stencil(order, static_cast<double>(delta_days));  // validates the order
    const auto needed = static_cast<std::size_t>(order + 1) * static_cast<std::size_t>(delta_days);
    if (series.size() < needed) {
        throw std::invalid_argument("series has " + std::to_string(series.size()) +
                                    " days; order " + std::to_string(order) + " with delta_days " +
                                    std::to_string(delta_days) + " needs at least " +
                                    std::to_string(needed));
    }
    BinnedAnalysis a;
    a.order = order;
    a.delta_days = delta_days;
    const CountingFunction n(from_binned(series.to_binned()));
    a.profile = derivative_profile(n, order, stencil.delta(), 1.0);
    const std::size_t i = argmax_index(a.profile);
    a.argmax_day = static_cast<std::size_t>(std::llround(a.profile.points[i].time));
    a.argmax_value = a.profile.points[i].value;
    return a;
}

std::string format_binned_profile_csv(const BinnedAnalysis& analysis, const RegionSeries& series) {
    std::string out = "day,value\n";
    for (const auto& p : analysis.profile.points) {
        out += series.day_label(static_cast<std::size_t>(std::llround(p.time))) + ',' +
               std::to_string(p.value) + '\n';
    }
    return out;
}

std::string format_binned_summary(const BinnedAnalysis& analysis, const RegionSeries& series) {
    return "argmax day=" + series.day_label(analysis.argmax_day) +
           " value=" + std::to_string(analysis.argmax_value) + " k=" + std::to_string(analysis.order) +
           " delta_days=" + std::to_string(analysis.delta_days) + '\n';
}

}  // namespace abrupt
