#include "abrupt/error.hpp"
#include "abrupt/ingest.hpp"
#include "abrupt/text_io.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

using namespace abrupt;

namespace {

RegionSeries series_of(std::vector<Count> daily) {
    RegionSeries s;
    s.daily = std::move(daily);
    return s;
}

std::size_t line_of(const std::string& text, const IngestOptions& opt) {
    try {
        parse_daily_csv(text, "mem", opt);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

// value at day e for order k, delta 1, written out from the daily counts
Count hand_stencil(const std::vector<Count>& d, int k, std::size_t e) {
    // N(t) = d[0] + ... + d[t-1]
    auto n = [&](std::ptrdiff_t t) {
        Count s = 0;
        for (std::ptrdiff_t i = 0; i < t; ++i) s += d[static_cast<std::size_t>(i)];
        return s;
    };
    const auto t = static_cast<std::ptrdiff_t>(e);
    if (k == 2) return n(t + 1) - 2 * n(t) + n(t - 1);
    return n(t + 1) - 3 * n(t) + 3 * n(t - 1) - n(t - 2);
}

}  // namespace

TEST_CASE("daily and cumulative modes") {
    IngestOptions daily;
    const auto a = parse_daily_csv("date,cases\n2020-03-01,2\n2020-03-02,3\n2020-03-03,5\n", "mem", daily);
    CHECK(a.daily == std::vector<Count>{2, 3, 5});
    CHECK(a.day_label(0) == "2020-03-01");
    CHECK(a.day_label(2) == "2020-03-03");
    CHECK(a.filled_days.empty());

    IngestOptions cumulative;
    cumulative.mode = CountMode::Cumulative;
    const auto b = parse_daily_csv("date,cases\n1,2\n2,5\n3,10\n", "mem", cumulative);
    CHECK(b.daily == std::vector<Count>{2, 3, 5});
    CHECK(b.day_label(0) == "1");
    CHECK(parse_count_mode("cumulative") == CountMode::Cumulative);
    CHECK_THROWS_AS(parse_count_mode("weekly"), std::invalid_argument);
}

TEST_CASE("gaps are zero-filled and flagged") {
    const auto s = parse_daily_csv("date,cases\n2020-02-28,4\n2020-03-01,6\n", "mem", {});
    // 2020 is a leap year: Feb 29 is missing
    CHECK(s.daily == std::vector<Count>{4, 0, 6});
    CHECK(s.filled_days == std::vector<std::size_t>{1});
    REQUIRE(s.audit.size() == 1);
    CHECK(s.audit[0].find("2020-02-29") != std::string::npos);
}

TEST_CASE("cumulative corrections within tolerance are clamped, larger ones fail") {
    IngestOptions opt;
    opt.mode = CountMode::Cumulative;
    const auto s = parse_daily_csv("date,cases\n1,100\n2,98\n3,110\n", "mem", opt);
    CHECK(s.daily == std::vector<Count>{100, 0, 10});
    CHECK(s.audit.size() == 1);
    CHECK(line_of("date,cases\n1,100\n2,50\n", opt) == 3);

    IngestOptions daily;
    const auto neg = parse_daily_csv("date,cases\n1,5\n2,-3\n", "mem", daily);
    CHECK(neg.daily == std::vector<Count>{5, 0});
    CHECK(neg.audit.size() == 1);
}

TEST_CASE("load errors carry row numbers") {
    const IngestOptions opt;
    CHECK(line_of("date,cases\n2020-01-01,1\n2020-13-01,2\n", opt) == 3);
    CHECK(line_of("date,cases\n2020-01-01,1\n2,2\n", opt) == 3);
    CHECK(line_of("date,cases\n2,1\n2,2\n", opt) == 3);
    CHECK(line_of("date,cases\n1,x\n", opt) == 2);
    CHECK(line_of("day,cases\n1,1\n", opt) == 1);
    CHECK(line_of("date,count\n1,1\n", opt) == 1);
    CHECK_THROWS_AS(parse_daily_csv("region,date,cases\nA,1,1\nB,1,1\n", "mem", opt), ParseError);
}

TEST_CASE("region filter") {
    const std::string text = "region,date,cases\nA,1,1\nB,1,7\nA,2,2\nB,2,8\n";
    IngestOptions opt;
    opt.region = "B";
    const auto b = parse_daily_csv(text, "mem", opt);
    CHECK(b.region == "B");
    CHECK(b.daily == std::vector<Count>{7, 8});
    opt.region = "C";
    CHECK_THROWS_AS(parse_daily_csv(text, "mem", opt), ParseError);
}

TEST_CASE("export then reload is identity") {
    std::mt19937_64 rng(6);
    std::poisson_distribution<Count> pois(30.0);
    for (bool iso : {true, false}) {
        std::string text = iso ? "region,date,cases\n" : "date,cases\n";
        for (int d = 0; d < 30; ++d) {
            if (d == 17) continue;  // a gap
            char day[16];
            std::snprintf(day, sizeof day, "2021-01-%02d", d + 1);
            text += iso ? "X," + std::string(day) : std::to_string(100 + d);
            text += "," + std::to_string(pois(rng)) + "\n";
        }
        const auto s = parse_daily_csv(text, "mem", {});
        const auto back = parse_daily_csv(format_daily_csv(s), "mem", {});
        CHECK(back.daily == s.daily);
        CHECK(back.region == s.region);
        CHECK(back.start_index == s.start_index);
        CHECK(back.start_date == s.start_date);
    }

    const auto dir = std::filesystem::temp_directory_path() / "abrupt_test_ingest";
    std::filesystem::create_directories(dir);
    const auto s = series_of({1, 2, 3});
    text::write_file(dir / "s.csv", format_daily_csv(s));
    CHECK(load_daily_csv(dir / "s.csv", {}).daily == s.daily);
    std::filesystem::remove_all(dir);
}

TEST_CASE("analyze_binned: constant, spike and step") {
    const auto flat = analyze_binned(series_of(std::vector<Count>(30, 12)), 2, 1);
    for (const auto& p : flat.profile.points) CHECK(p.value == 0);
    CHECK(analyze_binned(series_of(std::vector<Count>(30, 12)), 4, 2).argmax_value == 0);

    std::vector<Count> spike(30, 10);
    spike[12] += 7;
    const auto a = analyze_binned(series_of(spike), 2, 1);
    CHECK(a.argmax_day == 12);
    CHECK(a.argmax_value == 7);
    for (const auto& p : a.profile.points) {
        const auto day = static_cast<std::size_t>(p.time);
        CHECK(p.value == (day == 12 ? 7 : day == 13 ? -7 : 0));
    }

    std::vector<Count> step(30, 10);
    for (std::size_t i = 18; i < 30; ++i) step[i] += 5;
    const auto two = analyze_binned(series_of(step), 2, 1);
    std::size_t nonzero = 0;
    for (const auto& p : two.profile.points) nonzero += p.value != 0;
    CHECK(nonzero == 1);
    CHECK(two.argmax_day == 18);
    const auto three = analyze_binned(series_of(step), 3, 1);
    for (const auto& p : three.profile.points) {
        const auto day = static_cast<std::size_t>(p.time);
        CHECK(p.value == (day == 18 ? 5 : day == 19 ? -5 : 0));
    }
}

TEST_CASE("analyze_binned agrees with the stencil on the step counting function") {
    std::mt19937_64 rng(14);
    std::poisson_distribution<Count> pois(20.0);
    std::vector<Count> d(60);
    for (auto& x : d) x = pois(rng);
    const auto s = series_of(d);
    const CountingFunction n(from_binned(s.to_binned()));
    for (int k = 1; k <= 5; ++k) {
        for (int dd = 1; dd <= 3; ++dd) {
            const auto a = analyze_binned(s, k, dd);
            for (const auto& p : a.profile.points) {
                CHECK(p.value == discrete_derivative(n, k, dd, p.time));
                CHECK(p.time == std::round(p.time));
            }
        }
    }
    const auto a2 = analyze_binned(s, 2, 1);
    for (const auto& p : a2.profile.points) CHECK(p.value == hand_stencil(d, 2, static_cast<std::size_t>(p.time)));
    const auto a3 = analyze_binned(s, 3, 1);
    for (const auto& p : a3.profile.points) CHECK(p.value == hand_stencil(d, 3, static_cast<std::size_t>(p.time)));
}

TEST_CASE("too-short series names the minimum length") {
    CHECK_THROWS_WITH_AS(analyze_binned(series_of({1, 2, 3, 4, 5}), 2, 2),
                         "series has 5 days; order 2 with delta_days 2 needs at least 6", std::invalid_argument);
    CHECK_NOTHROW(analyze_binned(series_of({1, 2, 3}), 2, 1));
    CHECK_THROWS_AS(analyze_binned(series_of({1, 2, 3}), 2, 0), std::invalid_argument);
}

TEST_CASE("profile export and summary") {
    RegionSeries s = parse_daily_csv("date,cases\n2020-04-01,1\n2020-04-02,1\n2020-04-03,4\n2020-04-04,1\n", "mem", {});
    const auto a = analyze_binned(s, 2, 1);
    CHECK(format_binned_profile_csv(a, s) == "day,value\n2020-04-02,0\n2020-04-03,3\n2020-04-04,-3\n");
    CHECK(format_binned_summary(a, s) == "argmax day=2020-04-03 value=3 k=2 delta_days=1\n");
}
