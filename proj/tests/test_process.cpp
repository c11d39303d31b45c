#include "abrupt/error.hpp"
#include "abrupt/process.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

using namespace abrupt;

TEST_CASE("count_at follows the closed-right convention") {
    const EventTimes none({}, 10.0);
    CHECK(count_at(none, 5.0) == 0);

    const EventTimes e({1.0, 2.0, 3.0}, 4.0);
    CHECK(count_at(e, 2.5) == 2);
    CHECK(count_at(e, 3.0) == 3);
    CHECK(count_at(e, 0.5) == 0);
    CHECK(count_at(e, 100.0) == 3);
    CHECK(count_at(e, -1.0) == 0);
}

TEST_CASE("count_at is monotone and totals at the horizon") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> t(200);
        for (auto& x : t) x = u(rng);
        std::sort(t.begin(), t.end());
        const EventTimes e(t, 50.0);
        CHECK(e.count_at(50.0) == static_cast<Count>(e.size()));
        Count prev = 0;
        for (double s = -1.0; s <= 51.0; s += 0.037) {
            const Count c = e.count_at(s);
            CHECK(c >= prev);
            // brute force
            CHECK(c == std::count_if(t.begin(), t.end(), [s](double x) { return x <= s; }));
            prev = c;
        }
    }
}

TEST_CASE("EventTimes rejects invalid input") {
    CHECK_THROWS_AS(EventTimes({2.0, 1.0}, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(EventTimes({1.0, 6.0}, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(EventTimes({-0.5}, 5.0), std::invalid_argument);
    CHECK_NOTHROW(EventTimes({1.0, 1.0, 2.0}, 5.0));  // duplicates allowed
}

TEST_CASE("cumulative prefix sums") {
    CHECK(cumulative({1.0, {1, 1, 1}, 0.0}) == std::vector<Count>{1, 2, 3});
    CHECK(cumulative({1.0, {}, 0.0}).empty());
    CHECK(cumulative({1.0, {0, 4, 0, 2}, 0.0}) == std::vector<Count>{0, 4, 4, 6});
}

TEST_CASE("from_binned attributes each bin to its right edge") {
    const auto zeros = from_binned({1.0, {0, 0, 0}, 0.0});
    for (double t = -1.0; t < 4.0; t += 0.25) CHECK(zeros.count_at(t) == 0);

    const auto two = from_binned({1.0, {2, 3}, 0.0});
    CHECK(two.count_at(1.0) == 2);
    CHECK(two.count_at(2.0) == 5);
    CHECK(two.count_at(1.5) == 2);

    const auto one = from_binned({1.0, {5}, 0.0});
    CHECK(one.count_at(0.5) == 0);
    CHECK(one.count_at(1.0) == 5);

    CHECK_THROWS_AS(from_binned({1.0, {1, -1}, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(from_binned({0.0, {1}, 0.0}), std::invalid_argument);
}

TEST_CASE("binning then from_binned agrees with count_at at every right edge") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    for (double width : {0.1, 0.25, 1.0}) {
        std::vector<double> t(500);
        for (auto& x : t) x = u(rng);
        std::sort(t.begin(), t.end());
        const EventTimes e(t, 20.0);
        const auto bins = static_cast<std::size_t>(std::llround(20.0 / width));
        const auto steps = from_binned(bin_events(e, width, 0.0, bins));
        for (std::size_t i = 1; i <= bins; ++i) {
            const double edge = width * static_cast<double>(i);
            // an event exactly on an edge belongs to the next bin
            const auto strictly_before = std::count_if(t.begin(), t.end(), [edge](double x) { return x < edge; });
            CHECK(steps.count_at(edge) == (i == bins ? static_cast<Count>(e.size()) : strictly_before));
        }
    }
}

TEST_CASE("CountingFunction wraps both representations") {
    const CountingFunction a(EventTimes({0.5, 1.5}, 2.0));
    CHECK(a(1.0) == 1);
    CHECK(a.horizon() == 2.0);
    CHECK(a.total() == 2);
    CHECK(a.events() != nullptr);
    const CountingFunction b(from_binned({0.5, {1, 2, 3}, 1.0}));
    CHECK(b.horizon() == doctest::Approx(2.5));
    CHECK(b(1.5) == 1);
    CHECK(b(2.5) == 6);
    CHECK(b.steps() != nullptr);
}

TEST_CASE("event-times text round trip keeps horizon and bits") {
    const EventTimes e({0.1, 0.30000000000000004, 2.5}, 7.25);
    const auto parsed = parse_event_times(format_event_times(e), "mem");
    CHECK(parsed.horizon() == 7.25);
    CHECK(std::equal(parsed.times().begin(), parsed.times().end(), e.times().begin(), e.times().end()));
    CHECK(parsed.checksum() == e.checksum());

    const auto fallback = parse_event_times("# comment\n1\n2\n", "mem");
    CHECK(fallback.horizon() == 2.0);
    CHECK(parse_event_times("1\n2\n", "mem", 10.0).horizon() == 10.0);
}

TEST_CASE("event-times parser reports the failing line") {
    try {
        parse_event_times("1\n2\nabc\n", "f.txt");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_event_times("2\n1\n", "f.txt"), ParseError);
}

TEST_CASE("binned CSV round trip and validation") {
    const BinnedSeries s{0.5, {1, 0, 4}, 2.0};
    const auto back = parse_binned_csv(format_binned_csv(s), "mem");
    CHECK(back.counts == s.counts);
    CHECK(back.bin_width == doctest::Approx(0.5));
    CHECK(back.start_time == doctest::Approx(2.0));

    CHECK_THROWS_AS(parse_binned_csv("start,count\n0,1\n", "mem"), ParseError);
    CHECK_THROWS_AS(parse_binned_csv("bin_start,count\n0,-1\n", "mem"), ParseError);
    try {
        parse_binned_csv("bin_start,count\n0,1\n1,1\n3,1\n", "mem");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("write_event_times creates parent directories") {
    const auto dir = std::filesystem::temp_directory_path() / "abrupt_test_process" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    const EventTimes e({1.0, 2.0}, 3.0);
    write_event_times(dir / "e.txt", e);
    CHECK(read_event_times(dir / "e.txt").checksum() == e.checksum());
    CHECK_THROWS(read_event_times(dir / "missing.txt"));
    std::filesystem::remove_all(dir.parent_path());
}

TEST_CASE("checksum is order and value sensitive") {
    CHECK(EventTimes({1.0, 2.0}, 3.0).checksum() != EventTimes({1.0, 2.5}, 3.0).checksum());
    CHECK(EventTimes({1.0, 2.0}, 3.0).checksum() == EventTimes({1.0, 2.0}, 3.0).checksum());
}
