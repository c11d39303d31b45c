#include "abrupt/detector.hpp"
#include "abrupt/error.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace abrupt;

namespace {

// N(t) = floor(slope * (t - t0)+): one event every 1/slope after t0.
EventTimes ramp(double t0, double slope, double horizon) {
    std::vector<double> t;
    for (int i = 1; t0 + i / slope <= horizon; ++i) t.push_back(t0 + i / slope);
    return EventTimes(std::move(t), horizon);
}

}  // namespace

TEST_CASE("threshold_candidates keeps scores at or above A/2") {
    const double d = 0.1;
    DerivativeProfile zero;
    zero.points = {{1.0, 0}, {2.0, 0}};
    CHECK(threshold_candidates(zero, d, 1.0).empty());

    DerivativeProfile p;
    p.points = {{1.0, 6}, {2.0, 1}};  // raw values 6 and 1, i.e. 6 delta and delta after scaling by delta = 1
    const auto c = threshold_candidates(p, 1.0, 10.0);
    REQUIRE(c.size() == 1);
    CHECK(c[0].time == 1.0);
    CHECK(c[0].score == 6.0);

    DerivativeProfile neg;
    neg.points = {{0.5, -5}};
    CHECK(threshold_candidates(neg, 1.0, 10.0).size() == 1);  // absolute value, and >= is inclusive
    CHECK(threshold_candidates(neg, 1.0, 10.01).empty());
}

TEST_CASE("packing examples") {
    const std::vector<Estimate> three{{1.0, 3.0, 0}, {1.1, 5.0, 0}, {5.0, 1.0, 0}};
    const auto p = greedy_packing(three, 0.5);
    REQUIRE(p.size() == 2);
    CHECK((p[0].time == 1.0 || p[0].time == 1.1));
    CHECK(p[1].time == 5.0);
    CHECK(p[0].time == 1.1);  // heavier of the two

    const std::vector<Estimate> one{{2.0, 1.0, 0}};
    CHECK(greedy_packing(one, 1.0).size() == 1);

    const std::vector<Estimate> crowded{{1.0, 1.0, 0}, {1.2, 9.0, 0}, {1.4, 2.0, 0}};
    const auto q = greedy_packing(crowded, 1.0);
    REQUIRE(q.size() == 1);
    CHECK(q[0].time == 1.2);

    CHECK(greedy_packing(std::vector<Estimate>{}, 1.0).empty());
    CHECK_THROWS_AS(greedy_packing(one, 0.0), std::invalid_argument);
}

TEST_CASE("packing equals the exhaustive optimum and is maximal") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 10.0), s(0.0, 5.0);
    std::uniform_int_distribution<int> size(0, 12);
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<Estimate> c(static_cast<std::size_t>(size(rng)));
        for (auto& e : c) e = {u(rng), s(rng), 0};
        std::sort(c.begin(), c.end(), [](const Estimate& a, const Estimate& b) { return a.time < b.time; });
        const double min_sep = 0.3 + 0.1 * (rep % 20);
        const auto p = greedy_packing(c, min_sep);
        const auto bf = testing::brute_force_packing(c, min_sep);
        std::vector<double> times;
        double score = 0.0;
        for (const auto& e : p) {
            times.push_back(e.time);
            score += e.score;
        }
        CHECK(std::is_sorted(times.begin(), times.end()));
        CHECK(sep(times) > min_sep);
        CHECK(p.size() == bf.size);
        if (!c.empty()) CHECK(score == doctest::Approx(bf.score));
        CHECK(testing::is_maximal_packing(c, p, min_sep));
    }
}

TEST_CASE("detect on a deterministic slope change") {
    const CountingFunction n(ramp(5.0, 100.0, 10.0));
    DetectorConfig cfg;
    cfg.order = 2;
    cfg.delta = 0.5;
    cfg.threshold = 100.0;
    const auto r = detect(n, cfg);
    REQUIRE(r.estimates.size() == 1);
    CHECK(std::abs(r.estimates[0].time - 5.0) <= 0.5);
    CHECK(r.estimates[0].score >= 50.0);
    CHECK(r.candidate_count >= 1);
    CHECK(r.grid_lo == doctest::Approx(0.5));
    CHECK(r.grid_hi == doctest::Approx(9.5));
}

TEST_CASE("detect: estimates are candidates with consistent scores") {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 10; ++rep) {
        // homogeneous noise plus a burst of 150 events near 4 and near 8
        std::uniform_real_distribution<double> u(0.0, 12.0), b1(4.0, 4.2), b2(8.0, 8.2);
        std::vector<double> t;
        for (int i = 0; i < 1200; ++i) t.push_back(u(rng));
        for (int i = 0; i < 150; ++i) t.push_back(b1(rng));
        for (int i = 0; i < 150; ++i) t.push_back(b2(rng));
        std::sort(t.begin(), t.end());
        const CountingFunction n(EventTimes(t, 12.0));
        DetectorConfig cfg;
        cfg.order = 2;
        cfg.delta = 0.2;
        cfg.threshold = 600.0;
        const auto r = detect(n, cfg);
        const auto profile = derivative_profile(n, 2, 0.2, cfg.resolved_grid_step());
        const auto cands = threshold_candidates(profile, 0.2, 600.0);
        CHECK(r.candidate_count == cands.size());
        CHECK(sep(r.times()) > 2 * 2 * 0.2);
        for (const auto& e : r.estimates) {
            CHECK(e.score >= 300.0);
            CHECK(std::any_of(cands.begin(), cands.end(), [&](const Estimate& c) { return c.time == e.time; }));
            CHECK(e.raw == discrete_derivative(n, 2, 0.2, e.time));
            CHECK(e.score == doctest::Approx(std::abs(static_cast<double>(e.raw)) / 0.2));
        }
        CHECK(r.estimates.size() >= 2);
    }
}

TEST_CASE("argmax picks the unique maximum and breaks ties toward the earliest time") {
    DerivativeProfile p;
    p.points = {{9.0, 1}, {9.1, 7}, {9.2, -3}};
    CHECK(p.points[argmax_index(p)].time == 9.1);
    DerivativeProfile tie;
    tie.points = {{3.0, 5}, {5.0, 1}, {7.0, -5}};
    CHECK(tie.points[argmax_index(tie)].time == 3.0);
    CHECK_THROWS_AS(argmax_index(DerivativeProfile{}), WindowError);

    // Two equal bursts: the first one wins.
    std::vector<double> t(10, 3.0);
    t.insert(t.end(), 10, 7.0);
    const CountingFunction n(EventTimes(t, 10.0));
    const double at = argmax_single(n, 1, 1.0, 0.25);
    CHECK(at < 3.0);
    CHECK(at >= 2.0);
    CHECK_THROWS_AS(argmax_single(n, 5, 3.0, 0.1), WindowError);
}

TEST_CASE("argmax offset on a slope change") {
    const double step = 0.01;
    const CountingFunction n(ramp(5.0, 1000.0, 10.0));
    // k = 2 peaks exactly at the kink, k = 4 one delta later
    CHECK(std::abs(argmax_single(n, 2, 0.3, step) - 5.0) < step);
    CHECK(std::abs(argmax_single(n, 4, 0.3, step) - 5.3) < step + 1e-9);
}

TEST_CASE("shift equivariance on a dyadic grid") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> tick(0, 8 * 1024);
    std::vector<double> t;
    for (int i = 0; i < 600; ++i) t.push_back(tick(rng) / 1024.0 + 1.0 / 2048.0);
    std::sort(t.begin(), t.end());
    const double c = 2.0;
    std::vector<double> shifted = t;
    for (auto& x : shifted) x += c;
    const CountingFunction a(EventTimes(t, 9.0)), b(EventTimes(shifted, 11.0));
    for (int k = 1; k <= 4; ++k) {
        const double d = 0.25;
        const double lo = 1.0, hi = 8.0 - 0.25;
        CHECK(argmax_single(b, k, d, 1.0 / 64, lo + c, hi + c) == argmax_single(a, k, d, 1.0 / 64, lo, hi) + c);
        DetectorConfig cfg;
        cfg.order = k;
        cfg.delta = d;
        cfg.grid_step = 1.0 / 64;
        cfg.threshold = 200.0;
        cfg.window_lo = lo;
        cfg.window_hi = hi;
        const auto ra = detect(a, cfg);
        cfg.window_lo += c;
        cfg.window_hi += c;
        const auto rb = detect(b, cfg);
        REQUIRE(ra.estimates.size() == rb.estimates.size());
        for (std::size_t i = 0; i < ra.estimates.size(); ++i) {
            CHECK(rb.estimates[i].time == ra.estimates[i].time + c);
            CHECK(rb.estimates[i].raw == ra.estimates[i].raw);
        }
    }
}

TEST_CASE("doubling every count leaves the argmax unchanged") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 20; ++rep) {
        std::poisson_distribution<Count> pois(50.0);
        BinnedSeries s{0.1, {}, 0.0};
        for (int i = 0; i < 200; ++i) s.counts.push_back(pois(rng) + (i >= 120 ? 30 : 0));
        BinnedSeries twice = s;
        for (auto& c : twice.counts) c *= 2;
        const CountingFunction a(from_binned(s)), b(from_binned(twice));
        for (int k = 1; k <= 4; ++k) CHECK(argmax_single(a, k, 0.5, 0.1) == argmax_single(b, k, 0.5, 0.1));
    }
}

TEST_CASE("d_max and sep") {
    CHECK(d_max({}, {}) == 0.0);
    CHECK(d_max({1.0, 3.0}, {1.5, 2.5}) == 0.5);
    CHECK(d_max({2.0}, {2.0}) == 0.0);
    CHECK(d_max({3.0, 1.0}, {1.1, 3.4}) == doctest::Approx(0.4));
    CHECK_THROWS_AS(d_max({1.0}, {}), std::invalid_argument);

    CHECK(sep({}) == std::numeric_limits<double>::infinity());
    CHECK(sep({5.0}) == std::numeric_limits<double>::infinity());
    CHECK(sep({1.0, 4.0, 6.0}) == 2.0);
    CHECK(sep({6.0, 1.0, 4.0}) == 2.0);
}

TEST_CASE("tuning helpers") {
    CHECK(suggest_delta(1e6, 2) == doctest::Approx(std::pow(10.0, -1.2)));
    CHECK(suggest_delta(1e6, 2) == doctest::Approx(0.0631).epsilon(1e-3));
    CHECK(suggest_delta(1e6, 1) == doctest::Approx(0.01));
    double prev = 0.0;
    for (int l = 1; l <= 50; ++l) {
        const double d = suggest_delta(1e6, l);
        CHECK(d > prev);
        CHECK(d < 1.0);
        prev = d;
    }
    CHECK_THROWS_AS(suggest_delta(1.0, 2), std::invalid_argument);

    CHECK(min_order_for(0.75) == 1);
    CHECK(min_order_for(0.6) == 3);
    CHECK_THROWS_AS(min_order_for(0.5), std::invalid_argument);
    CHECK_THROWS_AS(min_order_for(0.4), std::invalid_argument);
    // enumeration oracle
    for (double theta = 0.505; theta < 1.0; theta += 0.0137) {
        int l = 1;
        while (!(static_cast<double>(l + 1) / (2 * l + 1) < theta)) ++l;
        CHECK(min_order_for(theta) == l);
    }
    CHECK(min_order_for(0.51) >= 20);
}

TEST_CASE("config validation") {
    DetectorConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.resolved_grid_step() == doctest::Approx(0.01));
    cfg.delta = -1.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), "delta must be positive", std::invalid_argument);
    cfg = {};
    cfg.order = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.grid_step = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.threshold = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("report export") {
    ChangePointReport r;
    r.config.threshold = 10.0;
    r.estimates = {{1.5, 20.0, 2}};
    CHECK(format_report_csv(r) == "t_hat,score\n1.5,20\n");
    const auto meta = format_report_metadata(r);
    CHECK(meta.find("mode=threshold") != std::string::npos);
    CHECK(meta.find("estimate_count=1") != std::string::npos);
}
