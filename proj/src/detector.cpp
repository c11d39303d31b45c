#include "abrupt/detector.hpp"

#include "abrupt/error.hpp"
#include "abrupt/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace abrupt {

void DetectorConfig::validate() const {
    if (order < 1 || order > kMaxDerivativeOrder) {
        throw std::invalid_argument("order must be in [1, " + std::to_string(kMaxDerivativeOrder) +
                                    "]");
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be positive");
    const double step = resolved_grid_step();
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("grid step must be positive");
    }
    if (step > delta * (1.0 + 1e-12)) throw std::invalid_argument("grid step must not exceed delta");
    if (threshold && !(*threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    if (horizon && (!(*horizon >= 0.0) || !std::isfinite(*horizon))) {
        throw std::invalid_argument("horizon must be finite and non-negative");
    }
    if (window_hi < window_lo) throw std::invalid_argument("window upper bound below lower bound");
}

std::vector<double> ChangePointReport::times() const {
    std::vector<double> out;
    out.reserve(estimates.size());
    for (const auto& e : estimates) out.push_back(e.time);
    return out;
}

std::vector<Estimate> threshold_candidates(const DerivativeProfile& profile, double delta,
                                           double threshold) {
    std::vector<Estimate> out;
    const double half = threshold / 2.0;
    for (const auto& p : profile.points) {
        const double score = std::abs(static_cast<double>(p.value)) / delta;
        if (score >= half) out.push_back({p.time, score, p.value});
    }
    return out;
}

std::vector<Estimate> greedy_packing(std::span<const Estimate> candidates, double min_sep) {
    if (!(min_sep > 0.0)) throw std::invalid_argument("packing separation must be positive");
    std::vector<Estimate> sorted(candidates.begin(), candidates.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Estimate& a, const Estimate& b) { return a.time < b.time; });
    const std::size_t n = sorted.size();

    // best[i]: optimal packing of the first i candidates, ordered by
    // (size, total score). A 1-D packing of maximum size is found exactly
    // by this prefix recursion.
    struct Value {
        std::size_t size = 0;
        double score = 0.0;
        bool operator<(const Value& o) const {
            return size != o.size ? size < o.size : score < o.score;
        }
    };
    std::vector<Value> best(n + 1);
    std::vector<std::size_t> compatible(n);
    std::vector<bool> take(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = sorted[i].time;
        compatible[i] = static_cast<std::size_t>(
            std::partition_point(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(i),
                                 [&](const Estimate& e) { return ti - e.time > min_sep; }) -
            sorted.begin());
        Value with = best[compatible[i]];
        with.size += 1;
        with.score += sorted[i].score;
        take[i] = best[i] < with;
        best[i + 1] = take[i] ? with : best[i];
    }

    std::vector<Estimate> out;
    out.reserve(best[n].size);
    for (std::size_t i = n; i > 0;) {
        if (take[i - 1]) {
            out.push_back(sorted[i - 1]);
            i = compatible[i - 1];
        } else {
            --i;
        }
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::size_t argmax_index(const DerivativeProfile& profile) {
    if (profile.points.empty()) throw WindowError("derivative profile is empty");
    std::size_t best = 0;
    Count best_abs = std::abs(profile.points[0].value);
    for (std::size_t i = 1; i < profile.points.size(); ++i) {
        const Count a = std::abs(profile.points[i].value);
        if (a > best_abs) {
            best = i;
            best_abs = a;
        }
    }
    return best;
}

namespace {

DerivativeProfile profile_for(const CountingFunction& n, const DetectorConfig& config) {
    double hi = config.window_hi;
    if (config.horizon) {
        if (*config.horizon > n.horizon() * (1.0 + 1e-12) + 1e-12) {
            throw std::invalid_argument("detector horizon exceeds the observed horizon");
        }
        hi = std::min(hi, *config.horizon - config.delta);
    }
    return derivative_profile(n, config.order, config.delta, config.resolved_grid_step(),
                              config.window_lo, hi);
}

}  // namespace

ChangePointReport detect(const CountingFunction& n, const DetectorConfig& config) {
    config.validate();
    const auto profile = profile_for(n, config);

    ChangePointReport report;
    report.config = config;
    report.grid_lo = profile.window_lo;
    report.grid_hi = profile.window_hi;
    report.grid_step = profile.grid_step;
    report.grid_points = profile.points.size();
    report.empty_window = profile.empty_window;
    if (profile.points.empty()) return report;

    if (config.argmax_mode()) {
        const auto& p = profile.points[argmax_index(profile)];
        report.estimates.push_back(
            {p.time, std::abs(static_cast<double>(p.value)) / config.delta, p.value});
        report.candidate_count = 1;
        return report;
    }

    const auto candidates = threshold_candidates(profile, config.delta, *config.threshold);
    report.candidate_count = candidates.size();
    report.estimates =
        greedy_packing(candidates, 2.0 * static_cast<double>(config.order) * config.delta);
    return report;
}

double argmax_single(const CountingFunction& n, int order, double delta, double grid_step,
                     double t_lo, double t_hi) {
    const auto profile = derivative_profile(n, order, delta, grid_step, t_lo, t_hi);
    if (profile.points.empty()) {
        throw WindowError("no grid point in the valid window for order " + std::to_string(order) +
                          ", delta " + text::format_double(delta));
    }
    return profile.points[argmax_index(profile)].time;
}

double d_max(std::vector<double> s, std::vector<double> t) {
    if (s.size() != t.size()) {
        throw std::invalid_argument("d_max needs sets of equal size (" + std::to_string(s.size()) +
                                    " vs " + std::to_string(t.size()) + ")");
    }
    std::sort(s.begin(), s.end());
    std::sort(t.begin(), t.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(s[i] - t[i]));
    return worst;
}

double sep(std::vector<double> s) {
    if (s.size() < 2) return std::numeric_limits<double>::infinity();
    std::sort(s.begin(), s.end());
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < s.size(); ++i) gap = std::min(gap, s[i] - s[i - 1]);
    return gap;
}

double suggest_delta(double smoothness, int degree) {
    if (!(smoothness > 1.0) || !std::isfinite(smoothness)) {
        throw std::invalid_argument("smoothness scale must be greater than 1");
    }
    if (degree < 1) throw std::invalid_argument("polynomial degree must be at least 1");
    return std::pow(smoothness, -1.0 / (2.0 * degree + 1.0));
}

int min_order_for(double theta) {
    if (!std::isfinite(theta) || theta <= 0.5) {
        throw std::invalid_argument(
            "no finite order exists for theta <= 1/2: jumps below sqrt(smoothness) are "
            "undetectable");
    }
    auto ok = [theta](long l) {
        return static_cast<double>(l + 1) / static_cast<double>(2 * l + 1) < theta;
    };
    // (l+1)/(2l+1) < theta  <=>  l > (1-theta)/(2 theta-1); settle rounding by direct checks.
    const double bound = (1.0 - theta) / (2.0 * theta - 1.0);
    if (bound > 1e9) throw std::invalid_argument("theta too close to 1/2");
    long l = std::max(1L, static_cast<long>(std::floor(bound)) + 1);
    while (l > 1 && ok(l - 1)) --l;
    while (!ok(l)) ++l;
    return static_cast<int>(l);
}

std::string format_report_csv(const ChangePointReport& report) {
    std::string out = "t_hat,score\n";
    for (const auto& e : report.estimates) {
        out += text::format_double(e.time);
        out += ',';
        out += text::format_double(e.score);
        out += '\n';
    }
    return out;
}

std::string format_report_metadata(const ChangePointReport& report) {
    text::KeyValues kv;
    const auto& c = report.config;
    kv.set("order", static_cast<std::int64_t>(c.order));
    kv.set("delta", c.delta);
    kv.set("mode", c.argmax_mode() ? std::string("argmax-single") : std::string("threshold"));
    if (c.threshold) kv.set("threshold", *c.threshold);
    kv.set("grid_step", report.grid_step);
    kv.set("grid_lo", report.grid_lo);
    kv.set("grid_hi", report.grid_hi);
    kv.set("grid_points", static_cast<std::int64_t>(report.grid_points));
    kv.set("packing_min_sep", 2.0 * c.order * c.delta);
    kv.set("candidate_count", static_cast<std::int64_t>(report.candidate_count));
    kv.set("estimate_count", static_cast<std::int64_t>(report.estimates.size()));
    kv.set("empty_window", std::string(report.empty_window ? "true" : "false"));
    return kv.serialize();
}

}  // namespace abrupt
