#pragma once

// Change-point estimation from a derivative profile: threshold the scaled
// derivative |D^(k) N(t)| / delta at A/2, then keep a maximum-size packing of
// the super-threshold times with pairwise gaps > 2 k delta. With a single
// change assumed, the argmax of the same statistic replaces both steps.

#include "abrupt/derivative.hpp"
#include "abrupt/process.hpp"

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace abrupt {

struct DetectorConfig {
    // Number of derivatives taken (k = l + 1 for a degree-l counterfactual).
    int order = 2;
    double delta = 0.1;
    // Jump size A; nullopt selects argmax-single mode.
    std::optional<double> threshold;
    // Defaults to delta * kDefaultGridFraction when unset.
    std::optional<double> grid_step;
    // Horizon T of the analysis; defaults to the counting function's horizon.
    std::optional<double> horizon;
    // Optional restriction of the evaluation window (still clipped to the valid range).
    double window_lo = 0.0;
    double window_hi = std::numeric_limits<double>::infinity();

    double resolved_grid_step() const { return grid_step.value_or(delta * kDefaultGridFraction); }
    bool argmax_mode() const { return !threshold.has_value(); }
    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct Estimate {
    double time;
    // |D^(k) N(t)| / delta, in rate units.
    double score;
    Count raw;
};

struct ChangePointReport {
    DetectorConfig config;
    std::vector<Estimate> estimates;
    std::size_t candidate_count = 0;
    double grid_lo = 0.0;
    double grid_hi = 0.0;
    double grid_step = 0.0;
    std::size_t grid_points = 0;
    bool empty_window = false;

    std::vector<double> times() const;
};

// Grid points with |value| / delta >= A / 2, ascending in time.
std::vector<Estimate> threshold_candidates(const DerivativeProfile& profile, double delta,
                                           double threshold);

// Maximum-cardinality subset of time-sorted candidates with pairwise gaps
// strictly greater than min_sep; among maximum packings the one with the
// largest total score is returned. Output is sorted by time.
std::vector<Estimate> greedy_packing(std::span<const Estimate> candidates, double min_sep);

ChangePointReport detect(const CountingFunction& n, const DetectorConfig& config);

// Grid time maximizing |D^(k) N(t)|; ties go to the earliest time.
// Throws WindowError when the valid window holds no grid point.
double argmax_single(const CountingFunction& n, int order, double delta, double grid_step,
                     double t_lo = 0.0,
                     double t_hi = std::numeric_limits<double>::infinity());

// Index of the max-|value| point of a nonempty profile (earliest on ties).
std::size_t argmax_index(const DerivativeProfile& profile);

// Largest gap between order-matched elements; 0 for two empty sets.
// Throws std::invalid_argument when the sizes differ.
double d_max(std::vector<double> s, std::vector<double> t);

// Minimum pairwise gap; +infinity for fewer than two points.
double sep(std::vector<double> s);

// Window width S^(-1/(2l+1)) for smoothness scale S > 1.
double suggest_delta(double smoothness, int degree);

// Smallest l >= 1 with (l+1)/(2l+1) < theta, for 1/2 < theta < 1.
int min_order_for(double theta);

// CSV `t_hat,score` and a key=value sidecar describing the run.
std::string format_report_csv(const ChangePointReport& report);
std::string format_report_metadata(const ChangePointReport& report);

}  // namespace abrupt
