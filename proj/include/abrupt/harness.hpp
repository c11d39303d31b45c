#pragma once

// Monte Carlo experiments over (k, delta) grids. One process is realized per
// trial and analyzed under every grid cell, so cells within a trial share
// their randomness; trials run on a worker pool and are merged by index.

#include "abrupt/detector.hpp"
#include "abrupt/poisson_sim.hpp"
#include "abrupt/si_sim.hpp"
#include "abrupt/text_io.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abrupt {

enum class Scenario {
    SmoothJump,  // B (1 + sin t) + A exp(-(t - t0)) 1(t >= t0), t0 ~ U[onset_lo, onset_hi]
    SiTree,      // SI cascade on the tree-with-hub; truth is the hub's infection time
    ConstNull,   // constant rate B, no jump; truth drawn uniformly as for SmoothJump
    Ramp,        // noiseless N(t) = floor(B t + A (t - t0)+)
};

std::string_view scenario_name(Scenario s);
Scenario parse_scenario(std::string_view name);

struct ExperimentSpec {
    Scenario scenario = Scenario::SmoothJump;
    double baseline = 1e4;     // B
    double jump = 8e3;         // A
    double horizon = 20.0;     // T (Poisson scenarios)
    double onset_lo = 5.0;
    double onset_hi = 15.0;
    int tree_height = 18;
    std::size_t hub_degree = 8000;  // D
    Vertex source = 0;
    double infection_rate = 1.0;
    std::vector<int> orders;
    std::vector<double> deltas;
    int trials = 1;
    std::uint64_t seed = 1;
    double grid_fraction = kDefaultGridFraction;
    // Bin Poisson events on the fly at this width instead of keeping every time.
    std::optional<double> stream_bin_width;
    // Argmax search window, clipped per cell to the stencil's valid range.
    double search_lo = 0.0;
    double search_hi = std::numeric_limits<double>::infinity();
    unsigned workers = 0;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// One realized process with its ground truth.
struct Realization {
    CountingFunction counts;
    double truth = 0.0;
    std::uint64_t checksum = 0;
};

// Per-spec state reused across trials (the benchmark graph for SiTree).
class ScenarioContext {
public:
    explicit ScenarioContext(const ExperimentSpec& spec);
    const ExperimentSpec& spec() const { return spec_; }
    const Graph* graph() const { return graph_.get(); }
    // Deterministic in (spec.seed, trial).
    Realization realize(int trial) const;

private:
    ExperimentSpec spec_;
    std::shared_ptr<const Graph> graph_;
};

// |argmax_single - truth| for one cell. Throws WindowError on an empty window.
double trial_error(const Realization& r, const ExperimentSpec& spec, int order, double delta);
// Realizes trial `trial` of the spec and scores one cell.
double run_trial(const ExperimentSpec& spec, int order, double delta, int trial);

struct CellDiagnostic {
    int order;
    double delta;
    int trial;
    std::string message;
};

struct HeatmapResult {
    ExperimentSpec spec;
    // [order index][delta index]; NaN for a cell with any failed trial.
    std::vector<std::vector<double>> mean_error;
    std::vector<std::vector<int>> trial_count;
    // [trial][order index][delta index]
    std::vector<std::vector<std::vector<double>>> trial_errors;
    std::vector<std::uint64_t> checksums;
    std::vector<double> truths;
    std::vector<CellDiagnostic> diagnostics;
    double wall_seconds = 0.0;

    struct Cell {
        int order = 0;
        double delta = 0.0;
        double error = std::numeric_limits<double>::quiet_NaN();
    };
    // Smallest finite mean; ties go to the lower order, then the smaller delta.
    Cell argmin() const;
    // Same, restricted to the given orders.
    Cell argmin_over(std::span<const int> orders) const;
};

HeatmapResult run_heatmap(const ExperimentSpec& spec);

struct BaselineSummary {
    HeatmapResult::Cell first;   // best delta for k = 1
    HeatmapResult::Cell second;  // best delta for k = 2
    HeatmapResult::Cell higher;  // best cell with k >= 3
};

BaselineSummary summarize_baselines(const HeatmapResult& heatmap);
// Heatmap over orders {1, 2} plus the spec's orders >= 3.
BaselineSummary run_baselines(const ExperimentSpec& spec);

struct FalseAlarmResult {
    int runs = 0;
    int silent_runs = 0;  // detector returned no estimate
    std::vector<std::size_t> estimate_counts;
};

// Thresholded detection on `runs` realizations of the spec's scenario.
FalseAlarmResult run_false_alarm_study(const ExperimentSpec& spec, const DetectorConfig& detector,
                                       int runs);

// Heatmap presets: fig2-scaled, fig2-full, fig5.
std::vector<std::string> experiment_preset_names();
ExperimentSpec experiment_preset(std::string_view name);

// n evenly spaced values from lo to hi inclusive, rounded to 1e-12.
std::vector<double> linspace(double lo, double hi, std::size_t n);

// CSV matrix: header `k\delta,<deltas...>`, one row per order.
std::string format_heatmap_csv(const HeatmapResult& result);
// `k,delta,trial,error`
std::string format_heatmap_long_csv(const HeatmapResult& result);
// key=value; wall time is emitted only when include_timing is set so that the
// remaining output is byte-reproducible.
std::string format_heatmap_metadata(const HeatmapResult& result, bool include_timing);
std::string format_baselines(const BaselineSummary& summary);
// key=value echo of every spec field.
void describe_spec(const ExperimentSpec& spec, text::KeyValues& out);

}  // namespace abrupt
