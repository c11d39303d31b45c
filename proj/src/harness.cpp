#include "abrupt/harness.hpp"

#include "abrupt/error.hpp"
#include "abrupt/parallel.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace abrupt {

namespace {

constexpr std::uint64_t kTruthStream = 0x7472757468ULL;
constexpr std::uint64_t kProcessStream = 0x70726f63ULL;

std::uint64_t fnv_counts(std::span<const Count> values, double horizon) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t word) {
        for (int b = 0; b < 8; ++b) {
            h ^= (word >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    for (Count c : values) mix(static_cast<std::uint64_t>(c));
    mix(std::bit_cast<std::uint64_t>(horizon));
    return h;
}

EventTimes ramp_events(double baseline, double jump, double onset, double horizon) {
    const double total = baseline * horizon + jump * std::max(0.0, horizon - onset);
    const auto n = static_cast<std::int64_t>(std::floor(total));
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(n));
    const double before = baseline * onset;
    for (std::int64_t i = 1; i <= n; ++i) {
        const auto y = static_cast<double>(i);
        const double t = y <= before ? y / baseline : onset + (y - before) / (baseline + jump);
        times.push_back(std::min(t, horizon));
    }
    return EventTimes(std::move(times), horizon);
}

void check(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

std::string_view scenario_name(Scenario s) {
    switch (s) {
        case Scenario::SmoothJump: return "smooth-jump";
        case Scenario::SiTree: return "si-tree";
        case Scenario::ConstNull: return "const-null";
        case Scenario::Ramp: return "ramp";
    }
    return "?";
}

Scenario parse_scenario(std::string_view name) {
    for (auto s : {Scenario::SmoothJump, Scenario::SiTree, Scenario::ConstNull, Scenario::Ramp}) {
        if (scenario_name(s) == name) return s;
    }
    throw std::invalid_argument("unknown scenario '" + std::string(name) +
                                "' (known: smooth-jump, si-tree, const-null, ramp)");
}

void ExperimentSpec::validate() const {
    check(!orders.empty(), "order grid is empty");
    check(!deltas.empty(), "delta grid is empty");
    for (int k : orders) check(k >= 1 && k <= kMaxDerivativeOrder, "orders must be in [1, 20]");
    for (double d : deltas) check(d > 0.0 && std::isfinite(d), "delta must be positive");
    check(trials >= 1, "trials must be at least 1");
    check(grid_fraction > 0.0 && std::isfinite(grid_fraction), "grid fraction must be positive");
    check(search_lo < search_hi, "search window is empty");
    if (stream_bin_width) check(*stream_bin_width > 0.0, "stream bin width must be positive");
    if (scenario == Scenario::SiTree) {
        check(tree_height >= 2 && tree_height <= 28, "tree height must be in [2, 28]");
        check(infection_rate > 0.0, "infection rate must be positive");
        return;
    }
    check(baseline > 0.0 && std::isfinite(baseline), "baseline B must be positive");
    check(horizon > 0.0 && std::isfinite(horizon), "horizon must be positive");
    check(onset_lo <= onset_hi, "onset interval is reversed");
    check(onset_lo > 0.0 && onset_hi < horizon, "onset interval must lie strictly inside (0, horizon)");
    if (scenario != Scenario::ConstNull) check(jump > 0.0 && std::isfinite(jump), "jump A must be positive");
}

ScenarioContext::ScenarioContext(const ExperimentSpec& spec) : spec_(spec) {
    spec_.validate();
    if (spec_.scenario == Scenario::SiTree) {
        graph_ = std::make_shared<const Graph>(build_tree_with_hub(spec_.tree_height, spec_.hub_degree));
        if (spec_.source >= graph_->size()) throw std::invalid_argument("source vertex out of range");
    }
}

Realization ScenarioContext::realize(int trial) const {
    const auto t = static_cast<std::uint64_t>(trial);
    const SimSeed process_seed{mix_seed(spec_.seed, kProcessStream), t};
    Realization r;
    if (spec_.scenario == Scenario::SiTree) {
        const auto trace = simulate_si(*graph_, spec_.source, process_seed, spec_.infection_rate);
        r.truth = trace.infection_time[*graph_->hub()];
        EventTimes events = infection_count_process(trace);
        r.checksum = events.checksum();
        r.counts = CountingFunction(std::move(events));
        return r;
    }

    Engine truth_engine = make_engine({mix_seed(spec_.seed, kTruthStream), t});
    r.truth = std::uniform_real_distribution<double>(spec_.onset_lo, spec_.onset_hi)(truth_engine);
    if (spec_.scenario == Scenario::Ramp) {
        EventTimes events = ramp_events(spec_.baseline, spec_.jump, r.truth, spec_.horizon);
        r.checksum = events.checksum();
        r.counts = CountingFunction(std::move(events));
        return r;
    }
    const RateSpec rate = spec_.scenario == Scenario::ConstNull
                              ? RateSpec({{spec_.baseline, 0.0, SmoothShape::constant()}})
                              : sin_plus_exp_rate(spec_.baseline, spec_.jump, r.truth);
    if (spec_.stream_bin_width) {
        const auto binned = simulate_binned(rate, spec_.horizon, process_seed, *spec_.stream_bin_width);
        StepCounts steps = from_binned(binned);
        r.checksum = fnv_counts(steps.cumulative(), spec_.horizon);
        r.counts = CountingFunction(std::move(steps));
    } else {
        EventTimes events = simulate(rate, spec_.horizon, process_seed);
        r.checksum = events.checksum();
        r.counts = CountingFunction(std::move(events));
    }
    return r;
}

double trial_error(const Realization& r, const ExperimentSpec& spec, int order, double delta) {
    const double t_hat = argmax_single(r.counts, order, delta, delta * spec.grid_fraction,
                                       spec.search_lo, spec.search_hi);
    return std::abs(t_hat - r.truth);
}

double run_trial(const ExperimentSpec& spec, int order, double delta, int trial) {
    const ScenarioContext context(spec);
    return trial_error(context.realize(trial), spec, order, delta);
}

HeatmapResult::Cell HeatmapResult::argmin_over(std::span<const int> wanted) const {
    Cell best;
    for (std::size_t i = 0; i < spec.orders.size(); ++i) {
        if (std::find(wanted.begin(), wanted.end(), spec.orders[i]) == wanted.end()) continue;
        for (std::size_t j = 0; j < spec.deltas.size(); ++j) {
            const double e = mean_error[i][j];
            if (std::isnan(e)) continue;
            if (std::isnan(best.error) || e < best.error) best = {spec.orders[i], spec.deltas[j], e};
        }
    }
    return best;
}

HeatmapResult::Cell HeatmapResult::argmin() const { return argmin_over(spec.orders); }

HeatmapResult run_heatmap(const ExperimentSpec& spec) {
    const auto started = std::chrono::steady_clock::now();
    const ScenarioContext context(spec);
    const std::size_t nk = spec.orders.size();
    const std::size_t nd = spec.deltas.size();
    const auto trials = static_cast<std::size_t>(spec.trials);
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

    HeatmapResult result;
    result.spec = spec;
    result.trial_errors.assign(trials, std::vector<std::vector<double>>(nk, std::vector<double>(nd, kNaN)));
    result.checksums.assign(trials, 0);
    result.truths.assign(trials, kNaN);
    std::vector<std::vector<CellDiagnostic>> trial_diagnostics(trials);

    parallel_for(trials, spec.workers, [&](std::size_t trial) {
        const int t = static_cast<int>(trial);
        Realization r;
        try {
            r = context.realize(t);
        } catch (const std::exception& e) {
            trial_diagnostics[trial].push_back({0, 0.0, t, std::string("simulation failed: ") + e.what()});
            return;
        }
        result.checksums[trial] = r.checksum;
        result.truths[trial] = r.truth;
        for (std::size_t i = 0; i < nk; ++i) {
            for (std::size_t j = 0; j < nd; ++j) {
                try {
                    result.trial_errors[trial][i][j] = trial_error(r, spec, spec.orders[i], spec.deltas[j]);
                } catch (const std::exception& e) {
                    trial_diagnostics[trial].push_back({spec.orders[i], spec.deltas[j], t, e.what()});
                }
            }
        }
    });

    for (auto& d : trial_diagnostics) {
        for (auto& item : d) result.diagnostics.push_back(std::move(item));
    }
    result.mean_error.assign(nk, std::vector<double>(nd, kNaN));
    result.trial_count.assign(nk, std::vector<int>(nd, 0));
    for (std::size_t i = 0; i < nk; ++i) {
        for (std::size_t j = 0; j < nd; ++j) {
            double sum = 0.0;
            int finite = 0;
            for (std::size_t trial = 0; trial < trials; ++trial) {
                const double e = result.trial_errors[trial][i][j];
                if (std::isnan(e)) continue;
                sum += e;
                ++finite;
            }
            result.trial_count[i][j] = finite;
            if (finite == spec.trials) result.mean_error[i][j] = sum / finite;
        }
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

BaselineSummary summarize_baselines(const HeatmapResult& heatmap) {
    BaselineSummary s;
    const int first[] = {1};
    const int second[] = {2};
    std::vector<int> higher;
    for (int k : heatmap.spec.orders) {
        if (k >= 3) higher.push_back(k);
    }
    s.first = heatmap.argmin_over(first);
    s.second = heatmap.argmin_over(second);
    s.higher = heatmap.argmin_over(higher);
    return s;
}

BaselineSummary run_baselines(const ExperimentSpec& spec) {
    ExperimentSpec full = spec;
    std::vector<int> orders{1, 2};
    for (int k : spec.orders) {
        if (k >= 3 && std::find(orders.begin(), orders.end(), k) == orders.end()) orders.push_back(k);
    }
    std::sort(orders.begin(), orders.end());
    full.orders = orders;
    return summarize_baselines(run_heatmap(full));
}

FalseAlarmResult run_false_alarm_study(const ExperimentSpec& spec, const DetectorConfig& detector,
                                       int runs) {
    if (runs < 1) throw std::invalid_argument("runs must be at least 1");
    detector.validate();
    if (detector.argmax_mode()) throw std::invalid_argument("false-alarm study needs a threshold");
    const ScenarioContext context(spec);
    FalseAlarmResult result;
    result.runs = runs;
    result.estimate_counts.assign(static_cast<std::size_t>(runs), 0);
    parallel_for(static_cast<std::size_t>(runs), spec.workers, [&](std::size_t i) {
        const auto r = context.realize(static_cast<int>(i));
        result.estimate_counts[i] = detect(r.counts, detector).estimates.size();
    });
    result.silent_runs = static_cast<int>(
        std::count(result.estimate_counts.begin(), result.estimate_counts.end(), std::size_t{0}));
    return result;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = std::round(v * 1e12) / 1e12;
    }
    return out;
}

std::vector<std::string> experiment_preset_names() { return {"fig2-scaled", "fig2-full", "fig5"}; }

ExperimentSpec experiment_preset(std::string_view name) {
    ExperimentSpec s;
    if (name == "fig2-scaled" || name == "fig2-full") {
        s.scenario = Scenario::SmoothJump;
        const bool full = name == "fig2-full";
        s.baseline = full ? 1e6 : 1e4;
        s.jump = full ? 8e4 : 8e3;
        if (full) s.stream_bin_width = 1e-4;
        s.horizon = 20.0;
        s.onset_lo = 5.0;
        s.onset_hi = 15.0;
        s.orders = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        s.deltas = linspace(0.05, 0.5, 24);
        s.trials = 100;
        return s;
    }
    if (name == "fig5") {
        s.scenario = Scenario::SiTree;
        s.tree_height = 18;
        s.hub_degree = 8000;
        s.source = 0;
        s.orders = {1, 2, 3, 4, 5, 6};
        s.deltas = linspace(0.1, 2.0, 20);
        s.trials = 200;
        return s;
    }
    throw std::invalid_argument("unknown experiment preset '" + std::string(name) +
                                "' (known: fig2-scaled, fig2-full, fig5)");
}

std::string format_heatmap_csv(const HeatmapResult& result) {
    std::string out = "k\\delta";
    for (double d : result.spec.deltas) out += ',' + text::format_double(d);
    out += '\n';
    for (std::size_t i = 0; i < result.spec.orders.size(); ++i) {
        out += std::to_string(result.spec.orders[i]);
        for (double e : result.mean_error[i]) out += ',' + (std::isnan(e) ? std::string("nan") : text::format_double(e));
        out += '\n';
    }
    return out;
}

std::string format_heatmap_long_csv(const HeatmapResult& result) {
    std::string out = "k,delta,trial,error\n";
    for (std::size_t i = 0; i < result.spec.orders.size(); ++i) {
        for (std::size_t j = 0; j < result.spec.deltas.size(); ++j) {
            for (std::size_t t = 0; t < result.trial_errors.size(); ++t) {
                const double e = result.trial_errors[t][i][j];
                out += std::to_string(result.spec.orders[i]) + ',' + text::format_double(result.spec.deltas[j]) +
                       ',' + std::to_string(t) + ',' + (std::isnan(e) ? std::string("nan") : text::format_double(e)) +
                       '\n';
            }
        }
    }
    return out;
}

void describe_spec(const ExperimentSpec& spec, text::KeyValues& out) {
    auto join_ints = [](const std::vector<int>& v) {
        std::string s;
        for (int x : v) s += (s.empty() ? "" : ";") + std::to_string(x);
        return s;
    };
    auto join_doubles = [](const std::vector<double>& v) {
        std::string s;
        for (double x : v) s += (s.empty() ? "" : ";") + text::format_double(x);
        return s;
    };
    out.set("scenario", std::string(scenario_name(spec.scenario)));
    if (spec.scenario == Scenario::SiTree) {
        out.set("tree_height", static_cast<std::int64_t>(spec.tree_height));
        out.set("hub_degree", static_cast<std::int64_t>(spec.hub_degree));
        out.set("source", static_cast<std::int64_t>(spec.source));
        out.set("infection_rate", spec.infection_rate);
    } else {
        out.set("baseline", spec.baseline);
        out.set("jump", spec.jump);
        out.set("horizon", spec.horizon);
        out.set("onset_lo", spec.onset_lo);
        out.set("onset_hi", spec.onset_hi);
        out.set("stream_bin_width", spec.stream_bin_width ? text::format_double(*spec.stream_bin_width)
                                                          : std::string("none"));
    }
    out.set("orders", join_ints(spec.orders));
    out.set("deltas", join_doubles(spec.deltas));
    out.set("trials", static_cast<std::int64_t>(spec.trials));
    out.set("seed", std::to_string(spec.seed));
    out.set("grid_fraction", spec.grid_fraction);
    out.set("search_lo", spec.search_lo);
    out.set("search_hi", spec.search_hi);
}

std::string format_heatmap_metadata(const HeatmapResult& result, bool include_timing) {
    text::KeyValues kv;
    describe_spec(result.spec, kv);
    const auto best = result.argmin();
    kv.set("argmin_k", static_cast<std::int64_t>(best.order));
    kv.set("argmin_delta", best.delta);
    kv.set("argmin_error", best.error);
    kv.set("failed_cells", static_cast<std::int64_t>(result.diagnostics.size()));
    for (std::size_t i = 0; i < result.diagnostics.size(); ++i) {
        const auto& d = result.diagnostics[i];
        kv.set("diagnostic." + std::to_string(i), "k=" + std::to_string(d.order) + " delta=" +
                                                      text::format_double(d.delta) + " trial=" +
                                                      std::to_string(d.trial) + ": " + d.message);
    }
    for (std::size_t t = 0; t < result.checksums.size(); ++t) {
        kv.set("trial." + std::to_string(t) + ".checksum", std::to_string(result.checksums[t]));
        kv.set("trial." + std::to_string(t) + ".truth", result.truths[t]);
    }
    if (include_timing) kv.set("wall_seconds", result.wall_seconds);
    return kv.serialize();
}

std::string format_baselines(const BaselineSummary& s) {
    text::KeyValues kv;
    auto put = [&kv](const std::string& name, const HeatmapResult::Cell& c) {
        kv.set(name + ".k", static_cast<std::int64_t>(c.order));
        kv.set(name + ".delta", c.delta);
        kv.set(name + ".error", c.error);
    };
    put("first_derivative", s.first);
    put("second_derivative", s.second);
    put("higher_order", s.higher);
    return kv.serialize();
}

}  // namespace abrupt
