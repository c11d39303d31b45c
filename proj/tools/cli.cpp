#include "cli.hpp"

#include "abrupt/detector.hpp"
#include "abrupt/error.hpp"
#include "abrupt/harness.hpp"
#include "abrupt/ingest.hpp"
#include "abrupt/multicascade.hpp"
#include "abrupt/parallel.hpp"
#include "abrupt/poisson_sim.hpp"
#include "abrupt/si_sim.hpp"
#include "abrupt/text_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>

namespace abrupt::cli {

namespace fs = std::filesystem;

namespace {

// Raised for flag combinations CLI11 cannot express; reported as a usage error.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

CLI::Validator positive(const std::string& what) {
    return CLI::Validator(
        [what](std::string& s) -> std::string {
            double v = 0.0;
            try {
                v = text::parse_double(s, what);
            } catch (const std::invalid_argument&) {
                return what + " must be a number";
            }
            return v > 0.0 && std::isfinite(v) ? std::string() : what + " must be positive";
        },
        "POSITIVE");
}

struct Common {
    std::string out_dir = "abrupt-out";
    std::uint64_t seed = 1;
    unsigned workers = 0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out_dir, "Output directory")
        ->envname(kOutDirEnv)
        ->capture_default_str();
    sub->add_option("--seed", c.seed, "Base random seed")->capture_default_str();
    sub->add_option("--workers", c.workers, "Worker threads (0 = all hardware threads)")
        ->capture_default_str();
}

struct InputOpts {
    std::string events;
    std::string binned;
    std::string trace;
    double horizon = -1.0;
};

void add_input(CLI::App* sub, InputOpts& in) {
    auto* e = sub->add_option("--events", in.events, "Event-times file (one time per line)");
    auto* b = sub->add_option("--binned", in.binned, "Binned counts CSV (bin_start,count)");
    auto* t = sub->add_option("--trace", in.trace, "Cascade trace CSV (vertex,time); analyzes I(t)");
    e->excludes(b)->excludes(t);
    b->excludes(t);
    sub->add_option("--horizon", in.horizon,
                    "Observation horizon T for --events, time units (-1 = from file or last event)")
        ->capture_default_str();
}

CountingFunction load_input(const InputOpts& in) {
    if (!in.events.empty()) return CountingFunction(read_event_times(in.events, in.horizon));
    if (!in.binned.empty()) return CountingFunction(from_binned(read_binned_csv(in.binned)));
    if (!in.trace.empty()) return CountingFunction(infection_count_process(read_trace_csv(in.trace)));
    throw UsageError("one of --events, --binned or --trace is required");
}

struct DetectOpts {
    int order = 2;
    double delta = 0.1;
    double threshold = 0.0;
    bool argmax = false;
    double grid_step = 0.0;
    double window_lo = 0.0;
    double window_hi = std::numeric_limits<double>::infinity();
};

void add_detector(CLI::App* sub, DetectOpts& d, bool with_threshold) {
    sub->add_option("--k", d.order, "Derivative order k (number of differences)")
        ->capture_default_str()
        ->check(CLI::Range(1, kMaxDerivativeOrder));
    sub->add_option("--delta", d.delta, "Discretization delta, time units")
        ->capture_default_str()
        ->check(positive("delta"));
    sub->add_option("--grid-step", d.grid_step,
                    "Evaluation grid spacing, time units (0 = delta/10)")
        ->capture_default_str();
    sub->add_option("--window-lo", d.window_lo, "Start of the evaluation window, time units")
        ->capture_default_str();
    sub->add_option("--window-hi", d.window_hi, "End of the evaluation window, time units")
        ->capture_default_str();
    if (with_threshold) {
        auto* t = sub->add_option("--threshold", d.threshold,
                                  "Jump size A in events per time unit; detects where |D^k N|/delta >= A/2")
                      ->check(positive("threshold"));
        auto* a = sub->add_flag("--argmax-single", d.argmax, "Return only the argmax (single change assumed)");
        t->excludes(a);
    }
}

DetectorConfig to_config(const DetectOpts& d, bool with_threshold, const CLI::App* sub) {
    DetectorConfig c;
    c.order = d.order;
    c.delta = d.delta;
    if (d.grid_step > 0.0) c.grid_step = d.grid_step;
    c.window_lo = d.window_lo;
    c.window_hi = d.window_hi;
    if (with_threshold) {
        const bool has_threshold = sub->count("--threshold") > 0;
        if (!has_threshold && !d.argmax) throw UsageError("one of --threshold or --argmax-single is required");
        if (has_threshold) c.threshold = d.threshold;
    }
    return c;
}

DerivativeProfile profile_of(const CountingFunction& n, const DetectorConfig& c) {
    return derivative_profile(n, c.order, c.delta, c.resolved_grid_step(), c.window_lo, c.window_hi);
}

struct Manifest {
    std::string subcommand;
    fs::path path;
    text::KeyValues resolved;
    std::vector<std::string> outputs;
};

void write_manifest(const CLI::App& sub, Manifest& m, double wall_seconds) {
    std::string body = "# abrupt " + std::string(kToolVersion) + " " + m.subcommand + "\n";
    body += "# rerun: abrupt --config <this file>\n";
    body += "# wall_seconds=" + text::format_double(wall_seconds) + "\n";
    for (const auto& o : m.outputs) body += "# output=" + o + "\n";
    for (const auto& [k, v] : m.resolved.entries()) body += "# resolved." + k + "=" + v + "\n";
    body += "[" + m.subcommand + "]\n";
    const std::string options = sub.config_to_str(true, false);
    for (auto line : text::split(options, '\n')) {
        // Unset values would not parse back; a false flag would still count as given.
        if (line.empty() || line.ends_with("=\"\"") || line.ends_with("=false")) continue;
        body += std::string(line) + "\n";
    }
    text::write_file(m.path, body);
}

std::vector<double> delta_range(const std::vector<double>& r) {
    if (r.size() != 3 || !(r[2] >= 1.0) || std::floor(r[2]) != r[2]) {
        throw UsageError("--delta-range takes LO HI COUNT");
    }
    return linspace(r[0], r[1], static_cast<std::size_t>(r[2]));
}

struct SpecOpts {
    std::string preset = "fig2-scaled";
    std::string scenario;
    int trials = 0;
    double baseline = 0.0;
    double jump = 0.0;
    double horizon = 0.0;
    double onset_lo = 0.0;
    double onset_hi = 0.0;
    int height = 0;
    std::size_t hub_degree = 0;
    Vertex source = 0;
    double infection_rate = 1.0;
    std::vector<int> orders;
    std::vector<double> deltas;
    std::vector<double> range;
    double grid_fraction = kDefaultGridFraction;
    double stream_bin_width = 0.0;
    double search_lo = 0.0;
    double search_hi = std::numeric_limits<double>::infinity();
};

void add_spec(CLI::App* sub, SpecOpts& s) {
    sub->add_option("--preset", s.preset, "Base parameter set: fig2-scaled, fig2-full, fig5")
        ->capture_default_str();
    sub->add_option("--scenario", s.scenario, "Override scenario: smooth-jump, si-tree, const-null, ramp");
    sub->add_option("--trials", s.trials, "Independent realizations per cell")->check(CLI::PositiveNumber);
    sub->add_option("--baseline", s.baseline, "Baseline rate scale B, events per time unit")
        ->check(positive("baseline"));
    sub->add_option("--jump", s.jump, "Jump size A, events per time unit")->check(positive("jump"));
    sub->add_option("--horizon", s.horizon, "Observation horizon T, time units")->check(positive("horizon"));
    sub->add_option("--onset-lo", s.onset_lo, "Lower end of the uniform change-time law, time units");
    sub->add_option("--onset-hi", s.onset_hi, "Upper end of the uniform change-time law, time units");
    sub->add_option("--height", s.height, "Binary tree height (si-tree)");
    sub->add_option("--hub-degree", s.hub_degree, "Extra leaves D on the hub (si-tree)");
    sub->add_option("--source", s.source, "Cascade source vertex (si-tree)");
    sub->add_option("--infection-rate", s.infection_rate, "Per-edge infection rate, per time unit")
        ->check(positive("infection rate"));
    sub->add_option("--orders", s.orders, "Derivative orders k, comma separated")->delimiter(',');
    auto* d = sub->add_option("--deltas", s.deltas, "Delta values, comma separated, time units")->delimiter(',');
    auto* r = sub->add_option("--delta-range", s.range, "Evenly spaced deltas: LO HI COUNT")->expected(3);
    d->excludes(r);
    sub->add_option("--grid-fraction", s.grid_fraction, "Argmax grid spacing as a fraction of delta")
        ->capture_default_str()
        ->check(positive("grid fraction"));
    sub->add_option("--stream-bin-width", s.stream_bin_width,
                    "Bin simulated events at this width, time units (0 = keep exact times)")
        ->capture_default_str();
    sub->add_option("--search-lo", s.search_lo, "Argmax search window start, time units")->capture_default_str();
    sub->add_option("--search-hi", s.search_hi, "Argmax search window end, time units")->capture_default_str();
}

ExperimentSpec resolve_spec(const SpecOpts& s, const CLI::App* sub, const Common& c) {
    ExperimentSpec spec;
    try {
        spec = experiment_preset(s.preset);
        if (!s.scenario.empty()) spec.scenario = parse_scenario(s.scenario);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    auto given = [sub](const char* name) { return sub->count(name) > 0; };
    if (given("--trials")) spec.trials = s.trials;
    if (given("--baseline")) spec.baseline = s.baseline;
    if (given("--jump")) spec.jump = s.jump;
    if (given("--horizon")) spec.horizon = s.horizon;
    if (given("--onset-lo")) spec.onset_lo = s.onset_lo;
    if (given("--onset-hi")) spec.onset_hi = s.onset_hi;
    if (given("--height")) spec.tree_height = s.height;
    if (given("--hub-degree")) spec.hub_degree = s.hub_degree;
    if (given("--source")) spec.source = s.source;
    if (given("--infection-rate")) spec.infection_rate = s.infection_rate;
    if (!s.orders.empty()) spec.orders = s.orders;
    if (!s.deltas.empty()) spec.deltas = s.deltas;
    if (!s.range.empty()) spec.deltas = delta_range(s.range);
    spec.grid_fraction = s.grid_fraction;
    if (s.stream_bin_width > 0.0) spec.stream_bin_width = s.stream_bin_width;
    if (given("--search-lo")) spec.search_lo = s.search_lo;
    if (given("--search-hi")) spec.search_hi = s.search_hi;
    spec.seed = c.seed;
    spec.workers = c.workers;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return spec;
}

std::string preset_config(std::string_view name) {
    if (name == "fig1") {
        return "# Smooth + jump process: B (1 + sin t) + A exp(-(t - 9)) 1(t >= 9), B = 1e6, A = 4e4.\n"
               "# Follow with: abrupt detect --events <out>/events.txt --argmax-single --delta 0.2 --k 1..4\n"
               "[simulate-poisson]\npreset=\"paper-sin-exp\"\nhorizon=20\nbin-width=0\nseed=1\n";
    }
    if (name == "fig4") {
        return "# SI cascade on a height-18 binary tree with a 3000-leaf hub.\n"
               "# Follow with: abrupt argmax --trace <out>/traces/trace_000.csv --delta 0.4 --k 1..3\n"
               "[simulate-si]\nheight=18\nhub-degree=3000\nsource=0\ncascades=1\nseed=1\n";
    }
    if (name == "sd-covid-style") {
        return "# Day-resolution analysis of a cumulative case table; set input and region.\n"
               "[analyze-binned]\ninput=\"cases.csv\"\nmode=\"cumulative\"\nk=3\ndelta-days=1\n";
    }
    const ExperimentSpec s = experiment_preset(name);
    text::KeyValues kv;
    describe_spec(s, kv);
    std::string out = "# (k, delta) heatmap preset " + std::string(name) + "\n[heatmap]\n";
    out += "preset=\"" + std::string(name) + "\"\n";
    out += "trials=" + std::to_string(s.trials) + "\n";
    for (const auto& [k, v] : kv.entries()) out += "# " + k + "=" + v + "\n";
    return out;
}

const std::vector<std::string> kPresetNames = {"fig1", "fig2-scaled", "fig2-full", "fig4", "fig5",
                                               "sd-covid-style"};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Abrupt-change detection in point processes via discrete derivatives", "abrupt"};
    app.set_config("--config", "", "Read options from an INI file (e.g. a run manifest)");
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1, 1);

    std::string module = "cli";
    Manifest manifest;
    std::function<void()> action;

    // simulate-poisson
    Common sp_common;
    std::string sp_preset = "paper-sin-exp";
    std::string sp_rate_file;
    double sp_horizon = 20.0;
    double sp_bin_width = 0.0;
    auto* sp = app.add_subcommand("simulate-poisson", "Simulate an inhomogeneous Poisson process by thinning");
    add_common(sp, sp_common);
    auto* sp_p = sp->add_option("--preset", sp_preset, "Named rate: paper-sin-exp, const-plus-exp")
                     ->capture_default_str()
                     ->check(CLI::IsMember({"paper-sin-exp", "const-plus-exp"}));
    sp->add_option("--rate-spec", sp_rate_file, "Rate-spec file (one component per line)")->excludes(sp_p);
    sp->add_option("--horizon", sp_horizon, "Horizon T, time units")->capture_default_str()->check(positive("horizon"));
    sp->add_option("--bin-width", sp_bin_width, "Write binned counts at this width, time units (0 = event times)")
        ->capture_default_str();

    // simulate-si
    Common si_common;
    int si_height = 18;
    std::size_t si_hub = 3000;
    Vertex si_source = 0;
    int si_cascades = 1;
    double si_rate = 1.0;
    std::string si_edges;
    bool si_write_graph = false;
    auto* si = app.add_subcommand("simulate-si", "Simulate SI cascades on the tree-with-hub or an edge list");
    add_common(si, si_common);
    si->add_option("--height", si_height, "Binary tree height")->capture_default_str();
    si->add_option("--hub-degree", si_hub, "Extra leaves D attached to the hub")->capture_default_str();
    si->add_option("--source", si_source, "Source vertex")->capture_default_str();
    si->add_option("--cascades", si_cascades, "Independent cascades (seed streams 0..K-1)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    si->add_option("--rate", si_rate, "Per-edge infection rate, per time unit")
        ->capture_default_str()
        ->check(positive("rate"));
    si->add_option("--edge-list", si_edges, "Use this graph instead of the tree (u v per line)");
    si->add_flag("--write-graph", si_write_graph, "Also write the graph as an edge list");

    // detect
    Common dt_common;
    InputOpts dt_in;
    DetectOpts dt_opts;
    bool dt_profile = false;
    auto* dt = app.add_subcommand("detect", "Threshold-and-pack change-point detection");
    add_common(dt, dt_common);
    add_input(dt, dt_in);
    add_detector(dt, dt_opts, true);
    dt->add_flag("--dump-profile", dt_profile, "Also write the derivative profile CSV (t,value)");

    // argmax
    Common am_common;
    InputOpts am_in;
    DetectOpts am_opts;
    bool am_profile = false;
    auto* am = app.add_subcommand("argmax", "Single-change estimate: argmax of |D^k N|");
    add_common(am, am_common);
    add_input(am, am_in);
    add_detector(am, am_opts, false);
    am->add_flag("--dump-profile", am_profile, "Also write the derivative profile CSV (t,value)");

    // heatmap / baselines
    Common hm_common;
    SpecOpts hm_spec;
    bool hm_long = false;
    auto* hm = app.add_subcommand("heatmap", "Mean estimation error over a (k, delta) grid");
    add_common(hm, hm_common);
    add_spec(hm, hm_spec);
    hm->add_flag("--long", hm_long, "Also write per-trial errors (k,delta,trial,error)");

    Common bl_common;
    SpecOpts bl_spec;
    auto* bl = app.add_subcommand("baselines", "Best first-, second- and higher-order errors");
    add_common(bl, bl_common);
    add_spec(bl, bl_spec);

    // multicascade
    Common mc_common;
    DetectOpts mc_opts;
    std::string mc_traces;
    int mc_height = 18;
    std::size_t mc_hub = 8000;
    Vertex mc_source = 0;
    int mc_cascades = 3;
    double mc_window = 0.0;
    auto* mc = app.add_subcommand("multicascade", "Intersect per-cascade candidates to find high-degree vertices");
    add_common(mc, mc_common);
    add_detector(mc, mc_opts, true);
    mc->add_option("--traces", mc_traces, "Directory of trace CSVs (default: simulate on the tree)");
    mc->add_option("--height", mc_height, "Tree height when simulating")->capture_default_str();
    mc->add_option("--hub-degree", mc_hub, "Hub extra leaves D when simulating")->capture_default_str();
    mc->add_option("--source", mc_source, "Source vertex when simulating")->capture_default_str();
    mc->add_option("--cascades", mc_cascades, "Cascades K when simulating")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    mc->add_option("--window", mc_window, "Proximity window w, time units (0 = k * delta)")->capture_default_str();

    // analyze-binned
    Common ab_common;
    std::string ab_input;
    std::string ab_mode = "daily";
    std::string ab_region;
    int ab_order = 2;
    int ab_delta_days = 1;
    double ab_tolerance = 0.05;
    auto* ab = app.add_subcommand("analyze-binned", "Day-resolution derivative analysis of a daily count table");
    add_common(ab, ab_common);
    ab->add_option("--input", ab_input, "CSV with date and cases columns (optional region)")->required();
    ab->add_option("--mode", ab_mode, "Interpretation of cases: daily or cumulative")
        ->capture_default_str()
        ->check(CLI::IsMember({"daily", "cumulative"}));
    ab->add_option("--region", ab_region, "Keep only rows of this region");
    ab->add_option("--k", ab_order, "Derivative order k")->capture_default_str()->check(CLI::Range(1, kMaxDerivativeOrder));
    ab->add_option("--delta-days", ab_delta_days, "Delta in whole days")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    ab->add_option("--tolerance", ab_tolerance, "Tolerated cumulative drop, fraction of the running total")
        ->capture_default_str();

    // presets
    Common pr_common;
    std::string pr_name;
    bool pr_write = false;
    auto* pr = app.add_subcommand("presets", "Print or write the named parameter sets as config files");
    add_common(pr, pr_common);
    pr->add_option("--name", pr_name, "fig1, fig2-scaled, fig2-full, fig4, fig5 or sd-covid-style");
    pr->add_flag("--write", pr_write, "Write <name>.ini files into --out instead of printing");

    for (auto* sub : app.get_subcommands({})) sub->configurable();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    const auto started = std::chrono::steady_clock::now();
    auto finish = [&](const Common& c, const CLI::App* sub) {
        manifest.subcommand = sub->get_name();
        manifest.resolved.set("seed", std::to_string(c.seed));
        manifest.resolved.set("workers", static_cast<std::int64_t>(resolve_workers(c.workers)));
        manifest.resolved.set("out", c.out_dir);
        manifest.path = fs::path(c.out_dir) / (sub->get_name() + ".manifest.ini");
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_manifest(*sub, manifest, wall);
        out << "manifest: " << manifest.path.string() << "\n";
    };
    auto emit = [&](const Common& c, const std::string& name, const std::string& contents) {
        const fs::path p = fs::path(c.out_dir) / name;
        text::write_file(p, contents);
        manifest.outputs.push_back(p.string());
    };

    try {
        if (sp->parsed()) {
            module = "poisson_sim";
            const RateSpec rate = sp_rate_file.empty() ? rate_preset(sp_preset) : read_rate_spec(sp_rate_file);
            const SimSeed seed{sp_common.seed, 0};
            if (sp_bin_width > 0.0) {
                const auto binned = simulate_binned(rate, sp_horizon, seed, sp_bin_width);
                emit(sp_common, "binned.csv", format_binned_csv(binned));
                out << "bins: " << binned.counts.size() << "\n";
            } else {
                const auto events = simulate(rate, sp_horizon, seed);
                emit(sp_common, "events.txt", format_event_times(events));
                manifest.resolved.set("event_count", static_cast<std::int64_t>(events.size()));
                manifest.resolved.set("checksum", std::to_string(events.checksum()));
                out << "events: " << events.size() << "\n";
            }
            emit(sp_common, "rate.txt", format_rate_spec(rate));
            finish(sp_common, sp);
        } else if (si->parsed()) {
            module = "si_sim";
            const Graph g = si_edges.empty() ? build_tree_with_hub(si_height, si_hub) : read_edge_list(si_edges);
            if (si_source >= g.size()) throw UsageError("--source is not a vertex of the graph");
            std::vector<CascadeTrace> traces(static_cast<std::size_t>(si_cascades));
            parallel_for(traces.size(), si_common.workers, [&](std::size_t i) {
                traces[i] = simulate_si(g, si_source, {si_common.seed, i}, si_rate);
            });
            manifest.resolved.set("vertices", static_cast<std::int64_t>(g.size()));
            manifest.resolved.set("edges", static_cast<std::int64_t>(g.edge_count()));
            if (g.hub()) {
                manifest.resolved.set("hub", static_cast<std::int64_t>(*g.hub()));
                manifest.resolved.set("hub_degree", static_cast<std::int64_t>(g.degree(*g.hub())));
            }
            for (std::size_t i = 0; i < traces.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "traces/trace_%03zu.csv", i);
                emit(si_common, name, format_trace_csv(traces[i]));
                if (g.hub()) {
                    const double t = traces[i].infection_time[*g.hub()];
                    manifest.resolved.set("hub_time." + std::to_string(i), t);
                    out << "cascade " << i << ": hub " << *g.hub() << " infected at " << text::format_double(t) << "\n";
                }
            }
            if (si_write_graph) emit(si_common, "graph.txt", format_edge_list(g));
            finish(si_common, si);
        } else if (dt->parsed()) {
            module = "detector";
            const DetectorConfig config = to_config(dt_opts, true, dt);
            const CountingFunction n = load_input(dt_in);
            const auto report = detect(n, config);
            emit(dt_common, "report.csv", format_report_csv(report));
            emit(dt_common, "report.meta", format_report_metadata(report));
            if (dt_profile) emit(dt_common, "profile.csv", format_profile_csv(profile_of(n, config)));
            out << "estimates: " << report.estimates.size() << "\n";
            for (const auto& e : report.estimates) out << text::format_double(e.time) << "\n";
            finish(dt_common, dt);
        } else if (am->parsed()) {
            module = "detector";
            const DetectorConfig config = to_config(am_opts, false, am);
            config.validate();
            const CountingFunction n = load_input(am_in);
            const auto report = detect(n, config);
            if (report.estimates.empty()) {
                throw WindowError("no grid point in the valid evaluation window");
            }
            const auto& best = report.estimates.front();
            emit(am_common, "argmax.txt",
                 "t_hat=" + text::format_double(best.time) + "\nscore=" + text::format_double(best.score) + "\n");
            if (am_profile) emit(am_common, "profile.csv", format_profile_csv(profile_of(n, config)));
            out << "t_hat: " << text::format_double(best.time) << "\n";
            finish(am_common, am);
        } else if (hm->parsed()) {
            module = "harness";
            const ExperimentSpec spec = resolve_spec(hm_spec, hm, hm_common);
            describe_spec(spec, manifest.resolved);
            const auto result = run_heatmap(spec);
            emit(hm_common, "heatmap.csv", format_heatmap_csv(result));
            emit(hm_common, "heatmap.meta", format_heatmap_metadata(result, false));
            if (hm_long) emit(hm_common, "heatmap_long.csv", format_heatmap_long_csv(result));
            const auto best = result.argmin();
            out << "argmin: k=" << best.order << " delta=" << text::format_double(best.delta)
                << " error=" << text::format_double(best.error) << "\n";
            finish(hm_common, hm);
        } else if (bl->parsed()) {
            module = "harness";
            const ExperimentSpec spec = resolve_spec(bl_spec, bl, bl_common);
            describe_spec(spec, manifest.resolved);
            const auto summary = run_baselines(spec);
            const auto text = format_baselines(summary);
            emit(bl_common, "baselines.txt", text);
            out << text;
            finish(bl_common, bl);
        } else if (mc->parsed()) {
            module = "multicascade";
            MulticascadeConfig config;
            config.detector = to_config(mc_opts, true, mc);
            if (mc_window > 0.0) config.window = mc_window;
            config.workers = mc_common.workers;
            CascadeBundle bundle;
            std::optional<Vertex> hub;
            if (!mc_traces.empty()) {
                bundle = read_trace_directory(mc_traces);
            } else {
                module = "si_sim";
                const Graph g = build_tree_with_hub(mc_height, mc_hub);
                if (mc_source >= g.size()) throw UsageError("--source is not a vertex of the graph");
                hub = g.hub();
                bundle.traces.resize(static_cast<std::size_t>(mc_cascades));
                parallel_for(bundle.traces.size(), mc_common.workers, [&](std::size_t i) {
                    bundle.traces[i] = simulate_si(g, mc_source, {mc_common.seed, i});
                });
                module = "multicascade";
            }
            const auto estimate = estimate_high_degree(bundle, config);
            emit(mc_common, "high_degree.txt", format_vertex_list(estimate.vertices));
            emit(mc_common, "provenance.txt", format_provenance(estimate, bundle));
            out << "vertices: " << estimate.vertices.size() << "\n" << format_vertex_list(estimate.vertices);
            if (hub) {
                const bool found = std::binary_search(estimate.vertices.begin(), estimate.vertices.end(), *hub);
                manifest.resolved.set("hub", static_cast<std::int64_t>(*hub));
                manifest.resolved.set("hub_found", std::string(found ? "true" : "false"));
                out << "hub " << *hub << (found ? " found" : " missed") << "\n";
            }
            finish(mc_common, mc);
        } else if (ab->parsed()) {
            module = "ingest";
            IngestOptions options;
            options.mode = parse_count_mode(ab_mode);
            if (!ab_region.empty()) options.region = ab_region;
            options.cumulative_tolerance = ab_tolerance;
            const auto series = load_daily_csv(ab_input, options);
            for (const auto& line : series.audit) err << "ingest: " << line << "\n";
            const auto analysis = analyze_binned(series, ab_order, ab_delta_days);
            emit(ab_common, "profile.csv", format_binned_profile_csv(analysis, series));
            const auto summary = format_binned_summary(analysis, series);
            emit(ab_common, "summary.txt", summary);
            manifest.resolved.set("days", static_cast<std::int64_t>(series.size()));
            manifest.resolved.set("filled_days", static_cast<std::int64_t>(series.filled_days.size()));
            out << summary;
            finish(ab_common, ab);
        } else if (pr->parsed()) {
            module = "harness";
            std::vector<std::string> names = kPresetNames;
            if (!pr_name.empty()) {
                if (std::find(names.begin(), names.end(), pr_name) == names.end()) {
                    throw UsageError("unknown preset '" + pr_name + "'");
                }
                names = {pr_name};
            }
            for (const auto& name : names) {
                if (pr_write) {
                    emit(pr_common, name + ".ini", preset_config(name));
                } else {
                    out << "## " << name << "\n" << preset_config(name) << "\n";
                }
            }
            if (pr_write) finish(pr_common, pr);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n" << "Run with --help for more information.\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error [" << module << "]: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kOk;
}

}  // namespace abrupt::cli
