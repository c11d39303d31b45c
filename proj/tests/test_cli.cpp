#include "cli.hpp"

#include "abrupt/text_io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace fs = std::filesystem;
using abrupt::text::read_file;
using abrupt::text::write_file;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "abrupt");
    std::ostringstream out, err;
    const int code = abrupt::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("abrupt_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// 300 background events on [0, 10] plus a burst of 200 at 6.
fs::path write_events(const fs::path& dir) {
    std::string text = "# horizon=10\n";
    std::vector<double> t;
    for (int i = 1; i <= 300; ++i) t.push_back(i / 30.0 - 1e-6);
    for (int i = 0; i < 200; ++i) t.push_back(6.0 + i * 1e-4);
    std::sort(t.begin(), t.end());
    for (double x : t) text += abrupt::text::format_double(x) + "\n";
    const auto p = dir / "events.txt";
    write_file(p, text);
    return p;
}

}  // namespace

TEST_CASE("detect happy path writes the report and a manifest") {
    const auto dir = fresh_dir("detect");
    const auto events = write_events(dir);
    const auto r = run({"detect", "--events", events.string(), "--k", "2", "--delta", "0.2", "--threshold", "500",
                        "--out", (dir / "out").string(), "--dump-profile"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("estimates: 1") != std::string::npos);
    const auto report = read_file(dir / "out" / "report.csv");
    CHECK(report.rfind("t_hat,score\n", 0) == 0);
    const double t_hat = std::stod(report.substr(report.find('\n') + 1));
    CHECK(std::abs(t_hat - 6.0) <= 0.2);
    CHECK(fs::exists(dir / "out" / "profile.csv"));
    CHECK(fs::exists(dir / "out" / "detect.manifest.ini"));
}

TEST_CASE("invalid values and conflicts are usage errors") {
    const auto dir = fresh_dir("usage");
    const auto events = write_events(dir);
    const auto neg = run({"argmax", "--events", events.string(), "--k", "2", "--delta", "-1", "--out", dir.string()});
    CHECK(neg.code == 2);
    CHECK(neg.err.find("delta must be positive") != std::string::npos);

    const auto both = run({"detect", "--events", events.string(), "--binned", events.string(), "--k", "2",
                           "--delta", "0.1", "--threshold", "5", "--out", dir.string()});
    CHECK(both.code == 2);

    const auto modes = run({"detect", "--events", events.string(), "--k", "2", "--delta", "0.1", "--threshold",
                            "5", "--argmax-single", "--out", dir.string()});
    CHECK(modes.code == 2);

    const auto neither = run({"detect", "--events", events.string(), "--k", "2", "--delta", "0.1", "--out",
                              dir.string()});
    CHECK(neither.code == 2);
    CHECK(neither.err.find("usage error") != std::string::npos);

    CHECK(run({"heatmap", "--preset", "fig7", "--out", dir.string()}).code == 2);
    CHECK(run({"no-such-command"}).code == 2);
}

TEST_CASE("runtime failures exit with status 1") {
    const auto dir = fresh_dir("runtime");
    const auto r = run({"argmax", "--events", (dir / "missing.txt").string(), "--k", "2", "--delta", "0.1", "--out",
                        dir.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("error") != std::string::npos);

    write_file(dir / "bad.txt", "1\n2\noops\n");
    const auto bad = run({"argmax", "--events", (dir / "bad.txt").string(), "--k", "2", "--delta", "0.1", "--out",
                          dir.string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.find(":3:") != std::string::npos);
}

TEST_CASE("help lists subcommands and flags") {
    const auto top = run({"--help"});
    CHECK(top.code == 0);
    for (const char* name : {"simulate-poisson", "simulate-si", "detect", "argmax", "heatmap", "baselines",
                             "multicascade", "analyze-binned", "presets"}) {
        CHECK(top.out.find(name) != std::string::npos);
    }
    const auto sub = run({"detect", "--help"});
    CHECK(sub.code == 0);
    for (const char* flag : {"--k", "--delta", "--threshold", "--argmax-single", "--grid-step", "--out", "--seed"}) {
        CHECK(sub.out.find(flag) != std::string::npos);
    }
}

TEST_CASE("manifest re-run reproduces the output byte for byte") {
    const auto dir = fresh_dir("manifest");
    const auto a = run({"heatmap", "--scenario", "smooth-jump", "--baseline", "2000", "--jump", "2000", "--orders",
                        "1,2", "--deltas", "0.1,0.3", "--trials", "3", "--seed", "5", "--out", (dir / "a").string()});
    REQUIRE(a.code == 0);
    const auto manifest = dir / "a" / "heatmap.manifest.ini";
    REQUIRE(fs::exists(manifest));
    // re-run from the manifest into a different directory
    const auto b = run({"--config", manifest.string(), "heatmap", "--out", (dir / "b").string()});
    REQUIRE(b.code == 0);
    CHECK(read_file(dir / "a" / "heatmap.csv") == read_file(dir / "b" / "heatmap.csv"));
}

TEST_CASE("same seed, same events; different seed, different events") {
    const auto dir = fresh_dir("seed");
    auto sim = [&](const std::string& seed, const std::string& sub) {
        const auto r = run({"simulate-poisson", "--preset", "const-plus-exp", "--horizon", "2", "--seed", seed,
                            "--out", (dir / sub).string()});
        REQUIRE(r.code == 0);
        return read_file(dir / sub / "events.txt");
    };
    CHECK(sim("7", "a") == sim("7", "b"));
    CHECK(sim("7", "a") != sim("8", "c"));
}

TEST_CASE("output directory falls back to the environment variable") {
    const auto dir = fresh_dir("env");
    ::setenv(abrupt::cli::kOutDirEnv, (dir / "from_env").string().c_str(), 1);
    const auto r = run({"simulate-si", "--height", "4", "--hub-degree", "10", "--cascades", "2"});
    ::unsetenv(abrupt::cli::kOutDirEnv);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "from_env" / "traces" / "trace_000.csv"));
    CHECK(fs::exists(dir / "from_env" / "traces" / "trace_001.csv"));
}

TEST_CASE("multicascade on simulated traces and on a directory") {
    const auto dir = fresh_dir("multi");
    REQUIRE(run({"simulate-si", "--height", "8", "--hub-degree", "300", "--cascades", "3", "--seed", "4", "--out",
                 dir.string()})
                .code == 0);
    const auto r = run({"multicascade", "--traces", (dir / "traces").string(), "--k", "2", "--delta", "0.1",
                        "--threshold", "300", "--window", "0.05", "--out", (dir / "mc").string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "mc" / "high_degree.txt"));
    CHECK(fs::exists(dir / "mc" / "provenance.txt"));
}

TEST_CASE("analyze-binned and presets") {
    const auto dir = fresh_dir("binned");
    std::string csv = "date,cases\n";
    for (int d = 0; d < 20; ++d) csv += std::to_string(d) + "," + std::to_string(d == 9 ? 50 : 10) + "\n";
    write_file(dir / "cases.csv", csv);
    const auto r = run({"analyze-binned", "--input", (dir / "cases.csv").string(), "--k", "2", "--out",
                        (dir / "out").string()});
    REQUIRE(r.code == 0);
    CHECK(read_file(dir / "out" / "summary.txt") == "argmax day=9 value=40 k=2 delta_days=1\n");
    CHECK(run({"analyze-binned", "--input", (dir / "cases.csv").string(), "--mode", "weekly"}).code == 2);

    const auto p = run({"presets", "--name", "fig5"});
    CHECK(p.code == 0);
    CHECK(p.out.find("[heatmap]") != std::string::npos);
}
