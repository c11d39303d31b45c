#include "abrupt/multicascade.hpp"

#include "abrupt/error.hpp"
#include "abrupt/parallel.hpp"
#include "abrupt/text_io.hpp"

#include <algorithm>
#include <stdexcept>

namespace abrupt {

void CascadeBundle::validate() const {
    if (traces.empty()) throw std::invalid_argument("cascade bundle is empty");
    for (std::size_t i = 1; i < traces.size(); ++i) {
        if (traces[i].size() != traces[0].size()) {
            throw std::invalid_argument("trace " + std::to_string(i) + " has " +
                                        std::to_string(traces[i].size()) + " vertices, expected " +
                                        std::to_string(traces[0].size()));
        }
    }
}

std::vector<Vertex> candidate_vertices(const CascadeTrace& trace, std::span<const double> estimates,
                                       double window) {
    if (!(window > 0.0)) throw std::invalid_argument("proximity window must be positive");
    std::vector<double> sorted(estimates.begin(), estimates.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<Vertex> out;
    if (sorted.empty()) return out;
    for (std::size_t v = 0; v < trace.size(); ++v) {
        const double t = trace.infection_time[v];
        auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
        bool near = it != sorted.end() && *it - t <= window;
        near = near || (it != sorted.begin() && t - *std::prev(it) <= window);
        if (near) out.push_back(static_cast<Vertex>(v));
    }
    return out;
}

HighDegreeEstimate estimate_high_degree(const CascadeBundle& bundle, const MulticascadeConfig& config) {
    bundle.validate();
    config.detector.validate();
    HighDegreeEstimate result;
    result.window = config.resolved_window();
    if (!(result.window > 0.0)) throw std::invalid_argument("proximity window must be positive");
    result.per_cascade.resize(bundle.traces.size());

    parallel_for(bundle.traces.size(), config.workers, [&](std::size_t i) {
        const auto& trace = bundle.traces[i];
        CascadeFinding finding;
        finding.report = detect(CountingFunction(infection_count_process(trace)), config.detector);
        const auto times = finding.report.times();
        finding.candidates = candidate_vertices(trace, times, result.window);
        result.per_cascade[i] = std::move(finding);
    });

    result.vertices = result.per_cascade.front().candidates;
    for (std::size_t i = 1; i < result.per_cascade.size() && !result.vertices.empty(); ++i) {
        const auto& next = result.per_cascade[i].candidates;
        std::vector<Vertex> both;
        std::set_intersection(result.vertices.begin(), result.vertices.end(), next.begin(), next.end(),
                              std::back_inserter(both));
        result.vertices = std::move(both);
    }
    return result;
}

CascadeBundle read_trace_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw std::runtime_error("trace directory not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no trace CSV files in " + dir.string());
    CascadeBundle bundle;
    for (const auto& f : files) {
        bundle.traces.push_back(read_trace_csv(f));
        bundle.labels.push_back(f.filename().string());
    }
    bundle.validate();
    return bundle;
}

std::string format_vertex_list(std::span<const Vertex> vertices) {
    std::string out;
    for (Vertex v : vertices) out += std::to_string(v) + '\n';
    return out;
}

std::string format_provenance(const HighDegreeEstimate& estimate, const CascadeBundle& bundle) {
    text::KeyValues kv;
    kv.set("cascades", static_cast<std::int64_t>(estimate.per_cascade.size()));
    kv.set("window", estimate.window);
    kv.set("output_size", static_cast<std::int64_t>(estimate.vertices.size()));
    for (std::size_t i = 0; i < estimate.per_cascade.size(); ++i) {
        const auto& f = estimate.per_cascade[i];
        const std::string prefix = "cascade." + std::to_string(i) + ".";
        if (i < bundle.labels.size()) kv.set(prefix + "file", bundle.labels[i]);
        std::string times;
        for (double t : f.report.times()) {
            if (!times.empty()) times += ';';
            times += text::format_double(t);
        }
        kv.set(prefix + "estimates", times);
        kv.set(prefix + "candidates", static_cast<std::int64_t>(f.candidates.size()));
    }
    return kv.serialize();
}

}  // namespace abrupt
