#pragma once

// High-degree vertex identification from K independent cascade traces on one
// graph: each trace's change-point estimates select the vertices infected
// near them, and the answer is the intersection over traces.

#include "abrupt/detector.hpp"
#include "abrupt/si_sim.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace abrupt {

struct CascadeBundle {
    std::vector<CascadeTrace> traces;
    // Source files, when loaded from disk.
    std::vector<std::string> labels;

    std::size_t vertex_count() const { return traces.empty() ? 0 : traces.front().size(); }
    // Throws std::invalid_argument when empty or when vertex counts differ.
    void validate() const;
};

// Sorted ids of vertices with |t_v - t_hat| <= window for some estimate.
std::vector<Vertex> candidate_vertices(const CascadeTrace& trace, std::span<const double> estimates,
                                       double window);

struct CascadeFinding {
    ChangePointReport report;
    std::vector<Vertex> candidates;
};

struct HighDegreeEstimate {
    std::vector<Vertex> vertices;
    std::vector<CascadeFinding> per_cascade;
    double window = 0.0;
};

struct MulticascadeConfig {
    DetectorConfig detector;
    // Proximity window; defaults to order * delta.
    std::optional<double> window;
    unsigned workers = 0;

    double resolved_window() const {
        return window.value_or(static_cast<double>(detector.order) * detector.delta);
    }
};

// Detection runs per trace in parallel; a trace with no estimate empties the result.
HighDegreeEstimate estimate_high_degree(const CascadeBundle& bundle, const MulticascadeConfig& config);

// Every *.csv in the directory, in lexicographic filename order.
CascadeBundle read_trace_directory(const std::filesystem::path& dir);

// Newline-separated vertex ids.
std::string format_vertex_list(std::span<const Vertex> vertices);
// Per-cascade estimates and candidate counts as key=value lines.
std::string format_provenance(const HighDegreeEstimate& estimate, const CascadeBundle& bundle);

}  // namespace abrupt
