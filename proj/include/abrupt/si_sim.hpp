#pragma once

// Susceptible-Infected dynamics on an undirected graph. Every edge with one
// infected endpoint transmits at a constant rate, so the infection count I(t)
// is a point process whose rate is the cut between infected and susceptible
// vertices; infecting v moves that rate by deg(v) - 2 |N(v) ∩ I|.

#include "abrupt/process.hpp"
#include "abrupt/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace abrupt {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

// Connected simple undirected graph in compressed adjacency form.
class Graph {
public:
    Graph() = default;

    // Throws std::invalid_argument on self-loops, repeated edges, out-of-range
    // endpoints, or a disconnected result.
    static Graph from_edges(std::size_t vertex_count, std::span<const Edge> edges);

    std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const { return adjacency_.size() / 2; }
    std::span<const Vertex> neighbors(Vertex v) const;
    std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
    std::size_t max_degree() const;
    std::vector<Edge> edges() const;

    // Low-degree cap d and high-degree threshold D of the graph family.
    std::size_t low_degree_cap() const { return low_degree_cap_; }
    std::size_t high_degree_threshold() const { return high_degree_threshold_; }
    void set_degree_profile(std::size_t low_cap, std::size_t high_threshold);
    // Vertices of degree larger than the high-degree threshold.
    std::vector<Vertex> high_degree_vertices() const;

    // Designated high-degree vertex of a generated benchmark graph.
    std::optional<Vertex> hub() const { return hub_; }
    void set_hub(Vertex v) { hub_ = v; }

private:
    std::vector<std::size_t> offsets_;
    std::vector<Vertex> adjacency_;
    std::size_t low_degree_cap_ = 0;
    std::size_t high_degree_threshold_ = 0;
    std::optional<Vertex> hub_;
};

// Complete binary tree of the given height (2^(height+1) - 1 vertices, heap
// order: children of i are 2i+1 and 2i+2) with `extra_leaves` new leaves
// attached to the leftmost vertex at depth height-1, recorded as the hub.
Graph build_tree_with_hub(int height, std::size_t extra_leaves);

struct CascadeTrace {
    std::vector<double> infection_time;
    Vertex source = 0;

    std::size_t size() const { return infection_time.size(); }
    // Vertices in infection order.
    std::vector<Vertex> order() const;
};

// Edge clocks are Exponential(rate) draws keyed by (seed, edge), so each
// cascade is first-passage percolation from the source; the same seed gives the
// same clock to an edge in any graph that contains it.
CascadeTrace simulate_si(const Graph& g, Vertex source, const SimSeed& seed, double rate = 1.0);

// Sorted infection times including the source at 0; horizon = last infection.
EventTimes infection_count_process(const CascadeTrace& trace);

// Number of edges with exactly one infected endpoint.
std::size_t rate_at(const Graph& g, std::span<const Vertex> infected);

// deg(v) - 2 |N(v) ∩ infected|. Throws std::invalid_argument if v is already
// infected or has no infected neighbour.
std::int64_t jump_at_infection(const Graph& g, std::span<const Vertex> infected_before, Vertex v);

// Checks the trace against the graph: source at time 0, finite times, and
// every other vertex preceded by an infected neighbour.
void validate_trace(const Graph& g, const CascadeTrace& trace);

// Edge list: one `u v` pair per line, 0-indexed, '#' comments.
Graph parse_edge_list(std::string_view text, const std::string& source);
Graph read_edge_list(const std::filesystem::path& path);
std::string format_edge_list(const Graph& g);

// Trace CSV `vertex,time`. The source is the vertex infected at time 0.
CascadeTrace parse_trace_csv(std::string_view text, const std::string& source);
CascadeTrace read_trace_csv(const std::filesystem::path& path);
std::string format_trace_csv(const CascadeTrace& trace);

}  // namespace abrupt
