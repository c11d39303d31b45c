#include "abrupt/si_sim.hpp"

#include "abrupt/error.hpp"
#include "abrupt/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace abrupt {

Graph Graph::from_edges(std::size_t vertex_count, std::span<const Edge> edges) {
    if (vertex_count == 0) throw std::invalid_argument("graph needs at least one vertex");
    if (vertex_count > std::numeric_limits<Vertex>::max()) {
        throw std::invalid_argument("too many vertices");
    }
    Graph g;
    std::vector<std::size_t> degree(vertex_count, 0);
    for (const auto& [u, v] : edges) {
        if (u >= vertex_count || v >= vertex_count) {
            throw std::invalid_argument("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                        ") references a missing vertex");
        }
        if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
        ++degree[u];
        ++degree[v];
    }
    g.offsets_.assign(vertex_count + 1, 0);
    for (std::size_t v = 0; v < vertex_count; ++v) g.offsets_[v + 1] = g.offsets_[v] + degree[v];
    g.adjacency_.resize(g.offsets_.back());
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        g.adjacency_[fill[u]++] = v;
        g.adjacency_[fill[v]++] = u;
    }
    for (std::size_t v = 0; v < vertex_count; ++v) {
        auto first = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
        auto last = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
        std::sort(first, last);
        if (std::adjacent_find(first, last) != last) {
            throw std::invalid_argument("repeated edge at vertex " + std::to_string(v));
        }
    }

    std::vector<bool> seen(vertex_count, false);
    std::vector<Vertex> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const Vertex u = stack.back();
        stack.pop_back();
        for (Vertex w : g.neighbors(u)) {
            if (!seen[w]) {
                seen[w] = true;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    if (reached != vertex_count) {
        throw std::invalid_argument("graph is disconnected (" + std::to_string(reached) + " of " +
                                    std::to_string(vertex_count) + " vertices reachable)");
    }
    g.low_degree_cap_ = g.max_degree();
    g.high_degree_threshold_ = g.max_degree();
    return g;
}

std::span<const Vertex> Graph::neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

std::size_t Graph::max_degree() const {
    std::size_t m = 0;
    for (std::size_t v = 0; v < size(); ++v) m = std::max(m, degree(static_cast<Vertex>(v)));
    return m;
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (Vertex u = 0; u < size(); ++u) {
        for (Vertex v : neighbors(u)) {
            if (u < v) out.emplace_back(u, v);
        }
    }
    return out;
}

void Graph::set_degree_profile(std::size_t low_cap, std::size_t high_threshold) {
    low_degree_cap_ = low_cap;
    high_degree_threshold_ = high_threshold;
}

std::vector<Vertex> Graph::high_degree_vertices() const {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < size(); ++v) {
        if (degree(v) > high_degree_threshold_) out.push_back(v);
    }
    return out;
}

Graph build_tree_with_hub(int height, std::size_t extra_leaves) {
    if (height < 2 || height > 28) throw std::invalid_argument("tree height must be in [2, 28]");
    const std::size_t tree = (std::size_t{1} << (height + 1)) - 1;
    const auto hub = static_cast<Vertex>((std::size_t{1} << (height - 1)) - 1);
    std::vector<Edge> edges;
    edges.reserve(tree - 1 + extra_leaves);
    for (std::size_t i = 1; i < tree; ++i) {
        edges.emplace_back(static_cast<Vertex>((i - 1) / 2), static_cast<Vertex>(i));
    }
    for (std::size_t i = 0; i < extra_leaves; ++i) {
        edges.emplace_back(hub, static_cast<Vertex>(tree + i));
    }
    Graph g = Graph::from_edges(tree + extra_leaves, edges);
    g.set_hub(hub);
    g.set_degree_profile(3, extra_leaves);
    return g;
}

std::vector<Vertex> CascadeTrace::order() const {
    std::vector<Vertex> out(infection_time.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<Vertex>(i);
    std::stable_sort(out.begin(), out.end(), [this](Vertex a, Vertex b) {
        return infection_time[a] < infection_time[b];
    });
    return out;
}

CascadeTrace simulate_si(const Graph& g, Vertex source, const SimSeed& seed, double rate) {
    if (source >= g.size()) throw std::invalid_argument("source vertex out of range");
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("infection rate must be positive");
    }
    constexpr double kInf = std::numeric_limits<double>::infinity();
    CascadeTrace trace;
    trace.source = source;
    trace.infection_time.assign(g.size(), kInf);

    using Pending = std::pair<double, Vertex>;
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue;
    std::vector<bool> infected(g.size(), false);
    queue.emplace(0.0, source);
    while (!queue.empty()) {
        const auto [t, v] = queue.top();
        queue.pop();
        if (infected[v]) continue;  // stale tentative infection
        infected[v] = true;
        trace.infection_time[v] = t;
        for (Vertex w : g.neighbors(v)) {
            if (infected[w]) continue;
            const std::uint64_t key = (static_cast<std::uint64_t>(std::min(v, w)) << 32) |
                                      std::max(v, w);
            queue.emplace(t + keyed_exponential(seed, key) / rate, w);
        }
    }
    return trace;
}

EventTimes infection_count_process(const CascadeTrace& trace) {
    std::vector<double> times(trace.infection_time);
    std::sort(times.begin(), times.end());
    const double horizon = times.empty() ? 0.0 : times.back();
    return EventTimes(std::move(times), horizon);
}

namespace {

std::vector<bool> membership(const Graph& g, std::span<const Vertex> set) {
    std::vector<bool> mask(g.size(), false);
    for (Vertex v : set) {
        if (v >= g.size()) throw std::invalid_argument("vertex " + std::to_string(v) + " out of range");
        mask[v] = true;
    }
    return mask;
}

}  // namespace

std::size_t rate_at(const Graph& g, std::span<const Vertex> infected) {
    const auto mask = membership(g, infected);
    std::size_t cut = 0;
    for (Vertex u = 0; u < g.size(); ++u) {
        if (!mask[u]) continue;
        for (Vertex w : g.neighbors(u)) {
            if (!mask[w]) ++cut;
        }
    }
    return cut;
}

std::int64_t jump_at_infection(const Graph& g, std::span<const Vertex> infected_before, Vertex v) {
    const auto mask = membership(g, infected_before);
    if (v >= g.size()) throw std::invalid_argument("vertex out of range");
    if (mask[v]) throw std::invalid_argument("vertex " + std::to_string(v) + " is already infected");
    std::int64_t infected_neighbors = 0;
    for (Vertex w : g.neighbors(v)) infected_neighbors += mask[w] ? 1 : 0;
    if (infected_neighbors == 0) {
        throw std::invalid_argument("vertex " + std::to_string(v) + " has no infected neighbour");
    }
    return static_cast<std::int64_t>(g.degree(v)) - 2 * infected_neighbors;
}

void validate_trace(const Graph& g, const CascadeTrace& trace) {
    if (trace.size() != g.size()) throw std::invalid_argument("trace size does not match graph");
    if (trace.source >= g.size() || trace.infection_time[trace.source] != 0.0) {
        throw std::invalid_argument("source must be infected at time 0");
    }
    for (Vertex v = 0; v < g.size(); ++v) {
        const double t = trace.infection_time[v];
        if (!std::isfinite(t) || t < 0.0) {
            throw std::invalid_argument("vertex " + std::to_string(v) + " has no valid infection time");
        }
        if (v == trace.source) continue;
        bool preceded = false;
        for (Vertex w : g.neighbors(v)) preceded = preceded || trace.infection_time[w] < t;
        if (!preceded) {
            throw std::invalid_argument("vertex " + std::to_string(v) +
                                        " infected before all of its neighbours");
        }
    }
}

Graph parse_edge_list(std::string_view contents, const std::string& source) {
    std::vector<Edge> edges;
    std::size_t n = 0;
    std::size_t lineno = 0;
    for (auto line : text::split(contents, '\n')) {
        ++lineno;
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string_view> fields;
        for (auto f : text::split(line, ' ')) {
            for (auto g : text::split(f, '\t')) {
                if (!text::trim(g).empty()) fields.push_back(g);
            }
        }
        if (fields.size() != 2) throw ParseError(source, lineno, "expected 'u v'");
        try {
            const auto u = text::parse_int(fields[0], "vertex");
            const auto v = text::parse_int(fields[1], "vertex");
            if (u < 0 || v < 0 || u > std::numeric_limits<Vertex>::max() ||
                v > std::numeric_limits<Vertex>::max()) {
                throw std::invalid_argument("vertex id out of range");
            }
            edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
            n = std::max<std::size_t>(n, static_cast<std::size_t>(std::max(u, v)) + 1);
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    try {
        return Graph::from_edges(std::max<std::size_t>(n, 1), edges);
    } catch (const std::invalid_argument& e) {
        throw ParseError(source, lineno, e.what());
    }
}

Graph read_edge_list(const std::filesystem::path& path) {
    return parse_edge_list(text::read_file(path), path.string());
}

std::string format_edge_list(const Graph& g) {
    std::string out;
    for (const auto& [u, v] : g.edges()) {
        out += std::to_string(u) + ' ' + std::to_string(v) + '\n';
    }
    return out;
}

CascadeTrace parse_trace_csv(std::string_view contents, const std::string& source) {
    std::vector<std::pair<Vertex, double>> rows;
    std::size_t lineno = 0;
    bool header = false;
    std::size_t n = 0;
    for (auto line : text::split(contents, '\n')) {
        ++lineno;
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        auto fields = text::split(line, ',');
        if (!header) {
            if (fields.size() != 2 || text::trim(fields[0]) != "vertex" ||
                text::trim(fields[1]) != "time") {
                throw ParseError(source, lineno, "expected header 'vertex,time'");
            }
            header = true;
            continue;
        }
        if (fields.size() != 2) throw ParseError(source, lineno, "expected 2 fields");
        try {
            const auto v = text::parse_int(fields[0], "vertex");
            if (v < 0 || v > std::numeric_limits<Vertex>::max()) {
                throw std::invalid_argument("vertex id out of range");
            }
            rows.emplace_back(static_cast<Vertex>(v), text::parse_double(fields[1], "time"));
            n = std::max<std::size_t>(n, static_cast<std::size_t>(v) + 1);
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    if (!header) throw ParseError(source, lineno, "missing header 'vertex,time'");
    CascadeTrace trace;
    trace.infection_time.assign(n, std::numeric_limits<double>::quiet_NaN());
    bool have_source = false;
    for (const auto& [v, t] : rows) {
        if (!std::isnan(trace.infection_time[v])) {
            throw ParseError(source, 0, "vertex " + std::to_string(v) + " listed twice");
        }
        trace.infection_time[v] = t;
        if (t == 0.0 && !have_source) {
            trace.source = v;
            have_source = true;
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (std::isnan(trace.infection_time[v])) {
            throw ParseError(source, 0, "vertex " + std::to_string(v) + " missing from trace");
        }
    }
    if (!have_source) throw ParseError(source, 0, "no vertex infected at time 0");
    return trace;
}

CascadeTrace read_trace_csv(const std::filesystem::path& path) {
    return parse_trace_csv(text::read_file(path), path.string());
}

std::string format_trace_csv(const CascadeTrace& trace) {
    std::string out = "vertex,time\n";
    for (std::size_t v = 0; v < trace.size(); ++v) {
        out += std::to_string(v);
        out += ',';
        out += text::format_double(trace.infection_time[v]);
        out += '\n';
    }
    return out;
}

}  // namespace abrupt
