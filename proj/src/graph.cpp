#include "ctic/graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "ctic/error.hpp"
#include "ctic/rng.hpp"

namespace ctic {

DirectedGraph DirectedGraph::from_edges(NodeId node_count,
                                        std::vector<std::pair<NodeId, NodeId>> edges,
                                        std::vector<std::string> external_ids,
                                        BuildStats* stats) {
    if (node_count < 0)
        throw ValidationError("node count must be non-negative");

    BuildStats local;
    for (const auto& [u, v] : edges) {
        if (u < 0 || u >= node_count || v < 0 || v >= node_count)
            throw ValidationError("edge endpoint out of range: (" + std::to_string(u) +
                                  ", " + std::to_string(v) + ")");
    }

    auto loop_end = std::remove_if(edges.begin(), edges.end(),
                                   [](const auto& e) { return e.first == e.second; });
    local.self_loops_dropped = static_cast<std::size_t>(edges.end() - loop_end);
    edges.erase(loop_end, edges.end());

    std::sort(edges.begin(), edges.end());
    auto dup_end = std::unique(edges.begin(), edges.end());
    local.duplicates_collapsed = static_cast<std::size_t>(edges.end() - dup_end);
    edges.erase(dup_end, edges.end());

    DirectedGraph g;
    g.node_count_ = node_count;
    g.susceptibility_.assign(static_cast<std::size_t>(node_count), 0.0);

    if (external_ids.empty()) {
        external_ids.reserve(static_cast<std::size_t>(node_count));
        for (NodeId v = 0; v < node_count; ++v) external_ids.push_back(std::to_string(v));
    } else if (external_ids.size() != static_cast<std::size_t>(node_count)) {
        throw ValidationError("external id table size does not match node count");
    }
    g.external_ids_ = std::move(external_ids);

    g.out_offsets_.assign(static_cast<std::size_t>(node_count) + 1, 0);
    g.in_offsets_.assign(static_cast<std::size_t>(node_count) + 1, 0);
    for (const auto& [u, v] : edges) {
        ++g.out_offsets_[static_cast<std::size_t>(u) + 1];
        ++g.in_offsets_[static_cast<std::size_t>(v) + 1];
    }
    for (NodeId v = 0; v < node_count; ++v) {
        g.out_offsets_[static_cast<std::size_t>(v) + 1] += g.out_offsets_[v];
        g.in_offsets_[static_cast<std::size_t>(v) + 1] += g.in_offsets_[v];
    }

    g.out_targets_.resize(edges.size());
    g.in_sources_.resize(edges.size());
    std::vector<std::int64_t> out_pos(g.out_offsets_.begin(), g.out_offsets_.end() - 1);
    std::vector<std::int64_t> in_pos(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        g.out_targets_[static_cast<std::size_t>(out_pos[u]++)] = v;
        g.in_sources_[static_cast<std::size_t>(in_pos[v]++)] = u;
    }
    // edges were sorted, so both adjacency lists come out sorted per node

    if (stats) *stats = local;
    return g;
}

std::optional<NodeId> DirectedGraph::find_external(const std::string& ext) const {
    for (NodeId v = 0; v < node_count_; ++v)
        if (external_ids_[static_cast<std::size_t>(v)] == ext) return v;
    return std::nullopt;
}

DirectedGraph DirectedGraph::with_susceptibility(std::vector<double> s) const {
    if (s.size() != static_cast<std::size_t>(node_count_))
        throw ValidationError("susceptibility vector size does not match node count");
    for (double x : s)
        if (!(x >= 0.0 && x <= 1.0))
            throw ValidationError("susceptibility outside [0, 1]");
    DirectedGraph g = *this;
    g.susceptibility_ = std::move(s);
    return g;
}

namespace {

bool is_comment_or_blank(const std::string& line) {
    for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '#';
    }
    return true;
}

} // namespace

EdgeListResult load_edge_list(const std::filesystem::path& path,
                              const std::optional<std::filesystem::path>& id_map_out) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open edge list: " + path.string());

    std::unordered_map<std::string, NodeId> intern;
    std::vector<std::string> external_ids;
    std::vector<std::pair<NodeId, NodeId>> edges;

    auto intern_id = [&](const std::string& ext) -> NodeId {
        auto [it, inserted] = intern.emplace(ext, static_cast<NodeId>(external_ids.size()));
        if (inserted) external_ids.push_back(ext);
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_comment_or_blank(line)) continue;
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a >> b) || (ls >> extra))
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected two whitespace-separated node ids");
        edges.emplace_back(intern_id(a), intern_id(b));
    }

    DirectedGraph::BuildStats stats;
    EdgeListResult result;
    const auto node_count = static_cast<NodeId>(external_ids.size());
    result.graph =
        DirectedGraph::from_edges(node_count, std::move(edges), std::move(external_ids), &stats);
    result.self_loops_dropped = stats.self_loops_dropped;
    result.duplicates_collapsed = stats.duplicates_collapsed;

    if (id_map_out) write_id_map(result.graph, *id_map_out);
    return result;
}

void write_id_map(const DirectedGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write id map: " + path.string());
    for (NodeId v = 0; v < graph.node_count(); ++v)
        out << graph.external_id(v) << '\t' << v << '\n';
}

std::pair<DirectedGraph, SusceptibilityReport>
load_susceptibility(const DirectedGraph& graph, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open susceptibility file: " + path.string());

    std::unordered_map<std::string, NodeId> intern;
    intern.reserve(static_cast<std::size_t>(graph.node_count()));
    for (NodeId v = 0; v < graph.node_count(); ++v) intern.emplace(graph.external_id(v), v);

    std::vector<double> s(static_cast<std::size_t>(graph.node_count()), 0.0);
    std::vector<bool> seen(static_cast<std::size_t>(graph.node_count()), false);
    SusceptibilityReport report;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_comment_or_blank(line)) continue;
        std::istringstream ls(line);
        std::string id, extra;
        double value;
        if (!(ls >> id >> value) || (ls >> extra))
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected \"NODE_ID VALUE\"");
        if (!(value >= 0.0 && value <= 1.0))
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": susceptibility for node " + id + " outside [0, 1]");
        auto it = intern.find(id);
        if (it == intern.end()) {
            ++report.unknown_ids;
            continue;
        }
        if (seen[static_cast<std::size_t>(it->second)])
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": node " + id + " listed more than once");
        seen[static_cast<std::size_t>(it->second)] = true;
        s[static_cast<std::size_t>(it->second)] = value;
        ++report.assigned;
    }
    report.defaulted = static_cast<std::size_t>(graph.node_count()) - report.assigned;
    return {graph.with_susceptibility(std::move(s)), report};
}

DirectedGraph largest_weakly_connected_component(const DirectedGraph& graph) {
    const NodeId n = graph.node_count();
    if (n == 0) return graph;

    std::vector<NodeId> component(static_cast<std::size_t>(n), -1);
    NodeId best_root = 0;
    std::int64_t best_size = 0;

    std::deque<NodeId> queue;
    for (NodeId start = 0; start < n; ++start) {
        if (component[static_cast<std::size_t>(start)] != -1) continue;
        std::int64_t size = 0;
        component[static_cast<std::size_t>(start)] = start;
        queue.push_back(start);
        while (!queue.empty()) {
            NodeId u = queue.front();
            queue.pop_front();
            ++size;
            auto visit = [&](NodeId w) {
                if (component[static_cast<std::size_t>(w)] == -1) {
                    component[static_cast<std::size_t>(w)] = start;
                    queue.push_back(w);
                }
            };
            for (NodeId w : graph.out_neighbors(u)) visit(w);
            for (NodeId w : graph.in_neighbors(u)) visit(w);
        }
        if (size > best_size) { // strict: first (lowest-id) root wins ties
            best_size = size;
            best_root = start;
        }
    }

    std::vector<NodeId> remap(static_cast<std::size_t>(n), -1);
    std::vector<std::string> ext;
    std::vector<double> s;
    ext.reserve(static_cast<std::size_t>(best_size));
    s.reserve(static_cast<std::size_t>(best_size));
    NodeId next = 0;
    for (NodeId v = 0; v < n; ++v) {
        if (component[static_cast<std::size_t>(v)] != best_root) continue;
        remap[static_cast<std::size_t>(v)] = next++;
        ext.push_back(graph.external_id(v));
        s.push_back(graph.susceptibility(v));
    }

    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u = 0; u < n; ++u) {
        if (remap[static_cast<std::size_t>(u)] == -1) continue;
        for (NodeId v : graph.out_neighbors(u))
            edges.emplace_back(remap[static_cast<std::size_t>(u)],
                               remap[static_cast<std::size_t>(v)]);
    }
    return DirectedGraph::from_edges(next, std::move(edges), std::move(ext))
        .with_susceptibility(std::move(s));
}

DirectedGraph assign_susceptibility_from_distribution(const DirectedGraph& graph,
                                                      std::span<const double> empirical_values,
                                                      std::uint64_t rng_seed) {
    if (empirical_values.empty())
        throw ValidationError("empirical susceptibility value list is empty");
    for (double x : empirical_values)
        if (!(x >= 0.0 && x <= 1.0))
            throw ValidationError("empirical susceptibility value outside [0, 1]");

    SplitMix64 rng(rng_seed);
    std::vector<double> s(static_cast<std::size_t>(graph.node_count()));
    for (auto& x : s)
        x = empirical_values[rng.next_below(empirical_values.size())];
    return graph.with_susceptibility(std::move(s));
}

std::vector<std::int32_t> bfs_distance_from(const DirectedGraph& graph, NodeId source) {
    if (!graph.valid_node(source))
        throw ValidationError("BFS source node out of range");
    std::vector<std::int32_t> dist(static_cast<std::size_t>(graph.node_count()), kUnreachable);
    dist[static_cast<std::size_t>(source)] = 0;
    std::deque<NodeId> queue{source};
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (NodeId v : graph.out_neighbors(u)) {
            if (dist[static_cast<std::size_t>(v)] == kUnreachable) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

std::vector<std::int32_t> out_degrees(const DirectedGraph& graph) {
    std::vector<std::int32_t> deg(static_cast<std::size_t>(graph.node_count()));
    for (NodeId v = 0; v < graph.node_count(); ++v)
        deg[static_cast<std::size_t>(v)] = graph.out_degree(v);
    return deg;
}

} // namespace ctic
