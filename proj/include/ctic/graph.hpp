#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ctic {

using NodeId = std::int32_t;

inline constexpr std::int32_t kUnreachable = -1;

/// Immutable directed graph in CSR form with per-node susceptibility.
///
/// Node ids are dense internal indices in [0, node_count()); the original
/// file-level ids are kept in a parallel external-id table. Forward and
/// reverse adjacency are stored explicitly; the reverse lists are the exact
/// transpose of the forward ones. Safe for concurrent reads.
class DirectedGraph {
public:
    struct BuildStats {
        std::size_t self_loops_dropped = 0;
        std::size_t duplicates_collapsed = 0;
    };

    DirectedGraph() = default;

    /// Build from an edge list. Self-loops are dropped and parallel edges
    /// collapsed (counted in `stats` when given); the CTIC model permits at
    /// most one transmission attempt per ordered pair.
    static DirectedGraph from_edges(NodeId node_count,
                                    std::vector<std::pair<NodeId, NodeId>> edges,
                                    std::vector<std::string> external_ids = {},
                                    BuildStats* stats = nullptr);

    NodeId node_count() const { return node_count_; }
    std::int64_t edge_count() const { return static_cast<std::int64_t>(out_targets_.size()); }

    std::span<const NodeId> out_neighbors(NodeId u) const {
        return {out_targets_.data() + out_offsets_[u],
                out_targets_.data() + out_offsets_[u + 1]};
    }
    std::span<const NodeId> in_neighbors(NodeId v) const {
        return {in_sources_.data() + in_offsets_[v],
                in_sources_.data() + in_offsets_[v + 1]};
    }

    /// Index of the first out-edge of u in the global edge array. Edge k of
    /// node u has global index out_offset(u) + k; the diffusion engine keys
    /// its per-edge random variates on this index.
    std::int64_t out_offset(NodeId u) const { return out_offsets_[u]; }

    std::int32_t out_degree(NodeId u) const {
        return static_cast<std::int32_t>(out_offsets_[u + 1] - out_offsets_[u]);
    }
    std::int32_t in_degree(NodeId v) const {
        return static_cast<std::int32_t>(in_offsets_[v + 1] - in_offsets_[v]);
    }

    double susceptibility(NodeId v) const { return susceptibility_[v]; }
    const std::vector<double>& susceptibilities() const { return susceptibility_; }

    const std::string& external_id(NodeId v) const { return external_ids_[v]; }
    const std::vector<std::string>& external_ids() const { return external_ids_; }

    /// Internal id for an external id, if present.
    std::optional<NodeId> find_external(const std::string& ext) const;

    bool valid_node(NodeId v) const { return v >= 0 && v < node_count_; }

    /// Value-semantics update of the susceptibility vector (the structure is
    /// immutable; loaders return a modified copy).
    DirectedGraph with_susceptibility(std::vector<double> s) const;

private:
    NodeId node_count_ = 0;
    std::vector<std::int64_t> out_offsets_{0};
    std::vector<NodeId> out_targets_;
    std::vector<std::int64_t> in_offsets_{0};
    std::vector<NodeId> in_sources_;
    std::vector<double> susceptibility_;
    std::vector<std::string> external_ids_;
};

struct EdgeListResult {
    DirectedGraph graph;
    std::size_t self_loops_dropped = 0;
    std::size_t duplicates_collapsed = 0;
};

/// Load a directed edge list: one edge per line, "SOURCE<ws>TARGET",
/// '#'-prefixed comment lines and blank lines ignored. External ids are
/// arbitrary strings, interned to dense internal ids in first-appearance
/// order. Susceptibilities are initialised to 0. When `id_map_out` is given
/// the external→internal map is persisted there.
EdgeListResult load_edge_list(const std::filesystem::path& path,
                              const std::optional<std::filesystem::path>& id_map_out = {});

/// Persist the external→internal id map as "EXTERNAL_ID<ws>INTERNAL_INDEX" lines.
void write_id_map(const DirectedGraph& graph, const std::filesystem::path& path);

struct SusceptibilityReport {
    std::size_t assigned = 0;     // nodes that received a file value
    std::size_t defaulted = 0;    // nodes left at susceptibility 0
    std::size_t unknown_ids = 0;  // file ids not present in the graph
};

/// Read "NODE_ID<ws>VALUE" lines and return a copy of the graph with the
/// listed susceptibilities set. Values outside [0, 1] and duplicate node
/// listings are rejected; unknown ids are counted as warnings; unlisted
/// nodes keep susceptibility 0 and are counted in the report.
std::pair<DirectedGraph, SusceptibilityReport>
load_susceptibility(const DirectedGraph& graph, const std::filesystem::path& path);

/// Largest weakly connected component, reindexed to dense ids (external ids
/// and susceptibilities carried over). Ties between equal-sized components
/// break toward the one containing the smallest internal id. Empty graph in,
/// empty graph out.
DirectedGraph largest_weakly_connected_component(const DirectedGraph& graph);

/// Bootstrap-resample susceptibilities: every node draws independently and
/// uniformly, with replacement, from `empirical_values`. Bit-identical for a
/// fixed `rng_seed`.
DirectedGraph assign_susceptibility_from_distribution(const DirectedGraph& graph,
                                                      std::span<const double> empirical_values,
                                                      std::uint64_t rng_seed);

/// Directed-hop BFS distances from `source`; kUnreachable marks nodes with
/// no directed path from the source.
std::vector<std::int32_t> bfs_distance_from(const DirectedGraph& graph, NodeId source);

std::vector<std::int32_t> out_degrees(const DirectedGraph& graph);

} // namespace ctic
