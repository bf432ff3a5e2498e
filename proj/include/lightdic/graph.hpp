#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lightdic {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Immutable CSR digraph with binary adjacency.
///
/// Construction deduplicates edges and drops self-loops; self-loops only ever
/// appear later, inside the renormalized propagation operator. Both the
/// forward CSR and its transpose are stored so in- and out-neighborhoods are
/// O(degree). Immutable after construction and safe to share across threads.
class DirectedGraph {
public:
    DirectedGraph() = default;

    /// Builds from an arbitrary edge list; sorts, dedups, drops self-loops.
    /// Throws InputError if an endpoint is >= num_nodes.
    DirectedGraph(std::size_t num_nodes, std::vector<Edge> edges);

    std::size_t num_nodes() const { return n_; }
    std::size_t num_edges() const { return m_; }

    std::span<const NodeId> out_neighbors(NodeId u) const {
        return {out_col_.data() + out_ptr_[u], out_ptr_[u + 1] - out_ptr_[u]};
    }
    std::span<const NodeId> in_neighbors(NodeId u) const {
        return {in_col_.data() + in_ptr_[u], in_ptr_[u + 1] - in_ptr_[u]};
    }
    std::size_t out_degree(NodeId u) const { return out_ptr_[u + 1] - out_ptr_[u]; }
    std::size_t in_degree(NodeId u) const { return in_ptr_[u + 1] - in_ptr_[u]; }

    /// Binary adjacency lookup (sorted-row binary search).
    bool has_edge(NodeId u, NodeId v) const;

    /// Edges in sorted (u, v) order.
    std::vector<Edge> edge_list() const;

    /// FNV-1a 64 over the sorted edge list, endpoints as little-endian u64.
    std::uint64_t fingerprint() const;

    const std::vector<std::uint64_t>& out_row_ptr() const { return out_ptr_; }
    const std::vector<NodeId>& out_col_idx() const { return out_col_; }
    const std::vector<std::uint64_t>& in_row_ptr() const { return in_ptr_; }
    const std::vector<NodeId>& in_col_idx() const { return in_col_; }

private:
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<std::uint64_t> out_ptr_{0};
    std::vector<NodeId> out_col_;
    std::vector<std::uint64_t> in_ptr_{0};
    std::vector<NodeId> in_col_;
};

/// Parses a whitespace-separated `u v` edge list (0-indexed, one edge per
/// line, `#` comment lines ignored). Node count is max index + 1 unless
/// num_nodes overrides. Throws InputError with the line number on malformed
/// input, and on indices >= num_nodes.
DirectedGraph load_edge_list(const std::string& path,
                             std::optional<std::size_t> num_nodes = std::nullopt);

/// Writes the graph back out in the same format.
void save_edge_list(const DirectedGraph& graph, const std::string& path);

/// Uniform random digraph with exactly m_target distinct non-loop edges.
/// Deterministic per seed. Throws InputError if m_target > n*(n-1).
DirectedGraph generate_random_digraph(std::size_t n, std::size_t m_target, std::uint64_t seed);

} // namespace lightdic
