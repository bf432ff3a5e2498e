#include "lightdic/graph.hpp"

#include "lightdic/errors.hpp"
#include "lightdic/rng.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_set>

namespace lightdic {

DirectedGraph::DirectedGraph(std::size_t num_nodes, std::vector<Edge> edges) {
    n_ = num_nodes;
    for (const auto& [u, v] : edges) {
        if (u >= n_ || v >= n_) {
            throw InputError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                             ") out of bounds for " + std::to_string(n_) + " nodes");
        }
    }
    std::erase_if(edges, [](const Edge& e) { return e.first == e.second; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    m_ = edges.size();

    out_ptr_.assign(n_ + 1, 0);
    in_ptr_.assign(n_ + 1, 0);
    for (const auto& [u, v] : edges) {
        ++out_ptr_[u + 1];
        ++in_ptr_[v + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) {
        out_ptr_[i + 1] += out_ptr_[i];
        in_ptr_[i + 1] += in_ptr_[i];
    }
    out_col_.resize(m_);
    in_col_.resize(m_);
    std::vector<std::uint64_t> cursor(in_ptr_.begin(), in_ptr_.end() - 1);
    std::size_t k = 0;
    for (const auto& [u, v] : edges) {
        out_col_[k++] = v; // edges sorted by (u, v): rows fill in order, columns ascending
        in_col_[cursor[v]++] = u;
    }
    // in_col rows are filled in ascending source order because edges were sorted
}

bool DirectedGraph::has_edge(NodeId u, NodeId v) const {
    const auto row = out_neighbors(u);
    return std::binary_search(row.begin(), row.end(), v);
}

std::vector<Edge> DirectedGraph::edge_list() const {
    std::vector<Edge> edges;
    edges.reserve(m_);
    for (NodeId u = 0; u < n_; ++u) {
        for (NodeId v : out_neighbors(u)) edges.emplace_back(u, v);
    }
    return edges;
}

std::uint64_t DirectedGraph::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix_u64 = [&h](std::uint64_t x) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (x >> (8 * byte)) & 0xffULL;
            h *= 0x100000001b3ULL;
        }
    };
    for (NodeId u = 0; u < n_; ++u) {
        for (NodeId v : out_neighbors(u)) {
            mix_u64(u);
            mix_u64(v);
        }
    }
    return h;
}

DirectedGraph load_edge_list(const std::string& path, std::optional<std::size_t> num_nodes) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open edge list: " + path);

    std::vector<Edge> edges;
    std::size_t max_node = 0;
    bool saw_node = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        const char* begin = line.data() + first;
        const char* end = line.data() + line.size();
        std::uint64_t ids[2];
        for (int field = 0; field < 2; ++field) {
            while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
            auto [next, ec] = std::from_chars(begin, end, ids[field]);
            if (ec != std::errc{} || next == begin) {
                throw InputError(path + ":" + std::to_string(line_no) + ": malformed edge line");
            }
            begin = next;
        }
        while (begin < end && (*begin == ' ' || *begin == '\t' || *begin == '\r')) ++begin;
        if (begin != end) {
            throw InputError(path + ":" + std::to_string(line_no) + ": trailing characters on edge line");
        }
        if (num_nodes && (ids[0] >= *num_nodes || ids[1] >= *num_nodes)) {
            throw InputError(path + ":" + std::to_string(line_no) + ": node index >= num_nodes");
        }
        edges.emplace_back(static_cast<NodeId>(ids[0]), static_cast<NodeId>(ids[1]));
        max_node = std::max({max_node, ids[0], ids[1]});
        saw_node = true;
    }
    const std::size_t n = num_nodes ? *num_nodes : (saw_node ? max_node + 1 : 0);
    return DirectedGraph(n, std::move(edges));
}

void save_edge_list(const DirectedGraph& graph, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write edge list: " + path);
    for (NodeId u = 0; u < graph.num_nodes(); ++u) {
        for (NodeId v : graph.out_neighbors(u)) {
            out << u << ' ' << v << '\n';
        }
    }
}

DirectedGraph generate_random_digraph(std::size_t n, std::size_t m_target, std::uint64_t seed) {
    const std::uint64_t max_edges = n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1);
    if (m_target > max_edges) {
        throw InputError("m_target " + std::to_string(m_target) + " exceeds n*(n-1) = " +
                         std::to_string(max_edges));
    }
    Rng rng(seed);
    std::vector<Edge> edges;
    edges.reserve(m_target);

    if (m_target * 2 >= max_edges) {
        // dense regime: shuffle the full pair universe and take a prefix
        std::vector<Edge> all;
        all.reserve(max_edges);
        for (NodeId u = 0; u < n; ++u) {
            for (NodeId v = 0; v < n; ++v) {
                if (u != v) all.emplace_back(u, v);
            }
        }
        rng.shuffle(all);
        edges.assign(all.begin(), all.begin() + m_target);
    } else {
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(m_target * 2);
        while (edges.size() < m_target) {
            const auto u = static_cast<NodeId>(rng.uniform(n));
            const auto v = static_cast<NodeId>(rng.uniform(n));
            if (u == v) continue;
            const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
            if (seen.insert(key).second) edges.emplace_back(u, v);
        }
    }
    return DirectedGraph(n, std::move(edges));
}

} // namespace lightdic
