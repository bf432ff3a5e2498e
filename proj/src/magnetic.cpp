#include "lightdic/magnetic.hpp"

#include "lightdic/errors.hpp"
#include "lightdic/kernels.hpp"
#include "lightdic/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace lightdic {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Symmetric pattern of the graph: (u,v) present iff u->v or v->u is an edge,
/// optionally with a diagonal entry per node. Columns sorted per row.
struct SymmetricPattern {
    std::vector<std::uint64_t> row_ptr;
    std::vector<NodeId> col_idx;
};

SymmetricPattern build_pattern(const DirectedGraph& g, bool with_diagonal) {
    const std::size_t n = g.num_nodes();
    SymmetricPattern p;
    p.row_ptr.assign(n + 1, 0);

    // union of out- and in-neighbors per row (both sorted -> merge)
    std::vector<NodeId> merged;
    for (NodeId u = 0; u < n; ++u) {
        const auto out = g.out_neighbors(u);
        const auto in = g.in_neighbors(u);
        merged.clear();
        std::set_union(out.begin(), out.end(), in.begin(), in.end(), std::back_inserter(merged));
        if (with_diagonal) {
            const auto pos = std::lower_bound(merged.begin(), merged.end(), u);
            merged.insert(pos, u);
        }
        p.row_ptr[u + 1] = p.row_ptr[u] + merged.size();
        p.col_idx.insert(p.col_idx.end(), merged.begin(), merged.end());
    }
    return p;
}

std::size_t find_entry(const ComplexSparseMatrix& m, NodeId u, NodeId v) {
    const auto begin = m.col_idx.begin() + static_cast<std::ptrdiff_t>(m.row_ptr[u]);
    const auto end = m.col_idx.begin() + static_cast<std::ptrdiff_t>(m.row_ptr[u + 1]);
    const auto it = std::lower_bound(begin, end, v);
    return static_cast<std::size_t>(it - m.col_idx.begin());
}

/// Walks every stored unordered pair {u,v} with u < v once and invokes
/// fn(index_uv, index_vu, a_uv, a_vu) with the 0/1 adjacency indicators, so
/// Hermitian mirrors are written from the same computed numbers.
template <typename Fn>
void for_each_offdiag_pair(const DirectedGraph& g, ComplexSparseMatrix& m, Fn&& fn) {
    for (NodeId u = 0; u < m.n; ++u) {
        for (std::uint64_t k = m.row_ptr[u]; k < m.row_ptr[u + 1]; ++k) {
            const NodeId v = m.col_idx[k];
            if (v <= u) continue;
            const std::size_t kvu = find_entry(m, v, u);
            const bool a_uv = g.has_edge(u, v);
            const bool a_vu = g.has_edge(v, u);
            fn(static_cast<std::size_t>(k), kvu, a_uv, a_vu);
        }
    }
}

ComplexSparseMatrix with_pattern(const DirectedGraph& g, bool with_diagonal) {
    ComplexSparseMatrix m;
    m.n = g.num_nodes();
    auto pattern = build_pattern(g, with_diagonal);
    m.row_ptr = std::move(pattern.row_ptr);
    m.col_idx = std::move(pattern.col_idx);
    m.re.assign(m.col_idx.size(), 0.0);
    m.im.assign(m.col_idx.size(), 0.0);
    return m;
}

void check_q(double q) {
    if (!(q >= 0.0 && q <= 0.25)) {
        throw InputError("phase parameter q must lie in [0, 0.25], got " + std::to_string(q));
    }
}

} // namespace

std::pair<double, double> ComplexSparseMatrix::entry(NodeId u, NodeId v) const {
    const auto begin = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[u]);
    const auto end = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[u + 1]);
    const auto it = std::lower_bound(begin, end, v);
    if (it == end || *it != v) return {0.0, 0.0};
    const auto k = static_cast<std::size_t>(it - col_idx.begin());
    return {re[k], im[k]};
}

void MagneticConfig::validate() const {
    check_q(q);
}

ComplexSparseMatrix symmetrized_adjacency(const DirectedGraph& graph) {
    ComplexSparseMatrix m = with_pattern(graph, /*with_diagonal=*/false);
    for_each_offdiag_pair(graph, m, [&m](std::size_t kuv, std::size_t kvu, bool a_uv, bool a_vu) {
        const double w = 0.5 * (static_cast<double>(a_uv) + static_cast<double>(a_vu));
        m.re[kuv] = w;
        m.re[kvu] = w;
    });
    return m;
}

ComplexSparseMatrix phase_matrix(const DirectedGraph& graph, double q) {
    check_q(q);
    ComplexSparseMatrix m = with_pattern(graph, /*with_diagonal=*/false);
    for_each_offdiag_pair(graph, m, [&m, q](std::size_t kuv, std::size_t kvu, bool a_uv, bool a_vu) {
        const double theta = kTwoPi * q * (static_cast<double>(a_uv) - static_cast<double>(a_vu));
        m.re[kuv] = theta;
        m.re[kvu] = -theta;
    });
    return m;
}

ComplexSparseMatrix magnetic_laplacian(const DirectedGraph& graph, double q) {
    check_q(q);
    ComplexSparseMatrix m = with_pattern(graph, /*with_diagonal=*/true);
    std::vector<double> degree(m.n, 0.0);

    for_each_offdiag_pair(graph, m, [&](std::size_t kuv, std::size_t kvu, bool a_uv, bool a_vu) {
        const double w = 0.5 * (static_cast<double>(a_uv) + static_cast<double>(a_vu));
        const double theta = kTwoPi * q * (static_cast<double>(a_uv) - static_cast<double>(a_vu));
        const double c = w * std::cos(theta);
        const double s = w * std::sin(theta);
        // L(u,v) = -A_m(u,v) e^{i theta_uv}; mirror is the conjugate
        m.re[kuv] = -c;
        m.im[kuv] = -s;
        m.re[kvu] = -c;
        m.im[kvu] = s;
    });

    // degrees: row sums of A_m
    const ComplexSparseMatrix am = symmetrized_adjacency(graph);
    for (NodeId u = 0; u < m.n; ++u) {
        double d = 0.0;
        for (std::uint64_t k = am.row_ptr[u]; k < am.row_ptr[u + 1]; ++k) d += am.re[k];
        degree[u] = d;
    }
    for (NodeId u = 0; u < m.n; ++u) {
        const std::size_t kdiag = find_entry(m, u, u);
        m.re[kdiag] = degree[u];
        m.im[kdiag] = 0.0;
    }
    return m;
}

ComplexSparseMatrix magnetic_graph_operator(const DirectedGraph& graph, double q) {
    check_q(q);
    ComplexSparseMatrix m = with_pattern(graph, /*with_diagonal=*/true);

    // d~(u) = 1 + sum_v A_m(u,v): magnitudes only, phases have modulus 1
    const ComplexSparseMatrix am = symmetrized_adjacency(graph);
    std::vector<double> inv_sqrt_deg(m.n);
    for (NodeId u = 0; u < m.n; ++u) {
        double d = 1.0;
        for (std::uint64_t k = am.row_ptr[u]; k < am.row_ptr[u + 1]; ++k) d += am.re[k];
        inv_sqrt_deg[u] = 1.0 / std::sqrt(d);
    }

    for (NodeId u = 0; u < m.n; ++u) {
        for (std::uint64_t k = m.row_ptr[u]; k < m.row_ptr[u + 1]; ++k) {
            const NodeId v = m.col_idx[k];
            if (v < u) continue;
            if (v == u) {
                m.re[k] = inv_sqrt_deg[u] * inv_sqrt_deg[u];
                m.im[k] = 0.0;
                continue;
            }
            const bool a_uv = graph.has_edge(u, v);
            const bool a_vu = graph.has_edge(v, u);
            const double w = 0.5 * (static_cast<double>(a_uv) + static_cast<double>(a_vu));
            const double theta = kTwoPi * q * (static_cast<double>(a_uv) - static_cast<double>(a_vu));
            const double mag = w * inv_sqrt_deg[u] * inv_sqrt_deg[v];
            const double c = mag * std::cos(theta);
            const double s = mag * std::sin(theta);
            m.re[k] = c;
            m.im[k] = s;
            const std::size_t kvu = find_entry(m, v, u);
            m.re[kvu] = c;
            m.im[kvu] = -s;
        }
    }
    return m;
}

void complex_spmm(const ComplexSparseMatrix& m, const FeatureMatrix& xr,
                  const FeatureMatrix& xi, FeatureMatrix& out_re, FeatureMatrix& out_im,
                  unsigned threads) {
    if (m.n != xr.rows || m.n != xi.rows || xr.cols != xi.cols) {
        throw InputError("complex_spmm: dimension mismatch");
    }
    const std::size_t f = xr.cols;
    out_re = FeatureMatrix(m.n, f);
    out_im = FeatureMatrix(m.n, f);
    const auto& kern = kernels::active();

    parallel_for(m.n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t u = begin; u < end; ++u) {
            double* yr = out_re.values.data() + u * f;
            double* yi = out_im.values.data() + u * f;
            for (std::uint64_t k = m.row_ptr[u]; k < m.row_ptr[u + 1]; ++k) {
                const std::size_t v = m.col_idx[k];
                kern.caxpy2(m.re[k], m.im[k], xr.values.data() + v * f,
                            xi.values.data() + v * f, yr, yi, f);
            }
        }
    });
}

} // namespace lightdic
