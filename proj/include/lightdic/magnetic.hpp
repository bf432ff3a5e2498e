#pragma once

#include "lightdic/feature_matrix.hpp"
#include "lightdic/graph.hpp"

#include <cstdint>
#include <vector>

namespace lightdic {

/// Hermitian sparse matrix stored as paired real/imaginary value planes over
/// one shared symmetric CSR pattern: (u,v) is stored iff (v,u) is stored,
/// re(u,v) = re(v,u) and im(u,v) = -im(v,u) hold bit-exactly because each
/// unordered pair's values are computed once and mirrored.
struct ComplexSparseMatrix {
    std::size_t n = 0;
    std::vector<std::uint64_t> row_ptr{0};
    std::vector<NodeId> col_idx;
    std::vector<double> re;
    std::vector<double> im;

    std::size_t nnz() const { return col_idx.size(); }

    /// Dense lookup for tests/oracles; O(log degree).
    std::pair<double, double> entry(NodeId u, NodeId v) const;
};

struct MagneticConfig {
    double q = 0.0;            ///< phase parameter in [0, 1/4]
    bool add_self_loops = false; ///< true for the propagation operator

    void validate() const;
};

/// A_m(u,v) = (A(u,v) + A(v,u)) / 2: 0.5 on one-way edges, 1.0 on reciprocal
/// pairs. Real-valued (imaginary plane all zero).
ComplexSparseMatrix symmetrized_adjacency(const DirectedGraph& graph);

/// Theta(u,v) = 2*pi*q*(A(u,v) - A(v,u)) on the symmetric pattern,
/// antisymmetric, zero on reciprocal pairs. Returned via the re plane of a
/// ComplexSparseMatrix-shaped container (im unused, all zero).
ComplexSparseMatrix phase_matrix(const DirectedGraph& graph, double q);

/// L_m^(q) = D_m - A_m .* exp(i Theta): Hermitian positive semidefinite.
ComplexSparseMatrix magnetic_laplacian(const DirectedGraph& graph, double q);

/// Renormalized propagation operator with self-loops:
/// (D~^{-1/2} (A_m + I) D~^{-1/2}) .* exp(i Theta). Hermitian, spectrum in
/// [-1, 1], real positive diagonal.
ComplexSparseMatrix magnetic_graph_operator(const DirectedGraph& graph, double q);

/// One complex sparse-dense product M (Xr + i Xi) decomposed into four real
/// plane products: Re = M_re Xr - M_im Xi, Im = M_re Xi + M_im Xr.
/// Output rows are independent, so rows may be partitioned across threads
/// without changing results.
void complex_spmm(const ComplexSparseMatrix& m, const FeatureMatrix& xr,
                  const FeatureMatrix& xi, FeatureMatrix& out_re, FeatureMatrix& out_im,
                  unsigned threads = 1);

} // namespace lightdic
