#include "lightdic/spectral_features.hpp"

#include "lightdic/errors.hpp"
#include "lightdic/kernels.hpp"
#include "lightdic/oracle.hpp"
#include "lightdic/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lightdic {

namespace {

/// Symmetric (max) adjacency as plain neighbor lists, plus d~^{-1/2} with
/// the +I regularization counted in the degree.
struct SymOperator {
    std::vector<std::uint64_t> row_ptr;
    std::vector<NodeId> col_idx;
    std::vector<double> inv_sqrt_deg;
};

SymOperator build_sym_operator(const DirectedGraph& g) {
    const std::size_t n = g.num_nodes();
    SymOperator op;
    op.row_ptr.assign(n + 1, 0);
    std::vector<NodeId> merged;
    for (NodeId u = 0; u < n; ++u) {
        const auto out = g.out_neighbors(u);
        const auto in = g.in_neighbors(u);
        merged.clear();
        std::set_union(out.begin(), out.end(), in.begin(), in.end(), std::back_inserter(merged));
        op.row_ptr[u + 1] = op.row_ptr[u] + merged.size();
        op.col_idx.insert(op.col_idx.end(), merged.begin(), merged.end());
    }
    op.inv_sqrt_deg.resize(n);
    for (NodeId u = 0; u < n; ++u) {
        const double deg = static_cast<double>(op.row_ptr[u + 1] - op.row_ptr[u]) + 1.0;
        op.inv_sqrt_deg[u] = 1.0 / std::sqrt(deg);
    }
    return op;
}

/// y = S x with S = D~^{-1/2} (A_s + I) D~^{-1/2}, applied column-block-wise
/// on an n x k matrix.
void apply_operator(const SymOperator& op, const FeatureMatrix& x, FeatureMatrix& y) {
    const std::size_t n = x.rows;
    const std::size_t k = x.cols;
    const auto& kern = kernels::active();

    // z = D~^{-1/2} x
    FeatureMatrix z = x;
    for (std::size_t u = 0; u < n; ++u) {
        kern.scale(op.inv_sqrt_deg[u], z.values.data() + u * k, k);
    }
    y = FeatureMatrix(n, k);
    for (std::size_t u = 0; u < n; ++u) {
        double* row = y.values.data() + u * k;
        kern.add(z.values.data() + u * k, row, k); // self-loop term
        for (std::uint64_t e = op.row_ptr[u]; e < op.row_ptr[u + 1]; ++e) {
            kern.add(z.values.data() + op.col_idx[e] * k, row, k);
        }
        kern.scale(op.inv_sqrt_deg[u], row, k);
    }
}

/// Modified Gram-Schmidt on columns.
void orthonormalize(FeatureMatrix& v) {
    const std::size_t n = v.rows;
    const std::size_t k = v.cols;
    std::vector<double> col(n), other(n);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = v.at(i, j);
        for (std::size_t p = 0; p < j; ++p) {
            for (std::size_t i = 0; i < n; ++i) other[i] = v.at(i, p);
            double proj = 0.0;
            for (std::size_t i = 0; i < n; ++i) proj += other[i] * col[i];
            for (std::size_t i = 0; i < n; ++i) col[i] -= proj * other[i];
        }
        double len = 0.0;
        for (std::size_t i = 0; i < n; ++i) len += col[i] * col[i];
        len = std::sqrt(len);
        if (len < 1e-12) {
            // degenerate start block: re-seed the column deterministically
            Rng rng(0x5eedc01ULL + j);
            for (std::size_t i = 0; i < n; ++i) col[i] = rng.normal();
            // redo projections once; a random vector is almost surely
            // independent of the accepted columns
            for (std::size_t p = 0; p < j; ++p) {
                for (std::size_t i = 0; i < n; ++i) other[i] = v.at(i, p);
                double proj = 0.0;
                for (std::size_t i = 0; i < n; ++i) proj += other[i] * col[i];
                for (std::size_t i = 0; i < n; ++i) col[i] -= proj * other[i];
            }
            len = 0.0;
            for (std::size_t i = 0; i < n; ++i) len += col[i] * col[i];
            len = std::sqrt(len);
        }
        for (std::size_t i = 0; i < n; ++i) v.at(i, j) = col[i] / len;
    }
}

} // namespace

FeatureMatrix spectral_features(const DirectedGraph& graph, std::size_t k,
                                std::size_t iters, std::uint64_t seed) {
    const std::size_t n = graph.num_nodes();
    if (n == 0) throw InputError("spectral_features: empty graph");
    if (k > n) throw InputError("spectral_features: k exceeds node count");
    if (k == 0) return FeatureMatrix(n, 0);

    const SymOperator op = build_sym_operator(graph);

    Rng rng(seed);
    FeatureMatrix v(n, k);
    for (double& x : v.values) x = rng.normal();
    orthonormalize(v);

    FeatureMatrix sv;
    for (std::size_t it = 0; it < iters; ++it) {
        apply_operator(op, v, sv);
        v = sv;
        orthonormalize(v);
    }

    // Rayleigh-Ritz: rotate the block so each column tracks one eigenvector,
    // ordered by |ritz value| descending (power iteration's notion of leading)
    apply_operator(op, v, sv);
    oracle::DenseMatrix b(k);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t c = 0; c < k; ++c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += v.at(i, a) * sv.at(i, c);
            b.at(a, c) = acc;
        }
    }
    // symmetrize away rounding before the dense solve
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t c = a + 1; c < k; ++c) {
            const double m = 0.5 * (b.at(a, c) + b.at(c, a));
            b.at(a, c) = m;
            b.at(c, a) = m;
        }
    }
    std::vector<double> ritz;
    oracle::DenseMatrix rot;
    oracle::jacobi_symmetric(b, ritz, &rot);

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&ritz](std::size_t a, std::size_t c) {
        return std::abs(ritz[a]) > std::abs(ritz[c]);
    });

    FeatureMatrix out(n, k);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t src = order[j];
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t c = 0; c < k; ++c) acc += v.at(i, c) * rot.at(c, src);
            out.at(i, j) = acc;
        }
    }
    // columns of an orthonormal block times an orthogonal rotation stay
    // orthonormal; renormalize anyway to pin unit length exactly
    for (std::size_t j = 0; j < k; ++j) {
        double len = 0.0;
        for (std::size_t i = 0; i < n; ++i) len += out.at(i, j) * out.at(i, j);
        len = std::sqrt(len);
        for (std::size_t i = 0; i < n; ++i) out.at(i, j) /= len;
    }
    return out;
}

} // namespace lightdic
