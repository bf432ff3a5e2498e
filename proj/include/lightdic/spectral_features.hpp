#pragma once

#include "lightdic/feature_matrix.hpp"
#include "lightdic/graph.hpp"

#include <cstdint>

namespace lightdic {

/// Synthesizes node features for featureless graphs: the k leading
/// eigenvectors (by magnitude) of S = D~^{-1/2} (A_s + I) D~^{-1/2}, where
/// A_s(u,v) = max(A(u,v), A(v,u)), approximated by block power iteration with
/// per-step orthonormalization and a final Rayleigh-Ritz rotation. Columns
/// are orthonormal. Deterministic per seed. Throws InputError if k > n or the
/// graph is empty.
FeatureMatrix spectral_features(const DirectedGraph& graph, std::size_t k,
                                std::size_t iters, std::uint64_t seed);

} // namespace lightdic
