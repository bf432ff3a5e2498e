#pragma once

#include "lightdic/feature_matrix.hpp"
#include "lightdic/graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lightdic {

enum class Aggregation : std::uint8_t {
    Last = 0,
    Mean = 1,
    Sum = 2,
    Concat = 3,
};

const char* aggregation_name(Aggregation a);
bool aggregation_from_name(const std::string& name, Aggregation& out);

struct PropagationConfig {
    double q = 0.0;
    std::size_t steps = 0; ///< K, number of operator applications
    Aggregation aggregation = Aggregation::Last;
    std::size_t max_steps = 64;

    void validate() const;
};

/// The propagated feature list [X^(0) ... X^(K)], each step a pair of dense
/// real planes. steps[0] has real plane = imaginary plane = X.
struct ComplexFeatureSet {
    std::size_t n = 0;
    std::size_t width = 0; ///< base feature width f
    std::vector<FeatureMatrix> real_steps;
    std::vector<FeatureMatrix> imag_steps;
    PropagationConfig config;
    std::uint64_t graph_fingerprint = 0;

    std::size_t num_steps() const { return real_steps.empty() ? 0 : real_steps.size() - 1; }
};

/// Output of message aggregation: one real and one imaginary plane of width
/// f' (= f for Last/Mean/Sum, f*(K+1) for Concat).
struct AggregatedFeatures {
    std::size_t n = 0;
    std::size_t width = 0; ///< f'
    FeatureMatrix real;
    FeatureMatrix imag;
    PropagationConfig config;
    std::uint64_t graph_fingerprint = 0;
};

/// K applications of the renormalized magnetic operator to (X + iX),
/// materializing every intermediate step. Exactly K sparse products are
/// performed. Throws NumericError on non-finite input or output.
ComplexFeatureSet propagate(const DirectedGraph& graph, const FeatureMatrix& features,
                            const PropagationConfig& config, unsigned threads = 1);

/// Weight-free reduction over steps 0..K, applied to both planes alike.
AggregatedFeatures aggregate(const ComplexFeatureSet& features, Aggregation mode);

/// Propagate and aggregate without materializing the step list: Last, Mean
/// and Sum run with O(n f) accumulators; Concat materializes by necessity.
/// This is the path the pipeline uses.
AggregatedFeatures propagate_aggregate(const DirectedGraph& graph, const FeatureMatrix& features,
                                       const PropagationConfig& config, unsigned threads = 1);

} // namespace lightdic
