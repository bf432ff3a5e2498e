#include "lightdic/propagation.hpp"

#include "lightdic/errors.hpp"
#include "lightdic/kernels.hpp"
#include "lightdic/magnetic.hpp"

#include <cmath>

namespace lightdic {

const char* aggregation_name(Aggregation a) {
    switch (a) {
        case Aggregation::Last: return "last";
        case Aggregation::Mean: return "mean";
        case Aggregation::Sum: return "sum";
        case Aggregation::Concat: return "concat";
    }
    return "unknown";
}

bool aggregation_from_name(const std::string& name, Aggregation& out) {
    if (name == "last" || name == "Last") {
        out = Aggregation::Last;
    } else if (name == "mean" || name == "Mean") {
        out = Aggregation::Mean;
    } else if (name == "sum" || name == "Sum") {
        out = Aggregation::Sum;
    } else if (name == "concat" || name == "Concat") {
        out = Aggregation::Concat;
    } else {
        return false;
    }
    return true;
}

void PropagationConfig::validate() const {
    if (!(q >= 0.0 && q <= 0.25)) {
        throw InputError("propagation: q must lie in [0, 0.25]");
    }
    if (steps > max_steps) {
        throw InputError("propagation: K = " + std::to_string(steps) + " exceeds the cap " +
                         std::to_string(max_steps));
    }
}

ComplexFeatureSet propagate(const DirectedGraph& graph, const FeatureMatrix& features,
                            const PropagationConfig& config, unsigned threads) {
    config.validate();
    if (features.rows != graph.num_nodes()) {
        throw InputError("propagate: feature rows != node count");
    }
    features.require_finite("propagate: input features");

    ComplexFeatureSet set;
    set.n = features.rows;
    set.width = features.cols;
    set.config = config;
    set.graph_fingerprint = graph.fingerprint();
    set.real_steps.push_back(features);
    set.imag_steps.push_back(features); // X^(0) = X + iX

    if (config.steps == 0) return set;
    const ComplexSparseMatrix mgo = magnetic_graph_operator(graph, config.q);
    for (std::size_t k = 0; k < config.steps; ++k) {
        FeatureMatrix next_re, next_im;
        complex_spmm(mgo, set.real_steps.back(), set.imag_steps.back(), next_re, next_im, threads);
        next_re.require_finite("propagate: real plane");
        next_im.require_finite("propagate: imaginary plane");
        set.real_steps.push_back(std::move(next_re));
        set.imag_steps.push_back(std::move(next_im));
    }
    return set;
}

namespace {

void reduce_into(const FeatureMatrix& step, FeatureMatrix& acc) {
    kernels::active().add(step.values.data(), acc.values.data(), acc.values.size());
}

AggregatedFeatures finalize(std::size_t n, std::size_t width, FeatureMatrix re, FeatureMatrix im,
                            const PropagationConfig& config) {
    AggregatedFeatures out;
    out.n = n;
    out.width = width;
    out.real = std::move(re);
    out.imag = std::move(im);
    out.config = config;
    return out;
}

} // namespace

AggregatedFeatures aggregate(const ComplexFeatureSet& features, Aggregation mode) {
    if (features.real_steps.empty()) {
        throw InputError("aggregate: empty feature set");
    }
    const std::size_t n = features.n;
    const std::size_t f = features.width;
    const std::size_t k = features.num_steps();
    PropagationConfig cfg = features.config;
    cfg.steps = k;
    cfg.aggregation = mode;

    auto with_fingerprint = [&features](AggregatedFeatures agg) {
        agg.graph_fingerprint = features.graph_fingerprint;
        return agg;
    };

    switch (mode) {
        case Aggregation::Last:
            return with_fingerprint(
                finalize(n, f, features.real_steps.back(), features.imag_steps.back(), cfg));
        case Aggregation::Sum:
        case Aggregation::Mean: {
            FeatureMatrix re = features.real_steps[0];
            FeatureMatrix im = features.imag_steps[0];
            for (std::size_t s = 1; s <= k; ++s) {
                reduce_into(features.real_steps[s], re);
                reduce_into(features.imag_steps[s], im);
            }
            if (mode == Aggregation::Mean) {
                const double inv = 1.0 / static_cast<double>(k + 1);
                kernels::active().scale(inv, re.values.data(), re.values.size());
                kernels::active().scale(inv, im.values.data(), im.values.size());
            }
            return with_fingerprint(finalize(n, f, std::move(re), std::move(im), cfg));
        }
        case Aggregation::Concat: {
            const std::size_t width = f * (k + 1);
            FeatureMatrix re(n, width);
            FeatureMatrix im(n, width);
            for (std::size_t s = 0; s <= k; ++s) {
                for (std::size_t row = 0; row < n; ++row) {
                    const double* src_re = features.real_steps[s].values.data() + row * f;
                    const double* src_im = features.imag_steps[s].values.data() + row * f;
                    double* dst_re = re.values.data() + row * width + s * f;
                    double* dst_im = im.values.data() + row * width + s * f;
                    for (std::size_t j = 0; j < f; ++j) {
                        dst_re[j] = src_re[j];
                        dst_im[j] = src_im[j];
                    }
                }
            }
            return with_fingerprint(finalize(n, width, std::move(re), std::move(im), cfg));
        }
    }
    throw InputError("aggregate: unknown mode");
}

AggregatedFeatures propagate_aggregate(const DirectedGraph& graph, const FeatureMatrix& features,
                                       const PropagationConfig& config, unsigned threads) {
    config.validate();
    if (config.aggregation == Aggregation::Concat) {
        auto set = propagate(graph, features, config, threads);
        auto agg = aggregate(set, Aggregation::Concat);
        agg.graph_fingerprint = set.graph_fingerprint;
        return agg;
    }

    if (features.rows != graph.num_nodes()) {
        throw InputError("propagate: feature rows != node count");
    }
    features.require_finite("propagate: input features");

    FeatureMatrix cur_re = features;
    FeatureMatrix cur_im = features;
    FeatureMatrix acc_re;
    FeatureMatrix acc_im;
    const bool summing =
        config.aggregation == Aggregation::Sum || config.aggregation == Aggregation::Mean;
    if (summing) {
        acc_re = cur_re;
        acc_im = cur_im;
    }

    if (config.steps > 0) {
        const ComplexSparseMatrix mgo = magnetic_graph_operator(graph, config.q);
        for (std::size_t k = 0; k < config.steps; ++k) {
            FeatureMatrix next_re, next_im;
            complex_spmm(mgo, cur_re, cur_im, next_re, next_im, threads);
            next_re.require_finite("propagate: real plane");
            next_im.require_finite("propagate: imaginary plane");
            cur_re = std::move(next_re);
            cur_im = std::move(next_im);
            if (summing) {
                reduce_into(cur_re, acc_re);
                reduce_into(cur_im, acc_im);
            }
        }
    }

    AggregatedFeatures out;
    if (summing) {
        if (config.aggregation == Aggregation::Mean) {
            const double inv = 1.0 / static_cast<double>(config.steps + 1);
            kernels::active().scale(inv, acc_re.values.data(), acc_re.values.size());
            kernels::active().scale(inv, acc_im.values.data(), acc_im.values.size());
        }
        out = finalize(features.rows, features.cols, std::move(acc_re), std::move(acc_im), config);
    } else {
        out = finalize(features.rows, features.cols, std::move(cur_re), std::move(cur_im), config);
    }
    out.graph_fingerprint = graph.fingerprint();
    return out;
}

} // namespace lightdic
