#pragma once

#include "lightdic/feature_matrix.hpp"
#include "lightdic/propagation.hpp"
#include "lightdic/split.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lightdic {

/// Linear softmax predictor over concatenated real/imaginary features.
/// Weights are stored class-major (num_classes rows of d_in) so the forward
/// pass reduces to contiguous dot products; the checkpoint format transposes
/// to d_in-major on disk.
struct LinearModel {
    std::size_t d_in = 0;
    std::size_t num_classes = 0;
    bool has_bias = true;
    std::vector<double> weights; ///< [c * d_in + j]
    std::vector<double> bias;    ///< [c]

    static LinearModel zeros(std::size_t d_in, std::size_t num_classes, bool with_bias = true);

    double weight_at(std::size_t j, std::size_t c) const { return weights[c * d_in + j]; }
    double frobenius_norm() const;
};

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t batch_size = 5000;
    std::size_t epochs = 100;
    double weight_decay = 0.0;
    std::uint64_t seed = 0;
    std::size_t patience = 50; ///< early-stopping patience in epochs; 0 disables

    void validate() const;
};

/// Rows + integer labels for one split subset.
struct Dataset {
    FeatureMatrix x;
    std::vector<std::int64_t> y;

    std::size_t size() const { return y.size(); }
};

struct AssembledData {
    Dataset train;
    Dataset val;
    Dataset test;
    std::size_t width = 0;
    std::size_t num_classes = 0;
};

struct MetricsReport {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::optional<double> auc; ///< binary tasks only
    std::vector<double> per_epoch_loss;
};

struct TrainResult {
    LinearModel model;
    std::vector<double> per_epoch_loss;
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0; ///< meaningful when early stopping was active
};

/// Builds design matrices: node rows are [real_u | imag_u] (width 2 f'),
/// link rows are [real_u | imag_u | real_v | imag_v] (width 4 f').
AssembledData assemble_inputs(const AggregatedFeatures& agg, const TaskSplit& split);

/// Row-wise softmax probabilities, max-subtracted for stability. Rows sum to
/// one within 1e-12 for finite inputs.
FeatureMatrix forward(const LinearModel& model, const FeatureMatrix& x);

/// Mean cross-entropy + (weight_decay/2) ||W||^2 and its analytic gradient.
/// Exposed so the finite-difference contract check can hit it directly.
double loss_and_gradient(const LinearModel& model, const FeatureMatrix& x,
                         std::span<const std::int64_t> y, double weight_decay,
                         std::vector<double>& grad_w, std::vector<double>& grad_b);

/// Mini-batch gradient descent on the objective above, seeded shuffles,
/// deterministic per seed. With a validation set and patience > 0, early
/// stopping on validation accuracy returns the best snapshot. Throws
/// NumericError naming the epoch if the loss turns non-finite.
TrainResult train(LinearModel model, const Dataset& train_set, const Dataset* val_set,
                  const TrainConfig& config);

MetricsReport evaluate(const LinearModel& model, const Dataset& data, TaskKind task_kind);

namespace metrics {

double accuracy(std::span<const std::int64_t> predicted, std::span<const std::int64_t> truth);

/// Unweighted mean of per-class F1; classes absent from both prediction and
/// truth contribute 0.
double macro_f1(std::span<const std::int64_t> predicted, std::span<const std::int64_t> truth,
                std::size_t num_classes);

/// Mann-Whitney AUC of positive-class scores, ties counted half.
double auc(std::span<const double> scores, std::span<const std::int64_t> labels);

} // namespace metrics

} // namespace lightdic
