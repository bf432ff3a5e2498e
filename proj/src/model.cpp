#include "lightdic/model.hpp"

#include "lightdic/errors.hpp"
#include "lightdic/kernels.hpp"
#include "lightdic/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lightdic {

LinearModel LinearModel::zeros(std::size_t d_in, std::size_t num_classes, bool with_bias) {
    LinearModel m;
    m.d_in = d_in;
    m.num_classes = num_classes;
    m.has_bias = with_bias;
    m.weights.assign(d_in * num_classes, 0.0);
    m.bias.assign(num_classes, 0.0);
    return m;
}

double LinearModel::frobenius_norm() const {
    double s = 0.0;
    for (double w : weights) s += w * w;
    return std::sqrt(s);
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw InputError("train: learning_rate must be positive");
    if (batch_size == 0) throw InputError("train: batch_size must be at least 1");
    if (weight_decay < 0.0) throw InputError("train: weight_decay must be nonnegative");
}

AssembledData assemble_inputs(const AggregatedFeatures& agg, const TaskSplit& split) {
    const bool link = is_link_task(split.task_kind);
    const std::size_t fp = agg.width;
    const std::size_t d_in = link ? 4 * fp : 2 * fp;

    auto build = [&](const std::vector<SplitEntry>& entries) {
        Dataset ds;
        ds.x = FeatureMatrix(entries.size(), d_in);
        ds.y.reserve(entries.size());
        for (std::size_t r = 0; r < entries.size(); ++r) {
            const auto& e = entries[r];
            if (e.u >= agg.n || (link && e.v >= agg.n)) {
                throw InputError("assemble_inputs: split index out of range");
            }
            double* row = ds.x.values.data() + r * d_in;
            const double* re_u = agg.real.values.data() + static_cast<std::size_t>(e.u) * fp;
            const double* im_u = agg.imag.values.data() + static_cast<std::size_t>(e.u) * fp;
            std::copy(re_u, re_u + fp, row);
            std::copy(im_u, im_u + fp, row + fp);
            if (link) {
                const double* re_v = agg.real.values.data() + static_cast<std::size_t>(e.v) * fp;
                const double* im_v = agg.imag.values.data() + static_cast<std::size_t>(e.v) * fp;
                std::copy(re_v, re_v + fp, row + 2 * fp);
                std::copy(im_v, im_v + fp, row + 3 * fp);
            }
            ds.y.push_back(e.label);
        }
        return ds;
    };

    AssembledData data;
    data.width = d_in;
    data.num_classes = split.num_classes;
    data.train = build(split.train);
    data.val = build(split.val);
    data.test = build(split.test);
    return data;
}

namespace {

void forward_row(const LinearModel& model, const double* row, double* logits) {
    const auto& kern = kernels::active();
    for (std::size_t c = 0; c < model.num_classes; ++c) {
        logits[c] = kern.dot(row, model.weights.data() + c * model.d_in, model.d_in);
        if (model.has_bias) logits[c] += model.bias[c];
    }
}

/// log(sum exp(z)) with the max factored out; also yields probabilities.
double softmax_row(const double* logits, std::size_t c, double* probs) {
    double zmax = logits[0];
    for (std::size_t i = 1; i < c; ++i) zmax = std::max(zmax, logits[i]);
    double denom = 0.0;
    for (std::size_t i = 0; i < c; ++i) denom += std::exp(logits[i] - zmax);
    for (std::size_t i = 0; i < c; ++i) probs[i] = std::exp(logits[i] - zmax) / denom;
    return std::log(denom) + zmax;
}

} // namespace

FeatureMatrix forward(const LinearModel& model, const FeatureMatrix& x) {
    if (x.cols != model.d_in) throw InputError("forward: input width != d_in");
    FeatureMatrix probs(x.rows, model.num_classes);
    std::vector<double> logits(model.num_classes);
    for (std::size_t r = 0; r < x.rows; ++r) {
        forward_row(model, x.values.data() + r * x.cols, logits.data());
        softmax_row(logits.data(), model.num_classes, probs.values.data() + r * model.num_classes);
    }
    return probs;
}

double loss_and_gradient(const LinearModel& model, const FeatureMatrix& x,
                         std::span<const std::int64_t> y, double weight_decay,
                         std::vector<double>& grad_w, std::vector<double>& grad_b) {
    const std::size_t rows = x.rows;
    const std::size_t c = model.num_classes;
    const std::size_t d = model.d_in;
    grad_w.assign(d * c, 0.0);
    grad_b.assign(c, 0.0);

    const auto& kern = kernels::active();
    std::vector<double> logits(c), probs(c);
    double ce_sum = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = x.values.data() + r * d;
        forward_row(model, row, logits.data());
        const double lse = softmax_row(logits.data(), c, probs.data());
        const auto label = static_cast<std::size_t>(y[r]);
        ce_sum += lse - logits[label];
        for (std::size_t k = 0; k < c; ++k) {
            const double delta = probs[k] - (k == label ? 1.0 : 0.0);
            kern.axpy(delta, row, grad_w.data() + k * d, d);
            grad_b[k] += delta;
        }
    }
    const double inv = rows > 0 ? 1.0 / static_cast<double>(rows) : 0.0;
    double reg = 0.0;
    for (std::size_t i = 0; i < d * c; ++i) {
        grad_w[i] = grad_w[i] * inv + weight_decay * model.weights[i];
        reg += model.weights[i] * model.weights[i];
    }
    for (std::size_t k = 0; k < c; ++k) grad_b[k] *= inv;
    return ce_sum * inv + 0.5 * weight_decay * reg;
}

TrainResult train(LinearModel model, const Dataset& train_set, const Dataset* val_set,
                  const TrainConfig& config) {
    config.validate();
    if (train_set.x.cols != model.d_in) throw InputError("train: design width != d_in");
    for (std::int64_t label : train_set.y) {
        if (label < 0 || static_cast<std::size_t>(label) >= model.num_classes) {
            throw InputError("train: label out of range");
        }
    }

    const std::size_t n = train_set.size();
    const std::size_t c = model.num_classes;
    const std::size_t d = model.d_in;

    TrainResult result;
    Rng rng(config.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    LinearModel best = model;
    double best_val_acc = -1.0;
    std::size_t best_epoch = 0;
    std::size_t stall = 0;
    const bool early_stop = val_set != nullptr && val_set->size() > 0 && config.patience > 0;

    const auto& kern = kernels::active();
    FeatureMatrix batch_x;
    std::vector<std::int64_t> batch_y;
    std::vector<double> grad_w, grad_b;

    std::size_t epoch = 0;
    for (; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_ce = 0.0;
        const double reg_at_start = 0.5 * config.weight_decay *
                                    model.frobenius_norm() * model.frobenius_norm();

        for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
            const std::size_t end = std::min(begin + config.batch_size, n);
            const std::size_t rows = end - begin;
            batch_x = FeatureMatrix(rows, d);
            batch_y.resize(rows);
            for (std::size_t i = 0; i < rows; ++i) {
                const std::size_t src = order[begin + i];
                std::copy(train_set.x.values.data() + src * d,
                          train_set.x.values.data() + (src + 1) * d,
                          batch_x.values.data() + i * d);
                batch_y[i] = train_set.y[src];
            }
            const double loss = loss_and_gradient(model, batch_x, batch_y,
                                                  config.weight_decay, grad_w, grad_b);
            if (!std::isfinite(loss)) {
                throw NumericError("training diverged (non-finite loss) at epoch " +
                                   std::to_string(epoch));
            }
            epoch_ce += (loss - 0.5 * config.weight_decay * model.frobenius_norm() *
                                    model.frobenius_norm()) *
                        static_cast<double>(rows);
            kern.axpy(-config.learning_rate, grad_w.data(), model.weights.data(), d * c);
            if (model.has_bias) {
                kern.axpy(-config.learning_rate, grad_b.data(), model.bias.data(), c);
            }
        }
        result.per_epoch_loss.push_back(n > 0 ? epoch_ce / static_cast<double>(n) + reg_at_start
                                              : reg_at_start);

        if (early_stop) {
            const FeatureMatrix val_probs = forward(model, val_set->x);
            std::size_t hits = 0;
            for (std::size_t r = 0; r < val_set->size(); ++r) {
                const double* p = val_probs.values.data() + r * c;
                std::size_t arg = 0;
                for (std::size_t k = 1; k < c; ++k) {
                    if (p[k] > p[arg]) arg = k;
                }
                if (static_cast<std::int64_t>(arg) == val_set->y[r]) ++hits;
            }
            const double acc = static_cast<double>(hits) / static_cast<double>(val_set->size());
            if (acc > best_val_acc) {
                best_val_acc = acc;
                best = model;
                best_epoch = epoch;
                stall = 0;
            } else if (++stall >= config.patience) {
                ++epoch;
                break;
            }
        }
    }

    result.epochs_run = epoch;
    if (early_stop && best_val_acc >= 0.0) {
        result.model = std::move(best);
        result.best_epoch = best_epoch;
    } else {
        result.model = std::move(model);
        result.best_epoch = epoch == 0 ? 0 : epoch - 1;
    }
    return result;
}

MetricsReport evaluate(const LinearModel& model, const Dataset& data, TaskKind task_kind) {
    if (data.size() == 0) throw InputError("evaluate: empty evaluation set");
    const FeatureMatrix probs = forward(model, data.x);
    const std::size_t c = model.num_classes;

    std::vector<std::int64_t> predicted(data.size());
    for (std::size_t r = 0; r < data.size(); ++r) {
        const double* p = probs.values.data() + r * c;
        std::size_t arg = 0;
        for (std::size_t k = 1; k < c; ++k) {
            if (p[k] > p[arg]) arg = k;
        }
        predicted[r] = static_cast<std::int64_t>(arg);
    }

    MetricsReport report;
    report.accuracy = metrics::accuracy(predicted, data.y);
    report.macro_f1 = metrics::macro_f1(predicted, data.y, c);
    (void)task_kind;
    if (c == 2) {
        std::vector<double> scores(data.size());
        for (std::size_t r = 0; r < data.size(); ++r) {
            scores[r] = probs.values[r * c + 1];
        }
        report.auc = metrics::auc(scores, data.y);
    }
    return report;
}

namespace metrics {

double accuracy(std::span<const std::int64_t> predicted, std::span<const std::int64_t> truth) {
    if (predicted.size() != truth.size() || truth.empty()) {
        throw InputError("accuracy: size mismatch or empty input");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] == truth[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double macro_f1(std::span<const std::int64_t> predicted, std::span<const std::int64_t> truth,
                std::size_t num_classes) {
    if (predicted.size() != truth.size() || truth.empty() || num_classes == 0) {
        throw InputError("macro_f1: bad input");
    }
    std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto t = static_cast<std::size_t>(truth[i]);
        const auto p = static_cast<std::size_t>(predicted[i]);
        if (p == t) {
            ++tp[t];
        } else {
            ++fp[p];
            ++fn[t];
        }
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < num_classes; ++k) {
        const double denom_p = static_cast<double>(tp[k] + fp[k]);
        const double denom_r = static_cast<double>(tp[k] + fn[k]);
        const double precision = denom_p > 0.0 ? static_cast<double>(tp[k]) / denom_p : 0.0;
        const double recall = denom_r > 0.0 ? static_cast<double>(tp[k]) / denom_r : 0.0;
        sum += (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    }
    return sum / static_cast<double>(num_classes);
}

double auc(std::span<const double> scores, std::span<const std::int64_t> labels) {
    if (scores.size() != labels.size() || labels.empty()) {
        throw InputError("auc: size mismatch or empty input");
    }
    // rank statistic with average ranks over tied scores; equals brute-force
    // pair counting with ties worth one half
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
        return scores[a] < scores[b];
    });

    double rank_sum_pos = 0.0;
    std::size_t positives = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        // tie group occupies ranks i+1 .. j (1-based); everyone gets the mean
        const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) {
                rank_sum_pos += mean_rank;
                ++positives;
            }
        }
        i = j;
    }
    const std::size_t negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw InputError("auc: needs both positive and negative labels");
    }
    const double p = static_cast<double>(positives);
    const double n = static_cast<double>(negatives);
    return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n);
}

} // namespace metrics

} // namespace lightdic
