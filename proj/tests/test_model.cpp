#include <doctest.h>

#include "lightdic/errors.hpp"
#include "lightdic/model.hpp"
#include "lightdic/rng.hpp"

#include <cmath>

using namespace lightdic;

namespace {

/// Two well-separated Gaussian blobs; linearly separable by construction.
Dataset gaussian_blobs(std::size_t per_class, std::size_t dim, double distance,
                       std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.x = FeatureMatrix(2 * per_class, dim);
    ds.y.resize(2 * per_class);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const std::int64_t label = i < per_class ? 0 : 1;
        ds.y[i] = label;
        for (std::size_t j = 0; j < dim; ++j) {
            const double center = (label == 0 ? -distance : distance);
            ds.x.at(i, j) = center + rng.normal();
        }
    }
    return ds;
}

AggregatedFeatures tiny_agg(std::size_t n, std::size_t width, std::uint64_t seed) {
    Rng rng(seed);
    AggregatedFeatures agg;
    agg.n = n;
    agg.width = width;
    agg.real = FeatureMatrix(n, width);
    agg.imag = FeatureMatrix(n, width);
    for (double& v : agg.real.values) v = rng.normal();
    for (double& v : agg.imag.values) v = rng.normal();
    return agg;
}

} // namespace

TEST_CASE("assemble_inputs widths: 2f' for nodes, 4f' for links") {
    const auto agg = tiny_agg(6, 3, 1);

    TaskSplit node_split;
    node_split.task_kind = TaskKind::NodeClassification;
    node_split.num_classes = 2;
    node_split.num_nodes = 6;
    node_split.train = {{0, 0, 0}, {1, 0, 1}};
    node_split.val = {{2, 0, 0}};
    node_split.test = {{3, 0, 1}};
    const auto node_data = assemble_inputs(agg, node_split);
    CHECK(node_data.width == 6);
    // row layout [real_u | imag_u]
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(node_data.train.x.at(0, j) == agg.real.at(0, j));
        CHECK(node_data.train.x.at(0, 3 + j) == agg.imag.at(0, j));
    }

    TaskSplit link_split;
    link_split.task_kind = TaskKind::LinkExistence;
    link_split.num_classes = 2;
    link_split.num_nodes = 6;
    link_split.train = {{0, 1, 1}, {1, 0, 1}};
    link_split.val = {{2, 3, 0}};
    link_split.test = {{4, 5, 0}};
    const auto link_data = assemble_inputs(agg, link_split);
    CHECK(link_data.width == 12);

    // (u,v) and (v,u) rows are block-swapped permutations of each other
    for (std::size_t j = 0; j < 6; ++j) {
        CHECK(link_data.train.x.at(0, j) == link_data.train.x.at(1, 6 + j));
        CHECK(link_data.train.x.at(0, 6 + j) == link_data.train.x.at(1, j));
    }
}

TEST_CASE("assemble_inputs rejects out-of-range indices") {
    const auto agg = tiny_agg(4, 2, 2);
    TaskSplit split;
    split.task_kind = TaskKind::NodeClassification;
    split.num_classes = 2;
    split.num_nodes = 9;
    split.train = {{8, 0, 0}};
    split.val = {{0, 0, 0}};
    split.test = {{1, 0, 0}};
    CHECK_THROWS_AS(assemble_inputs(agg, split), InputError);
}

TEST_CASE("zero model yields uniform probabilities") {
    const auto model = LinearModel::zeros(4, 5);
    FeatureMatrix x(3, 4);
    Rng rng(3);
    for (double& v : x.values) v = rng.normal();
    const auto probs = forward(model, x);
    for (double p : probs.values) CHECK(p == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("softmax survives extreme logits and rows sum to one") {
    LinearModel model = LinearModel::zeros(1, 2);
    model.weights = {1000.0, 0.0}; // logits (1000 x, 0)
    FeatureMatrix x(1, 1);
    x.values[0] = 1.0;
    const auto probs = forward(model, x);
    CHECK(probs.values[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(probs.values[1] == doctest::Approx(0.0).epsilon(1e-15));

    Rng rng(4);
    LinearModel rnd = LinearModel::zeros(6, 4);
    for (double& w : rnd.weights) w = 3.0 * rng.normal();
    for (double& b : rnd.bias) b = rng.normal();
    FeatureMatrix xs(50, 6);
    for (double& v : xs.values) v = rng.normal();
    const auto p = forward(rnd, xs);
    for (std::size_t r = 0; r < 50; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 4; ++c) sum += p.at(r, c);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("softmax is shift invariant") {
    LinearModel a = LinearModel::zeros(2, 3);
    a.weights = {1.0, -2.0, 0.5, 0.25, -1.0, 2.0};
    LinearModel b = a;
    for (std::size_t c = 0; c < 3; ++c) b.bias[c] += 7.5; // constant shift per row
    FeatureMatrix x(4, 2);
    Rng rng(5);
    for (double& v : x.values) v = rng.normal();
    const auto pa = forward(a, x);
    const auto pb = forward(b, x);
    for (std::size_t i = 0; i < pa.values.size(); ++i) {
        CHECK(pa.values[i] == doctest::Approx(pb.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("separable blobs train to >= 0.99 accuracy within 200 epochs") {
    const auto ds = gaussian_blobs(50, 2, 2.0, 9);
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.epochs = 200;
    cfg.seed = 1;
    auto result = train(LinearModel::zeros(2, 2), ds, nullptr, cfg);
    const auto report = evaluate(result.model, ds, TaskKind::NodeClassification);
    CHECK(report.accuracy >= 0.99);
    CHECK(report.per_epoch_loss.empty());
    CHECK(result.per_epoch_loss.size() == 200);
}

TEST_CASE("overwhelming weight decay crushes the weights") {
    const auto ds = gaussian_blobs(20, 2, 2.0, 10);
    TrainConfig cfg;
    cfg.learning_rate = 1e-7; // lr * wd <= 1 keeps the shrink stable
    cfg.weight_decay = 1e6;
    cfg.epochs = 300;
    auto result = train(LinearModel::zeros(2, 2), ds, nullptr, cfg);
    CHECK(result.model.frobenius_norm() <= 1e-2);
}

TEST_CASE("zero epochs leaves the model untouched") {
    const auto ds = gaussian_blobs(10, 3, 1.0, 11);
    TrainConfig cfg;
    cfg.epochs = 0;
    LinearModel init = LinearModel::zeros(3, 2);
    init.weights[0] = 0.5;
    const auto result = train(init, ds, nullptr, cfg);
    CHECK(result.model.weights == init.weights);
    CHECK(result.per_epoch_loss.empty());
}

TEST_CASE("training diverging to NaN raises a NumericError naming the epoch") {
    Dataset ds = gaussian_blobs(10, 2, 2.0, 12);
    for (double& v : ds.x.values) v *= 1e150; // overflow fodder
    TrainConfig cfg;
    cfg.learning_rate = 1e200;
    cfg.epochs = 5;
    CHECK_THROWS_WITH_AS(train(LinearModel::zeros(2, 2), ds, nullptr, cfg),
                         doctest::Contains("epoch"), NumericError);
}

TEST_CASE("full-batch loss is non-increasing at small learning rates") {
    const auto ds = gaussian_blobs(30, 3, 1.0, 13);
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.batch_size = 1000; // full batch
    cfg.epochs = 150;
    const auto result = train(LinearModel::zeros(3, 2), ds, nullptr, cfg);
    for (std::size_t e = 1; e < result.per_epoch_loss.size(); ++e) {
        CHECK(result.per_epoch_loss[e] <= result.per_epoch_loss[e - 1] + 1e-12);
    }
}

TEST_CASE("training is bit-deterministic per seed") {
    const auto ds = gaussian_blobs(25, 4, 1.5, 14);
    TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.epochs = 40;
    cfg.batch_size = 16;
    cfg.seed = 77;
    const auto a = train(LinearModel::zeros(4, 2), ds, nullptr, cfg);
    const auto b = train(LinearModel::zeros(4, 2), ds, nullptr, cfg);
    CHECK(a.model.weights == b.model.weights);
    CHECK(a.model.bias == b.model.bias);
    CHECK(a.per_epoch_loss == b.per_epoch_loss);
}

TEST_CASE("early stopping returns the best validation snapshot") {
    const auto train_set = gaussian_blobs(40, 2, 2.0, 15);
    const auto val_set = gaussian_blobs(15, 2, 2.0, 16);
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.epochs = 500;
    cfg.patience = 10;
    const auto result = train(LinearModel::zeros(2, 2), train_set, &val_set, cfg);
    CHECK(result.epochs_run < 500); // separable: stalls long before the cap
    const auto report = evaluate(result.model, val_set, TaskKind::NodeClassification);
    CHECK(report.accuracy >= 0.95);
}

TEST_CASE("perfect predictions score 1.0 on every metric") {
    Dataset ds;
    ds.x = FeatureMatrix(4, 2);
    ds.x.values = {5.0, 0.0, 4.0, 0.0, 0.0, 5.0, 0.0, 4.0};
    ds.y = {0, 0, 1, 1};
    LinearModel model = LinearModel::zeros(2, 2);
    model.weights = {1.0, 0.0, 0.0, 1.0};
    const auto report = evaluate(model, ds, TaskKind::LinkExistence);
    CHECK(report.accuracy == 1.0);
    CHECK(report.macro_f1 == 1.0);
    REQUIRE(report.auc.has_value());
    CHECK(*report.auc == 1.0);
}

TEST_CASE("AUC on the worked four-point example is 0.75") {
    const std::vector<double> scores{0.9, 0.8, 0.3, 0.1};
    const std::vector<std::int64_t> labels{1, 0, 1, 0};
    CHECK(metrics::auc(scores, labels) == 0.75);
}

TEST_CASE("constant predictor scores 0.5 accuracy and 0.5 AUC on balanced labels") {
    Dataset ds;
    ds.x = FeatureMatrix(10, 2); // all-zero features
    ds.y = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    const auto model = LinearModel::zeros(2, 2);
    const auto report = evaluate(model, ds, TaskKind::LinkDirection);
    CHECK(report.accuracy == 0.5);
    REQUIRE(report.auc.has_value());
    CHECK(*report.auc == 0.5);
}

TEST_CASE("macro-F1 counts absent classes as zero") {
    // class 2 never appears in prediction or truth
    const std::vector<std::int64_t> pred{0, 0, 1, 1};
    const std::vector<std::int64_t> truth{0, 1, 1, 0};
    const double f1 = metrics::macro_f1(pred, truth, 3);
    // per-class F1 = 0.5, 0.5, 0.0 -> macro 1/3
    CHECK(f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("gradient matches central finite differences") {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t d = 3;
        const std::size_t c = 3;
        const std::size_t rows = 8;
        LinearModel model = LinearModel::zeros(d, c);
        for (double& w : model.weights) w = 0.3 * rng.normal();
        FeatureMatrix x(rows, d);
        for (double& v : x.values) v = rng.normal();
        std::vector<std::int64_t> y(rows);
        for (auto& label : y) label = static_cast<std::int64_t>(rng.uniform(c));

        std::vector<double> gw, gb, sw, sb;
        loss_and_gradient(model, x, y, 0.05, gw, gb);

        const double eps = 1e-5;
        for (std::size_t i = 0; i < gw.size(); ++i) {
            LinearModel probe = model;
            probe.weights[i] += eps;
            const double up = loss_and_gradient(probe, x, y, 0.05, sw, sb);
            probe.weights[i] -= 2 * eps;
            const double down = loss_and_gradient(probe, x, y, 0.05, sw, sb);
            const double fd = (up - down) / (2 * eps);
            CHECK(std::abs(gw[i] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
}
