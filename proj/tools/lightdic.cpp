// Pipeline driver for magnetic-Laplacian digraph representation learning.
//
// The three decoupled stages map onto subcommands:
//   precompute  - build the operator, propagate features, write the cache
//   train       - fit the linear head from the cache alone (no graph access)
//   eval        - score a saved checkpoint on a split subset
// plus `verify` (property suites), `sparsity` / `ablate-agg` (experiment
// harnesses) and `bench` (scaling measurements).
//
// Exit codes: 0 ok, 2 input error, 3 format/stale-cache error, 4 numeric
// error, 5 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include "lightdic/errors.hpp"
#include "lightdic/graph.hpp"
#include "lightdic/io.hpp"
#include "lightdic/model.hpp"
#include "lightdic/oracle.hpp"
#include "lightdic/propagation.hpp"
#include "lightdic/rng.hpp"
#include "lightdic/spectral_features.hpp"
#include "lightdic/split.hpp"
#include "lightdic/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <unistd.h>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace lightdic;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitFormat = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitVerifyFailed = 5;

struct PipelineConfig {
    std::string edges;
    std::string features;
    std::string labels;
    std::string task = "node";
    double q = 0.0;
    std::size_t steps = 2; // K
    std::string agg = "auto"; // task-dependent default, see resolve_aggregation
    double lr = 0.01;
    std::size_t batch_size = 5000;
    std::size_t epochs = 200;
    double weight_decay = 0.0;
    std::size_t patience = 50;
    bool no_bias = false;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::size_t per_class_train = 20;
    std::size_t val_count = 500;
    double train_frac = 0.80;
    double val_frac = 0.15;
    std::size_t spectral_k = 16;
    std::size_t spectral_iters = 200;
    std::optional<std::size_t> num_nodes;
    std::string cache_dir = "cache";
    std::string out;
    bool unsafe_ranges = false;
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void emit(const json& doc, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw InputError("cannot write output: " + out_path);
        out << doc.dump(2) << "\n";
    }
}

std::uint64_t fnv64(const void* data, std::size_t bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Advisory lock on a cache directory; create-or-fail, removed on scope exit.
class CacheLock {
public:
    explicit CacheLock(const fs::path& dir) : path_(dir / ".lightdic.lock") {
        fs::create_directories(dir);
        const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd < 0) {
            throw InputError("cache directory is locked (" + path_.string() +
                             " exists); remove it if no other instance is running");
        }
        ::close(fd);
    }
    ~CacheLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    CacheLock(const CacheLock&) = delete;
    CacheLock& operator=(const CacheLock&) = delete;

private:
    fs::path path_;
};

TaskKind parse_task(const std::string& name) {
    const auto kind = task_kind_from_name(name);
    if (!kind) throw InputError("unknown task: " + name);
    return *kind;
}

Aggregation parse_agg(const std::string& name) {
    Aggregation agg{};
    if (!aggregation_from_name(name, agg)) throw InputError("unknown aggregation: " + name);
    return agg;
}

/// "auto" picks the per-task default: Last for node classification, Concat
/// for three-class link prediction, Sum for existence/direction.
Aggregation resolve_aggregation(const std::string& name, TaskKind task) {
    if (name != "auto") return parse_agg(name);
    switch (task) {
        case TaskKind::NodeClassification: return Aggregation::Last;
        case TaskKind::LinkThreeClass: return Aggregation::Concat;
        case TaskKind::LinkExistence:
        case TaskKind::LinkDirection: return Aggregation::Sum;
    }
    return Aggregation::Last;
}

void check_ranges(const PipelineConfig& cfg) {
    if (!(cfg.q >= 0.0 && cfg.q <= 0.25)) {
        throw InputError("q must lie in [0, 0.25]");
    }
    if (cfg.unsafe_ranges) return;
    if (cfg.steps < 2 || cfg.steps > 10) {
        throw InputError("K outside the search range [2, 10]; pass --unsafe-ranges to override");
    }
    if (cfg.lr < 0.001 || cfg.lr > 0.1) {
        throw InputError("lr outside the search range [0.001, 0.1]; pass --unsafe-ranges to override");
    }
}

/// Applies `key = value` lines (flat namespace, # comments) onto the config.
void load_config_file(const std::string& path, PipelineConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InputError(path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "edges") cfg.edges = value;
            else if (key == "features") cfg.features = value;
            else if (key == "labels") cfg.labels = value;
            else if (key == "task") cfg.task = value;
            else if (key == "q") cfg.q = std::stod(value);
            else if (key == "K") cfg.steps = std::stoull(value);
            else if (key == "agg") cfg.agg = value;
            else if (key == "lr") cfg.lr = std::stod(value);
            else if (key == "batch_size") cfg.batch_size = std::stoull(value);
            else if (key == "epochs") cfg.epochs = std::stoull(value);
            else if (key == "weight_decay") cfg.weight_decay = std::stod(value);
            else if (key == "patience") cfg.patience = std::stoull(value);
            else if (key == "no_bias") cfg.no_bias = value == "true" || value == "1";
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "threads") cfg.threads = static_cast<unsigned>(std::stoul(value));
            else if (key == "per_class_train") cfg.per_class_train = std::stoull(value);
            else if (key == "val_count") cfg.val_count = std::stoull(value);
            else if (key == "train_frac") cfg.train_frac = std::stod(value);
            else if (key == "val_frac") cfg.val_frac = std::stod(value);
            else if (key == "spectral_k") cfg.spectral_k = std::stoull(value);
            else if (key == "spectral_iters") cfg.spectral_iters = std::stoull(value);
            else if (key == "num_nodes") cfg.num_nodes = std::stoull(value);
            else if (key == "cache_dir") cfg.cache_dir = value;
            else if (key == "out") cfg.out = value;
            else if (key == "unsafe_ranges") cfg.unsafe_ranges = value == "true" || value == "1";
            else throw InputError(path + ":" + std::to_string(line_no) + ": unknown key " + key);
        } catch (const std::invalid_argument&) {
            throw InputError(path + ":" + std::to_string(line_no) + ": bad value for " + key);
        }
    }
}

void take_last_everywhere(CLI::App* cmd) {
    for (CLI::Option* opt : cmd->get_options()) {
        opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
}

void add_pipeline_options(CLI::App* cmd, PipelineConfig& cfg) {
    cmd->add_option("--edges", cfg.edges, "Edge list file (u v per line)");
    cmd->add_option("--features", cfg.features, "LDCF feature file; omit to synthesize spectral features");
    cmd->add_option("--labels", cfg.labels, "LDCF i64 label file (node task)");
    cmd->add_option("--task", cfg.task, "node | existence | direction | link3");
    cmd->add_option("--q", cfg.q, "Phase parameter in [0, 0.25]");
    cmd->add_option("--K", cfg.steps, "Propagation steps");
    cmd->add_option("--agg", cfg.agg, "last | mean | sum | concat");
    cmd->add_option("--lr", cfg.lr, "Learning rate");
    cmd->add_option("--batch-size", cfg.batch_size, "Mini-batch size");
    cmd->add_option("--epochs", cfg.epochs, "Training epochs");
    cmd->add_option("--weight-decay", cfg.weight_decay, "L2 penalty on W");
    cmd->add_option("--patience", cfg.patience, "Early-stopping patience (0 = off)");
    cmd->add_flag("--no-bias", cfg.no_bias, "Drop the bias term (pure linear map)");
    cmd->add_option("--seed", cfg.seed, "Seed for every stochastic choice");
    cmd->add_option("--threads", cfg.threads, "Worker threads for propagation");
    cmd->add_option("--per-class-train", cfg.per_class_train, "Training nodes per class");
    cmd->add_option("--val-count", cfg.val_count, "Validation node count");
    cmd->add_option("--train-frac", cfg.train_frac, "Link-split train fraction");
    cmd->add_option("--val-frac", cfg.val_frac, "Link-split val fraction");
    cmd->add_option("--spectral-k", cfg.spectral_k, "Synthesized feature width");
    cmd->add_option("--spectral-iters", cfg.spectral_iters, "Power-iteration steps");
    cmd->add_option("--num-nodes", cfg.num_nodes, "Node-count override for the edge list");
    cmd->add_option("--cache-dir", cfg.cache_dir, "Cache directory");
    cmd->add_option("--out", cfg.out, "Output JSON path (default stdout)");
    cmd->add_flag("--unsafe-ranges", cfg.unsafe_ranges, "Allow K/lr outside the search ranges");
    static std::string config_sink;
    cmd->add_option("--config", config_sink, "Flat key = value config file (applied first)");
}

struct PreparedInputs {
    DirectedGraph graph;
    FeatureMatrix features;
    TaskSplit split;
    const DirectedGraph* propagation_graph = nullptr;
    std::uint64_t cache_key = 0;
};

std::vector<std::int64_t> load_node_labels(const PipelineConfig& cfg, std::size_t n,
                                           std::size_t& num_classes) {
    if (cfg.labels.empty()) throw InputError("node task requires --labels");
    auto labels = io::read_labels(cfg.labels);
    if (labels.size() != n) {
        throw InputError("label count " + std::to_string(labels.size()) +
                         " != node count " + std::to_string(n));
    }
    std::int64_t max_label = -1;
    for (std::int64_t label : labels) {
        if (label < 0) throw InputError("negative label in " + cfg.labels);
        max_label = std::max(max_label, label);
    }
    num_classes = static_cast<std::size_t>(max_label) + 1;
    return labels;
}

PreparedInputs prepare_inputs(const PipelineConfig& cfg) {
    if (cfg.edges.empty()) throw InputError("missing --edges");
    PreparedInputs prep;
    prep.graph = load_edge_list(cfg.edges, cfg.num_nodes);
    const std::size_t n = prep.graph.num_nodes();

    if (!cfg.features.empty()) {
        prep.features = io::read_features(cfg.features);
        if (prep.features.rows != n) {
            throw InputError("feature rows != node count");
        }
        prep.features.require_finite("input features");
    } else {
        if (cfg.spectral_k == 0) {
            throw InputError("--spectral-k must be at least 1 when no feature file is given");
        }
        prep.features = spectral_features(prep.graph, std::min(cfg.spectral_k, n),
                                          cfg.spectral_iters, cfg.seed);
    }

    const TaskKind task = parse_task(cfg.task);
    if (task == TaskKind::NodeClassification) {
        std::size_t num_classes = 0;
        const auto labels = load_node_labels(cfg, n, num_classes);
        prep.split = build_node_split(prep.graph, labels, num_classes, cfg.per_class_train,
                                      cfg.val_count, cfg.seed);
        prep.propagation_graph = &prep.graph;
    } else {
        prep.split = build_link_split(prep.graph, task, cfg.train_frac, cfg.val_frac, cfg.seed);
        prep.propagation_graph = &*prep.split.propagation_graph;
    }

    // cache key: configuration + graph + feature content
    std::uint64_t h = prep.graph.fingerprint();
    h = fnv64(&cfg.q, sizeof cfg.q, h);
    h = fnv64(&cfg.steps, sizeof cfg.steps, h);
    const auto agg = resolve_aggregation(cfg.agg, task);
    h = fnv64(&agg, 1, h);
    const auto task_tag = static_cast<std::uint8_t>(task);
    h = fnv64(&task_tag, 1, h);
    h = fnv64(&cfg.seed, sizeof cfg.seed, h);
    h = fnv64(&cfg.per_class_train, sizeof cfg.per_class_train, h);
    h = fnv64(&cfg.val_count, sizeof cfg.val_count, h);
    h = fnv64(&cfg.train_frac, sizeof cfg.train_frac, h);
    h = fnv64(&cfg.val_frac, sizeof cfg.val_frac, h);
    h = fnv64(prep.features.values.data(), prep.features.values.size() * sizeof(double), h);
    prep.cache_key = h;
    return prep;
}

/// The split file also records which cache it belongs to, so training can
/// detect stale caches without ever touching the graph.
void save_split_with_fingerprint(const TaskSplit& split, std::uint64_t cache_fingerprint,
                                 const std::string& path) {
    save_split(split, path);
    std::ofstream out(path, std::ios::app);
    out << "# cache_fingerprint " << cache_fingerprint << '\n';
}

std::optional<std::uint64_t> read_split_fingerprint(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        const std::string prefix = "# cache_fingerprint ";
        if (line.rfind(prefix, 0) == 0) {
            return std::stoull(line.substr(prefix.size()));
        }
    }
    return std::nullopt;
}

json metrics_to_json(const MetricsReport& report) {
    json j;
    j["accuracy"] = report.accuracy;
    j["macro_f1"] = report.macro_f1;
    if (report.auc) j["auc"] = *report.auc;
    return j;
}

struct TrainOutput {
    json metrics;
    LinearModel model;
    double seconds = 0.0;
};

TrainOutput run_training(const AggregatedFeatures& agg, const TaskSplit& split,
                         const PipelineConfig& cfg) {
    const auto data = assemble_inputs(agg, split);
    TrainConfig tc;
    tc.learning_rate = cfg.lr;
    tc.batch_size = cfg.batch_size;
    tc.epochs = cfg.epochs;
    tc.weight_decay = cfg.weight_decay;
    tc.seed = cfg.seed;
    tc.patience = cfg.patience;

    const double t0 = now_seconds();
    auto result = train(LinearModel::zeros(data.width, data.num_classes, !cfg.no_bias),
                        data.train, &data.val, tc);
    const double seconds = now_seconds() - t0;

    const TaskKind task = split.task_kind;
    json metrics;
    metrics["train"] = metrics_to_json(evaluate(result.model, data.train, task));
    metrics["val"] = metrics_to_json(evaluate(result.model, data.val, task));
    metrics["test"] = metrics_to_json(evaluate(result.model, data.test, task));
    metrics["per_epoch_loss"] = result.per_epoch_loss;
    metrics["epochs_run"] = result.epochs_run;
    metrics["best_epoch"] = result.best_epoch;
    return {std::move(metrics), std::move(result.model), seconds};
}

json config_echo(const PipelineConfig& cfg, TaskKind task) {
    json j;
    j["task"] = task_kind_name(task);
    j["q"] = cfg.q;
    j["K"] = cfg.steps;
    j["agg"] = aggregation_name(resolve_aggregation(cfg.agg, task));
    j["lr"] = cfg.lr;
    j["batch_size"] = cfg.batch_size;
    j["epochs"] = cfg.epochs;
    j["weight_decay"] = cfg.weight_decay;
    j["seed"] = cfg.seed;
    return j;
}

// ---------------------------------------------------------------------------

int cmd_precompute(const PipelineConfig& cfg, const std::string& dump_mgo) {
    check_ranges(cfg);
    const fs::path cache_dir = cfg.cache_dir;
    CacheLock lock(cache_dir);

    const double t0 = now_seconds();
    PreparedInputs prep = prepare_inputs(cfg);

    const std::string stem = hex16(prep.cache_key);
    const fs::path cache_path = cache_dir / (stem + ".ldcp");
    const fs::path split_path = cache_dir / (stem + ".split");
    const std::uint64_t prop_fingerprint = prep.propagation_graph->fingerprint();

    json out;
    out["cache"] = cache_path.string();
    out["split"] = split_path.string();
    out["n"] = prep.graph.num_nodes();
    out["m"] = prep.graph.num_edges();

    bool hit = false;
    if (fs::exists(cache_path) && fs::exists(split_path)) {
        const auto header = io::read_cache_header(cache_path.string());
        hit = header.graph_fingerprint == prop_fingerprint;
    }
    out["cache_hit"] = hit;

    if (!hit) {
        PropagationConfig pc;
        pc.q = cfg.q;
        pc.steps = cfg.steps;
        pc.aggregation = resolve_aggregation(cfg.agg, prep.split.task_kind);
        auto agg = propagate_aggregate(*prep.propagation_graph, prep.features, pc, cfg.threads);
        io::write_cache(agg, cache_path.string());
        save_split_with_fingerprint(prep.split, prop_fingerprint, split_path.string());
        out["f_prime"] = agg.width;
    } else {
        out["f_prime"] = io::read_cache_header(cache_path.string()).width;
    }

    if (!dump_mgo.empty()) {
        io::write_matrix(magnetic_graph_operator(*prep.propagation_graph, cfg.q), dump_mgo);
        out["mgo_dump"] = dump_mgo;
    }

    const double seconds = now_seconds() - t0;
    out["preprocess_seconds"] = seconds;
    std::cerr << "precompute: " << (hit ? "cache hit" : "built") << " in " << seconds << " s\n";
    emit(out, cfg.out);
    return kExitOk;
}

int cmd_train(const PipelineConfig& cfg, const std::string& cache_path,
              const std::string& split_path, const std::string& model_out) {
    if (!cfg.unsafe_ranges && (cfg.lr < 0.001 || cfg.lr > 0.1)) {
        throw InputError("lr outside the search range [0.001, 0.1]; pass --unsafe-ranges to override");
    }
    // decoupling contract: this command reads the cache and split files only
    const auto split = load_split(split_path);
    const auto expected = read_split_fingerprint(split_path);
    AggregatedFeatures agg = expected ? io::read_cache_checked(cache_path, *expected)
                                      : io::read_cache(cache_path);

    auto output = run_training(agg, split, cfg);

    const std::string checkpoint =
        model_out.empty() ? (fs::path(cache_path).replace_extension(".ldcw").string()) : model_out;
    io::write_model(output.model, checkpoint);

    json out;
    out["config"] = config_echo(cfg, split.task_kind);
    out["config"]["q"] = agg.config.q;
    out["config"]["K"] = agg.config.steps;
    out["config"]["agg"] = aggregation_name(agg.config.aggregation);
    out["checkpoint"] = checkpoint;
    out["metrics"] = std::move(output.metrics);
    std::cerr << "train: " << output.seconds << " s\n";
    emit(out, cfg.out);
    return kExitOk;
}

int cmd_eval(const PipelineConfig& cfg, const std::string& cache_path,
             const std::string& split_path, const std::string& model_path,
             const std::string& subset) {
    const auto split = load_split(split_path);
    const auto expected = read_split_fingerprint(split_path);
    AggregatedFeatures agg = expected ? io::read_cache_checked(cache_path, *expected)
                                      : io::read_cache(cache_path);
    const auto model = io::read_model(model_path);
    const auto data = assemble_inputs(agg, split);

    const Dataset* ds = nullptr;
    if (subset == "train") ds = &data.train;
    else if (subset == "val") ds = &data.val;
    else if (subset == "test") ds = &data.test;
    else throw InputError("unknown subset: " + subset);

    json out;
    out["subset"] = subset;
    out["metrics"] = metrics_to_json(evaluate(model, *ds, split.task_kind));
    emit(out, cfg.out);
    return kExitOk;
}

int cmd_verify(std::size_t scale, std::size_t trials, std::uint64_t seed,
               const std::string& out_path) {
    if (scale > 64) throw InputError("verify scale is capped at 64");
    if (trials == 0) {
        std::cerr << "warning: trials = 0, every check passes vacuously\n";
    }
    verify::VerifyOptions opt;
    opt.scale = scale;
    opt.trials = trials;
    opt.seed = seed;

    const auto results = verify::run_all(opt);
    bool all_passed = true;
    json checks = json::array();
    for (const auto& r : results) {
        json c;
        c["name"] = r.name;
        c["passed"] = r.passed;
        c["cases"] = r.cases;
        c["skipped"] = r.skipped;
        c["worst"] = r.worst;
        c["threshold"] = r.threshold;
        if (!r.detail.empty()) c["detail"] = r.detail;
        checks.push_back(std::move(c));
        all_passed = all_passed && r.passed;
    }
    json out;
    out["scale"] = scale;
    out["trials"] = trials;
    out["seed"] = seed;
    out["checks"] = std::move(checks);
    out["all_passed"] = all_passed;
    emit(out, out_path);
    return all_passed ? kExitOk : kExitVerifyFailed;
}

int cmd_sparsity(const PipelineConfig& cfg, const std::string& axis,
                 const std::vector<double>& levels) {
    check_ranges(cfg);
    if (parse_task(cfg.task) != TaskKind::NodeClassification) {
        throw InputError("sparsity harness runs the node-classification task");
    }
    if (levels.empty()) throw InputError("no sparsity levels given");
    if (axis != "feature" && axis != "edge" && axis != "label") {
        throw InputError("axis must be feature, edge or label");
    }
    if (axis != "label") {
        for (double level : levels) {
            if (!(level >= 0.0 && level <= 1.0)) {
                throw InputError("sparsity level outside [0, 1]");
            }
        }
    }
    CacheLock lock(fs::path(cfg.cache_dir));

    const DirectedGraph base_graph = load_edge_list(cfg.edges, cfg.num_nodes);
    const std::size_t n = base_graph.num_nodes();
    std::size_t num_classes = 0;
    const auto labels = load_node_labels(cfg, n, num_classes);
    FeatureMatrix base_features;
    if (!cfg.features.empty()) {
        base_features = io::read_features(cfg.features);
        if (base_features.rows != n) throw InputError("feature rows != node count");
    } else {
        base_features = spectral_features(base_graph, std::min(cfg.spectral_k, n),
                                          cfg.spectral_iters, cfg.seed);
    }

    json rows = json::array();
    for (const double level : levels) {
        DirectedGraph graph = base_graph;
        FeatureMatrix features = base_features;
        std::size_t per_class = cfg.per_class_train;

        if (axis == "edge" && level > 0.0) {
            auto edges = base_graph.edge_list();
            Rng edge_rng(cfg.seed + 1);
            edge_rng.shuffle(edges);
            const auto keep =
                static_cast<std::size_t>(std::llround((1.0 - level) * static_cast<double>(edges.size())));
            edges.resize(keep);
            graph = DirectedGraph(n, std::move(edges));
        } else if (axis == "label") {
            per_class = static_cast<std::size_t>(level);
            if (per_class == 0) throw InputError("label level must be >= 1");
        }

        auto split = build_node_split(graph, labels, num_classes, per_class, cfg.val_count, cfg.seed);

        if (axis == "feature" && level > 0.0) {
            std::vector<char> labeled(n, 0);
            for (const auto& e : split.train) labeled[e.u] = 1;
            std::vector<NodeId> unlabeled;
            for (NodeId u = 0; u < n; ++u) {
                if (!labeled[u]) unlabeled.push_back(u);
            }
            Rng feat_rng(cfg.seed + 2);
            feat_rng.shuffle(unlabeled);
            const auto zap =
                static_cast<std::size_t>(std::llround(level * static_cast<double>(unlabeled.size())));
            for (std::size_t i = 0; i < zap; ++i) {
                auto row = features.row(unlabeled[i]);
                std::fill(row.begin(), row.end(), 0.0);
            }
        }

        PropagationConfig pc;
        pc.q = cfg.q;
        pc.steps = cfg.steps;
        pc.aggregation = resolve_aggregation(cfg.agg, TaskKind::NodeClassification);
        const auto agg = propagate_aggregate(graph, features, pc, cfg.threads);
        auto output = run_training(agg, split, cfg);

        json row;
        row["level"] = level;
        row["metrics"] = std::move(output.metrics);
        rows.push_back(std::move(row));
    }

    json out;
    out["axis"] = axis;
    out["config"] = config_echo(cfg, TaskKind::NodeClassification);
    out["levels"] = std::move(rows);
    emit(out, cfg.out);
    return kExitOk;
}

int cmd_ablate_agg(const PipelineConfig& cfg) {
    check_ranges(cfg);
    CacheLock lock(fs::path(cfg.cache_dir));
    PreparedInputs prep = prepare_inputs(cfg);

    json rows = json::array();
    for (const char* mode : {"last", "mean", "sum", "concat"}) {
        PropagationConfig pc;
        pc.q = cfg.q;
        pc.steps = cfg.steps;
        pc.aggregation = parse_agg(mode);
        const auto agg = propagate_aggregate(*prep.propagation_graph, prep.features, pc, cfg.threads);
        auto output = run_training(agg, prep.split, cfg);
        json row;
        row["agg"] = mode;
        row["metrics"] = std::move(output.metrics);
        rows.push_back(std::move(row));
    }

    json out;
    out["config"] = config_echo(cfg, prep.split.task_kind);
    out["modes"] = std::move(rows);
    emit(out, cfg.out);
    return kExitOk;
}

int cmd_bench(const PipelineConfig& cfg, const std::string& kind, std::size_t n, std::size_t m,
              std::size_t f, std::size_t bench_epochs) {
    PropagationConfig pc;
    pc.q = cfg.q;
    pc.steps = cfg.steps;
    pc.aggregation = resolve_aggregation(cfg.agg, TaskKind::NodeClassification);
    pc.validate();

    auto synth_features = [&](std::size_t rows) {
        Rng rng(cfg.seed + 7);
        FeatureMatrix x(rows, f);
        for (double& v : x.values) v = rng.normal();
        return x;
    };

    auto median3 = [](auto&& fn) {
        double times[3];
        for (double& t : times) {
            const double t0 = now_seconds();
            fn();
            t = now_seconds() - t0;
        }
        std::sort(std::begin(times), std::end(times));
        return times[1];
    };

    json out;
    out["kind"] = kind;
    out["n"] = n;
    out["m"] = m;
    out["f"] = f;
    out["K"] = pc.steps;

    if (kind == "prop") {
        const auto g1 = generate_random_digraph(n, m, cfg.seed);
        const auto g2 = generate_random_digraph(n, 2 * m, cfg.seed + 1);
        const auto x = synth_features(n);
        const double t1 = median3([&] { propagate_aggregate(g1, x, pc, cfg.threads); });
        const double t2 = median3([&] { propagate_aggregate(g2, x, pc, cfg.threads); });
        out["seconds_m"] = t1;
        out["seconds_2m"] = t2;
        out["ratio"] = t2 / t1;
    } else if (kind == "train") {
        // caches from graphs at m and 2m edges have identical shapes, so the
        // training stage must not care which one it gets
        const auto x = synth_features(n);
        const auto g1 = generate_random_digraph(n, m, cfg.seed);
        const auto g2 = generate_random_digraph(n, 2 * m, cfg.seed + 1);
        const auto agg1 = propagate_aggregate(g1, x, pc, cfg.threads);
        const auto agg2 = propagate_aggregate(g2, x, pc, cfg.threads);

        // synthetic balanced labels; content does not matter for timing
        Rng rng(cfg.seed + 9);
        const std::size_t classes = 8;
        std::vector<std::int64_t> labels(n);
        for (auto& label : labels) label = static_cast<std::int64_t>(rng.uniform(classes));
        auto split1 = build_node_split(g1, labels, classes, std::min<std::size_t>(n / classes / 2, 1000),
                                       std::min<std::size_t>(n / 10, 2000), cfg.seed);

        TrainConfig tc;
        tc.learning_rate = cfg.lr;
        tc.batch_size = cfg.batch_size;
        tc.epochs = bench_epochs;
        tc.seed = cfg.seed;
        tc.patience = 0;

        auto epoch_time = [&](const AggregatedFeatures& agg) {
            const auto data = assemble_inputs(agg, split1);
            return median3([&] {
                       train(LinearModel::zeros(data.width, data.num_classes), data.train, nullptr, tc);
                   }) /
                   static_cast<double>(bench_epochs);
        };
        const double e1 = epoch_time(agg1);
        const double e2 = epoch_time(agg2);
        out["epoch_seconds_m"] = e1;
        out["epoch_seconds_2m"] = e2;
        out["ratio"] = e2 / e1;
    } else {
        throw InputError("bench kind must be prop or train");
    }
    emit(out, cfg.out);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Magnetic-Laplacian digraph learning pipeline"};
    app.require_subcommand(1);

    PipelineConfig cfg;
    if (const char* env_cache = std::getenv("LIGHTDIC_CACHE")) {
        cfg.cache_dir = env_cache;
    }

    // flat key=value config file, applied before flags so flags win
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    }
    try {
        if (!config_path.empty()) load_config_file(config_path, cfg);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    std::string config_path_sink;
    app.add_option("--config", config_path_sink, "Flat key = value config file");

    auto* precompute = app.add_subcommand("precompute", "Build operator, propagate, write cache");
    add_pipeline_options(precompute, cfg);
    std::string dump_mgo;
    precompute->add_option("--dump-mgo", dump_mgo, "Also dump the operator as LDCM");

    auto* train_cmd = app.add_subcommand("train", "Train the linear head from a cache");
    add_pipeline_options(train_cmd, cfg);
    std::string cache_path, split_path, model_out;
    train_cmd->add_option("--cache", cache_path, "LDCP cache path")->required();
    train_cmd->add_option("--split", split_path, "Split file path")->required();
    train_cmd->add_option("--model-out", model_out, "Checkpoint output path");

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a split subset");
    add_pipeline_options(eval_cmd, cfg);
    std::string eval_cache, eval_split, eval_model, eval_subset = "test";
    eval_cmd->add_option("--cache", eval_cache, "LDCP cache path")->required();
    eval_cmd->add_option("--split", eval_split, "Split file path")->required();
    eval_cmd->add_option("--model", eval_model, "LDCW checkpoint")->required();
    eval_cmd->add_option("--subset", eval_subset, "train | val | test");

    auto* verify_cmd = app.add_subcommand("verify", "Run the spectral/property suites");
    std::size_t scale = 30, trials = 100;
    std::uint64_t verify_seed = 7;
    std::string verify_out;
    verify_cmd->add_option("--scale", scale, "Max graph size (<= 64)");
    verify_cmd->add_option("--trials", trials, "Reference trial count");
    verify_cmd->add_option("--seed", verify_seed, "Suite seed");
    verify_cmd->add_option("--out", verify_out, "Output JSON path");
    verify_cmd->add_option("--config", config_path_sink, "Unused for verify");

    auto* sparsity_cmd = app.add_subcommand("sparsity", "Feature/edge/label sparsity sweeps");
    add_pipeline_options(sparsity_cmd, cfg);
    std::string axis;
    std::vector<double> levels;
    sparsity_cmd->add_option("--axis", axis, "feature | edge | label")->required();
    sparsity_cmd->add_option("--levels", levels, "Sparsity levels")->required()->delimiter(',');

    auto* ablate_cmd = app.add_subcommand("ablate-agg", "Compare the four aggregation modes");
    add_pipeline_options(ablate_cmd, cfg);

    auto* bench_cmd = app.add_subcommand("bench", "Scaling measurements (prop | train)");
    add_pipeline_options(bench_cmd, cfg);
    std::string bench_kind = "prop";
    std::size_t bench_n = 100000, bench_m = 500000, bench_f = 64, bench_epochs = 5;
    bench_cmd->add_option("--bench-kind", bench_kind, "prop | train");
    bench_cmd->add_option("--n", bench_n, "Synthetic node count");
    bench_cmd->add_option("--m", bench_m, "Synthetic edge count (doubled run uses 2m)");
    bench_cmd->add_option("--f", bench_f, "Synthetic feature width");
    bench_cmd->add_option("--bench-epochs", bench_epochs, "Epochs per timing run");

    for (CLI::App* sub : {precompute, train_cmd, eval_cmd, verify_cmd, sparsity_cmd,
                          ablate_cmd, bench_cmd}) {
        take_last_everywhere(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (precompute->parsed()) return cmd_precompute(cfg, dump_mgo);
        if (train_cmd->parsed()) return cmd_train(cfg, cache_path, split_path, model_out);
        if (eval_cmd->parsed()) return cmd_eval(cfg, eval_cache, eval_split, eval_model, eval_subset);
        if (verify_cmd->parsed()) return cmd_verify(scale, trials, verify_seed, verify_out);
        if (sparsity_cmd->parsed()) return cmd_sparsity(cfg, axis, levels);
        if (ablate_cmd->parsed()) return cmd_ablate_agg(cfg);
        if (bench_cmd->parsed()) {
            return cmd_bench(cfg, bench_kind, bench_n, bench_m, bench_f, bench_epochs);
        }
    } catch (const StaleCacheError& e) {
        std::cerr << "stale cache: " << e.what() << "\n";
        return kExitFormat;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
