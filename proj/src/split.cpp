#include "lightdic/split.hpp"

#include "lightdic/errors.hpp"
#include "lightdic/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_set>

namespace lightdic {

const char* task_kind_name(TaskKind kind) {
    switch (kind) {
        case TaskKind::NodeClassification: return "node_classification";
        case TaskKind::LinkExistence: return "link_existence";
        case TaskKind::LinkDirection: return "link_direction";
        case TaskKind::LinkThreeClass: return "link_three_class";
    }
    return "unknown";
}

std::optional<TaskKind> task_kind_from_name(const std::string& name) {
    if (name == "node_classification" || name == "node") return TaskKind::NodeClassification;
    if (name == "link_existence" || name == "existence") return TaskKind::LinkExistence;
    if (name == "link_direction" || name == "direction") return TaskKind::LinkDirection;
    if (name == "link_three_class" || name == "link3") return TaskKind::LinkThreeClass;
    return std::nullopt;
}

bool is_link_task(TaskKind kind) {
    return kind != TaskKind::NodeClassification;
}

TaskSplit build_node_split(const DirectedGraph& graph, const std::vector<std::int64_t>& labels,
                           std::size_t num_classes, std::size_t per_class_train,
                           std::size_t val_count, std::uint64_t seed) {
    const std::size_t n = graph.num_nodes();
    if (labels.size() != n) {
        throw InputError("build_node_split: label count != node count");
    }
    if (num_classes == 0) throw InputError("build_node_split: num_classes must be positive");
    for (std::int64_t c : labels) {
        if (c < 0 || static_cast<std::size_t>(c) >= num_classes) {
            throw InputError("build_node_split: label " + std::to_string(c) + " out of range");
        }
    }
    if (per_class_train == 0 || val_count == 0) {
        throw InputError("build_node_split: train and val must be nonempty");
    }
    if (per_class_train * num_classes + val_count >= n) {
        throw InputError("build_node_split: train + val request leaves no test nodes");
    }

    std::vector<std::vector<NodeId>> by_class(num_classes);
    for (NodeId u = 0; u < n; ++u) by_class[static_cast<std::size_t>(labels[u])].push_back(u);
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (by_class[c].size() < per_class_train) {
            throw InputError("build_node_split: class " + std::to_string(c) + " has " +
                             std::to_string(by_class[c].size()) + " nodes, needs " +
                             std::to_string(per_class_train));
        }
    }

    Rng rng(seed);
    std::vector<char> in_train(n, 0);
    TaskSplit split;
    split.task_kind = TaskKind::NodeClassification;
    split.num_classes = num_classes;
    split.num_nodes = n;

    for (std::size_t c = 0; c < num_classes; ++c) {
        auto members = by_class[c];
        rng.shuffle(members);
        for (std::size_t i = 0; i < per_class_train; ++i) in_train[members[i]] = 1;
    }
    std::vector<NodeId> rest;
    rest.reserve(n);
    for (NodeId u = 0; u < n; ++u) {
        if (!in_train[u]) rest.push_back(u);
    }
    rng.shuffle(rest);

    std::vector<char> in_val(n, 0);
    for (std::size_t i = 0; i < val_count; ++i) in_val[rest[i]] = 1;

    for (NodeId u = 0; u < n; ++u) {
        SplitEntry e{u, 0, labels[u]};
        if (in_train[u]) {
            split.train.push_back(e);
        } else if (in_val[u]) {
            split.val.push_back(e);
        } else {
            split.test.push_back(e);
        }
    }
    split.propagation_graph = graph;
    return split;
}

namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

/// Draws `count` distinct ordered pairs satisfying `ok(u, v)`, disjoint from
/// `used` (which it extends). Rejection sampling; callers must ensure enough
/// pairs exist.
std::vector<Edge> sample_pairs(std::size_t n, std::size_t count, Rng& rng,
                               std::unordered_set<std::uint64_t>& used, auto&& ok) {
    std::vector<Edge> out;
    out.reserve(count);
    std::size_t attempts = 0;
    const std::size_t attempt_cap = 1000 * (count + 16);
    while (out.size() < count) {
        if (++attempts > attempt_cap) {
            throw InputError("link split: could not sample enough non-edge pairs");
        }
        const auto u = static_cast<NodeId>(rng.uniform(n));
        const auto v = static_cast<NodeId>(rng.uniform(n));
        if (u == v || !ok(u, v)) continue;
        if (!used.insert(pair_key(u, v)).second) continue;
        out.emplace_back(u, v);
    }
    return out;
}

} // namespace

TaskSplit build_link_split(const DirectedGraph& graph, TaskKind task_kind,
                           double train_frac, double val_frac, std::uint64_t seed) {
    if (!is_link_task(task_kind)) {
        throw InputError("build_link_split: node task requested");
    }
    const std::size_t n = graph.num_nodes();
    const std::size_t m = graph.num_edges();
    if (m < 20) throw InputError("build_link_split: graph needs at least 20 edges");
    if (!(train_frac > 0.0 && val_frac >= 0.0 && train_frac + val_frac < 1.0)) {
        throw InputError("build_link_split: bad train/val fractions");
    }

    Rng rng(seed);
    std::vector<Edge> edges = graph.edge_list();
    rng.shuffle(edges);

    const auto n_train = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(m)));
    const auto n_val = static_cast<std::size_t>(std::llround(val_frac * static_cast<double>(m)));
    if (n_train == 0 || n_val == 0 || n_train + n_val >= m) {
        throw InputError("build_link_split: fractions leave an empty subset");
    }

    const std::vector<Edge> train_edges(edges.begin(), edges.begin() + n_train);
    const std::vector<Edge> val_edges(edges.begin() + n_train, edges.begin() + n_train + n_val);
    const std::vector<Edge> test_edges(edges.begin() + n_train + n_val, edges.end());

    TaskSplit split;
    split.task_kind = task_kind;
    split.num_nodes = n;
    split.propagation_graph = DirectedGraph(n, train_edges);

    auto one_way = [&graph](const std::vector<Edge>& subset) {
        std::vector<Edge> result;
        for (const auto& [u, v] : subset) {
            if (!graph.has_edge(v, u)) result.emplace_back(u, v);
        }
        return result;
    };

    const std::vector<Edge>* subsets[3] = {&train_edges, &val_edges, &test_edges};
    std::vector<SplitEntry>* outputs[3] = {&split.train, &split.val, &split.test};
    const char* subset_names[3] = {"train", "val", "test"};

    switch (task_kind) {
        case TaskKind::LinkExistence: {
            split.num_classes = 2;
            const std::uint64_t non_edges =
                static_cast<std::uint64_t>(n) * (n - 1) - static_cast<std::uint64_t>(m);
            if (non_edges < m) {
                throw InputError("link split: not enough non-edges for balanced negatives");
            }
            std::unordered_set<std::uint64_t> used;
            for (int s = 0; s < 3; ++s) {
                for (const auto& [u, v] : *subsets[s]) outputs[s]->push_back({u, v, 1});
                auto negatives =
                    sample_pairs(n, subsets[s]->size(), rng, used,
                                 [&graph](NodeId u, NodeId v) { return !graph.has_edge(u, v); });
                for (const auto& [u, v] : negatives) outputs[s]->push_back({u, v, 0});
                rng.shuffle(*outputs[s]);
            }
            break;
        }
        case TaskKind::LinkDirection: {
            split.num_classes = 2;
            for (int s = 0; s < 3; ++s) {
                const auto ow = one_way(*subsets[s]);
                if (ow.empty()) {
                    throw InputError(std::string("direction split: no one-way edges in ") +
                                     subset_names[s] + " subset");
                }
                for (const auto& [u, v] : ow) {
                    outputs[s]->push_back({u, v, 0});
                    outputs[s]->push_back({v, u, 1});
                }
                rng.shuffle(*outputs[s]);
            }
            break;
        }
        case TaskKind::LinkThreeClass: {
            split.num_classes = 3;
            std::unordered_set<std::uint64_t> used;
            for (int s = 0; s < 3; ++s) {
                auto ow = one_way(*subsets[s]);
                const std::size_t t = ow.size() / 2;
                if (t == 0) {
                    throw InputError(std::string("three-class split: too few one-way edges in ") +
                                     subset_names[s] + " subset");
                }
                // disjoint halves feed the forward and reverse classes
                for (std::size_t i = 0; i < t; ++i) {
                    outputs[s]->push_back({ow[i].first, ow[i].second, 0});
                }
                for (std::size_t i = t; i < 2 * t; ++i) {
                    outputs[s]->push_back({ow[i].second, ow[i].first, 1});
                }
                auto absent = sample_pairs(n, t, rng, used, [&graph](NodeId u, NodeId v) {
                    return !graph.has_edge(u, v) && !graph.has_edge(v, u);
                });
                for (const auto& [u, v] : absent) outputs[s]->push_back({u, v, 2});
                rng.shuffle(*outputs[s]);
            }
            break;
        }
        case TaskKind::NodeClassification:
            break; // unreachable
    }
    return split;
}

void save_split(const TaskSplit& split, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write split file: " + path);
    out << "# task " << task_kind_name(split.task_kind) << '\n';
    out << "# classes " << split.num_classes << '\n';
    out << "# nodes " << split.num_nodes << '\n';
    const bool link = is_link_task(split.task_kind);
    const std::vector<SplitEntry>* subsets[3] = {&split.train, &split.val, &split.test};
    const char* names[3] = {"train", "val", "test"};
    for (int s = 0; s < 3; ++s) {
        for (const auto& e : *subsets[s]) {
            out << names[s] << ' ' << e.u;
            if (link) out << ' ' << e.v;
            out << ' ' << e.label << '\n';
        }
    }
}

TaskSplit load_split(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open split file: " + path);

    TaskSplit split;
    bool saw_task = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fail = [&](const std::string& why) {
            throw InputError(path + ":" + std::to_string(line_no) + ": " + why);
        };
        if (line[0] == '#') {
            std::string key, value;
            std::size_t pos = 1;
            while (pos < line.size() && line[pos] == ' ') ++pos;
            const std::size_t key_end = line.find(' ', pos);
            if (key_end == std::string::npos) continue;
            key = line.substr(pos, key_end - pos);
            value = line.substr(key_end + 1);
            while (!value.empty() && (value.back() == '\r' || value.back() == ' ')) value.pop_back();
            if (key == "task") {
                const auto kind = task_kind_from_name(value);
                if (!kind) fail("unknown task kind: " + value);
                split.task_kind = *kind;
                saw_task = true;
            } else if (key == "classes") {
                split.num_classes = std::stoull(value);
            } else if (key == "nodes") {
                split.num_nodes = std::stoull(value);
            }
            continue;
        }
        if (!saw_task) fail("record before `# task` header");

        std::vector<std::string> tokens;
        std::size_t pos = 0;
        while (pos < line.size()) {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
            std::size_t end = pos;
            while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
            if (end > pos) tokens.push_back(line.substr(pos, end - pos));
            pos = end;
        }
        if (tokens.empty()) continue;
        const bool link = is_link_task(split.task_kind);
        const std::size_t expected = link ? 4 : 3;
        if (tokens.size() != expected) fail("expected " + std::to_string(expected) + " fields");

        SplitEntry e;
        e.u = static_cast<NodeId>(std::stoull(tokens[1]));
        if (link) e.v = static_cast<NodeId>(std::stoull(tokens[2]));
        e.label = std::stoll(tokens.back());
        if (tokens[0] == "train") {
            split.train.push_back(e);
        } else if (tokens[0] == "val") {
            split.val.push_back(e);
        } else if (tokens[0] == "test") {
            split.test.push_back(e);
        } else {
            fail("unknown split name: " + tokens[0]);
        }
    }
    return split;
}

} // namespace lightdic
