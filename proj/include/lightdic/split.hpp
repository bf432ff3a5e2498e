#pragma once

#include "lightdic/graph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lightdic {

enum class TaskKind : std::uint8_t {
    NodeClassification = 0,
    LinkExistence = 1,
    LinkDirection = 2,
    LinkThreeClass = 3,
};

const char* task_kind_name(TaskKind kind);
std::optional<TaskKind> task_kind_from_name(const std::string& name);
bool is_link_task(TaskKind kind);

/// One labeled example: a node for the node task, an ordered pair otherwise.
struct SplitEntry {
    NodeId u = 0;
    NodeId v = 0; // unused for node tasks
    std::int64_t label = 0;
};

/// Train/val/test partition with labels. For link tasks the split also
/// carries the leakage-safe propagation graph (train edges only); loading a
/// split from disk leaves that field empty.
struct TaskSplit {
    TaskKind task_kind = TaskKind::NodeClassification;
    std::size_t num_classes = 0;
    std::size_t num_nodes = 0;
    std::vector<SplitEntry> train;
    std::vector<SplitEntry> val;
    std::vector<SplitEntry> test;
    std::optional<DirectedGraph> propagation_graph;
};

/// Stratified node split: per_class_train nodes from every class, val_count
/// random validation nodes from the remainder, everything else test.
/// Labels must be in [0, num_classes). Throws InputError when a class has
/// fewer than per_class_train members or the request exceeds n.
TaskSplit build_node_split(const DirectedGraph& graph, const std::vector<std::int64_t>& labels,
                           std::size_t num_classes, std::size_t per_class_train,
                           std::size_t val_count, std::uint64_t seed);

/// Link split: edges shuffled and cut train/val/test by fraction (default
/// 80/15/5); the propagation graph keeps only train edges. Labels per task:
///   existence   - balanced edge vs. sampled ordered non-edge pairs (1 = edge)
///   direction   - each one-way subset edge (u,v) emits (u,v):0 and (v,u):1
///   three-class - forward / reverse / neither, equal counts per class
TaskSplit build_link_split(const DirectedGraph& graph, TaskKind task_kind,
                           double train_frac, double val_frac, std::uint64_t seed);

inline TaskSplit build_link_split(const DirectedGraph& graph, TaskKind task_kind,
                                  std::uint64_t seed) {
    return build_link_split(graph, task_kind, 0.80, 0.15, seed);
}

/// Text split file: `# key value` headers (task, classes, nodes) followed by
/// `split_name index [index2] label` records.
void save_split(const TaskSplit& split, const std::string& path);
TaskSplit load_split(const std::string& path);

} // namespace lightdic
