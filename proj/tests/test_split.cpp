#include <doctest.h>

#include "lightdic/errors.hpp"
#include "lightdic/rng.hpp"
#include "lightdic/split.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

using namespace lightdic;

namespace {

std::set<std::pair<NodeId, NodeId>> entry_pairs(const std::vector<SplitEntry>& entries) {
    std::set<std::pair<NodeId, NodeId>> out;
    for (const auto& e : entries) out.insert({e.u, e.v});
    return out;
}

void check_disjoint(const TaskSplit& s) {
    const auto a = entry_pairs(s.train);
    const auto b = entry_pairs(s.val);
    const auto c = entry_pairs(s.test);
    for (const auto& p : b) CHECK(a.count(p) == 0);
    for (const auto& p : c) {
        CHECK(a.count(p) == 0);
        CHECK(b.count(p) == 0);
    }
}

std::vector<std::int64_t> cyclic_labels(std::size_t n, std::size_t classes) {
    std::vector<std::int64_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::int64_t>(i % classes);
    return labels;
}

} // namespace

TEST_CASE("node split cardinality arithmetic") {
    const auto g = generate_random_digraph(20, 40, 1);
    const auto labels = cyclic_labels(20, 3);
    const auto s = build_node_split(g, labels, 3, 2, 4, 7);
    CHECK(s.train.size() == 6);
    CHECK(s.val.size() == 4);
    CHECK(s.test.size() == 10);
    check_disjoint(s);

    // per-class train counts
    std::map<std::int64_t, int> per_class;
    for (const auto& e : s.train) ++per_class[e.label];
    for (const auto& [cls, count] : per_class) {
        (void)cls;
        CHECK(count == 2);
    }
}

TEST_CASE("CoraML-shaped node split: 140/500/2355") {
    const auto g = generate_random_digraph(2995, 8416, 5);
    const auto labels = cyclic_labels(2995, 7);
    const auto s = build_node_split(g, labels, 7, 20, 500, 3);
    CHECK(s.train.size() == 140);
    CHECK(s.val.size() == 500);
    CHECK(s.test.size() == 2355);
    check_disjoint(s);
}

TEST_CASE("two seeds differ but keep per-class counts") {
    const auto g = generate_random_digraph(60, 150, 2);
    const auto labels = cyclic_labels(60, 4);
    const auto a = build_node_split(g, labels, 4, 5, 10, 1);
    const auto b = build_node_split(g, labels, 4, 5, 10, 2);
    CHECK(entry_pairs(a.train) != entry_pairs(b.train));
    std::map<std::int64_t, int> ca, cb;
    for (const auto& e : a.train) ++ca[e.label];
    for (const auto& e : b.train) ++cb[e.label];
    CHECK(ca == cb);

    const auto a2 = build_node_split(g, labels, 4, 5, 10, 1);
    CHECK(entry_pairs(a2.train) == entry_pairs(a.train));
    CHECK(entry_pairs(a2.val) == entry_pairs(a.val));
}

TEST_CASE("node split errors") {
    const auto g = generate_random_digraph(10, 20, 3);
    // class 2 has few members
    std::vector<std::int64_t> labels(10, 0);
    labels[1] = 1;
    labels[2] = 1;
    labels[3] = 2;
    CHECK_THROWS_AS(build_node_split(g, labels, 3, 2, 2, 0), InputError);
    CHECK_THROWS_AS(build_node_split(g, cyclic_labels(10, 2), 2, 4, 5, 0), InputError);
}

TEST_CASE("link split 80/15/5 with a leakage-safe propagation graph") {
    const auto g = generate_random_digraph(40, 100, 9);
    const auto s = build_link_split(g, TaskKind::LinkExistence, 11);
    REQUIRE(s.propagation_graph.has_value());
    CHECK(s.propagation_graph->num_edges() == 80);

    // positives per subset are the edge counts; balanced negatives double them
    std::size_t pos_train = 0, pos_val = 0, pos_test = 0;
    for (const auto& e : s.train) pos_train += e.label == 1;
    for (const auto& e : s.val) pos_val += e.label == 1;
    for (const auto& e : s.test) pos_test += e.label == 1;
    CHECK(pos_train == 80);
    CHECK(pos_val == 15);
    CHECK(pos_test == 5);
    CHECK(s.train.size() == 160);
    CHECK(s.val.size() == 30);
    CHECK(s.test.size() == 10);
    check_disjoint(s);

    // no val/test positive edge is present in the propagation graph
    for (const auto& e : s.val) {
        if (e.label == 1) CHECK_FALSE(s.propagation_graph->has_edge(e.u, e.v));
    }
    for (const auto& e : s.test) {
        if (e.label == 1) CHECK_FALSE(s.propagation_graph->has_edge(e.u, e.v));
    }

    // negatives are true non-edges in the fixed pair order
    for (const auto* subset : {&s.train, &s.val, &s.test}) {
        for (const auto& e : *subset) {
            if (e.label == 0) CHECK_FALSE(g.has_edge(e.u, e.v));
        }
    }
}

TEST_CASE("direction split emits both orientations with opposite labels") {
    // one-way ring: every edge is one-way
    std::vector<Edge> edges;
    const std::size_t n = 30;
    for (NodeId u = 0; u < n; ++u) edges.push_back({u, static_cast<NodeId>((u + 1) % n)});
    const DirectedGraph g(n, edges);
    const auto s = build_link_split(g, TaskKind::LinkDirection, 4);

    for (const auto* subset : {&s.train, &s.val, &s.test}) {
        std::map<std::pair<NodeId, NodeId>, std::int64_t> seen;
        for (const auto& e : *subset) seen[{e.u, e.v}] = e.label;
        for (const auto& [pair, label] : seen) {
            const auto reversed = std::make_pair(pair.second, pair.first);
            REQUIRE(seen.count(reversed) == 1);
            CHECK(seen[reversed] == 1 - label);
        }
        // forward pairs are real edges, reversed pairs are not
        for (const auto& e : *subset) {
            if (e.label == 0) {
                CHECK(g.has_edge(e.u, e.v));
            } else {
                CHECK_FALSE(g.has_edge(e.u, e.v));
            }
        }
    }
    check_disjoint(s);
}

TEST_CASE("direction split fails when every edge is reciprocal") {
    std::vector<Edge> edges;
    for (NodeId u = 0; u < 12; ++u) {
        const auto v = static_cast<NodeId>((u + 1) % 12);
        edges.push_back({u, v});
        edges.push_back({v, u});
    }
    const DirectedGraph g(12, edges);
    CHECK_THROWS_AS(build_link_split(g, TaskKind::LinkDirection, 0), InputError);
}

TEST_CASE("three-class split balances the classes") {
    const auto g = generate_random_digraph(40, 120, 13);
    const auto s = build_link_split(g, TaskKind::LinkThreeClass, 6);
    CHECK(s.num_classes == 3);
    for (const auto* subset : {&s.train, &s.val, &s.test}) {
        std::map<std::int64_t, std::size_t> counts;
        for (const auto& e : *subset) ++counts[e.label];
        CHECK(counts[0] == counts[1]);
        CHECK(counts[1] == counts[2]);
        CHECK(counts[0] > 0);
        for (const auto& e : *subset) {
            if (e.label == 0) CHECK(g.has_edge(e.u, e.v));
            if (e.label == 1) CHECK(g.has_edge(e.v, e.u));
            if (e.label == 2) {
                CHECK_FALSE(g.has_edge(e.u, e.v));
                CHECK_FALSE(g.has_edge(e.v, e.u));
            }
        }
    }
    check_disjoint(s);
}

TEST_CASE("link split requires at least 20 edges") {
    const auto g = generate_random_digraph(10, 12, 1);
    CHECK_THROWS_AS(build_link_split(g, TaskKind::LinkExistence, 0), InputError);
}

TEST_CASE("split file round-trips") {
    const auto g = generate_random_digraph(35, 90, 21);
    for (const TaskKind kind :
         {TaskKind::LinkExistence, TaskKind::LinkDirection, TaskKind::LinkThreeClass}) {
        const auto s = build_link_split(g, kind, 17);
        const std::string path = "/tmp/lightdic_test_split.txt";
        save_split(s, path);
        const auto loaded = load_split(path);
        CHECK(loaded.task_kind == s.task_kind);
        CHECK(loaded.num_classes == s.num_classes);
        CHECK(loaded.num_nodes == s.num_nodes);
        REQUIRE(loaded.train.size() == s.train.size());
        for (std::size_t i = 0; i < s.train.size(); ++i) {
            CHECK(loaded.train[i].u == s.train[i].u);
            CHECK(loaded.train[i].v == s.train[i].v);
            CHECK(loaded.train[i].label == s.train[i].label);
        }
        CHECK(loaded.val.size() == s.val.size());
        CHECK(loaded.test.size() == s.test.size());
        std::remove(path.c_str());
    }

    const auto labels = cyclic_labels(35, 5);
    const auto ns = build_node_split(g, labels, 5, 3, 6, 2);
    const std::string path = "/tmp/lightdic_test_node_split.txt";
    save_split(ns, path);
    const auto loaded = load_split(path);
    CHECK(loaded.task_kind == TaskKind::NodeClassification);
    CHECK(loaded.train.size() == 15);
    CHECK(loaded.test.size() == ns.test.size());
    std::remove(path.c_str());
}

TEST_CASE("link split determinism per seed") {
    const auto g = generate_random_digraph(30, 80, 3);
    const auto a = build_link_split(g, TaskKind::LinkExistence, 5);
    const auto b = build_link_split(g, TaskKind::LinkExistence, 5);
    CHECK(a.propagation_graph->fingerprint() == b.propagation_graph->fingerprint());
    REQUIRE(a.train.size() == b.train.size());
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        CHECK(a.train[i].u == b.train[i].u);
        CHECK(a.train[i].v == b.train[i].v);
        CHECK(a.train[i].label == b.train[i].label);
    }
}
