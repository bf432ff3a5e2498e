#include <doctest.h>

#include "lightdic/errors.hpp"
#include "lightdic/graph.hpp"
#include "lightdic/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

using namespace lightdic;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& contents)
        : path("/tmp/lightdic_test_" + name) {
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("edge list loading collapses duplicates") {
    TempFile file("dup.txt", "0 1\n1 2\n0 1\n");
    const auto g = load_edge_list(file.path);
    CHECK(g.num_nodes() == 3);
    CHECK(g.num_edges() == 2);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 2));
    CHECK_FALSE(g.has_edge(1, 0));
}

TEST_CASE("edge list loading drops self-loops") {
    TempFile file("loop.txt", "0 0\n0 1\n");
    const auto g = load_edge_list(file.path);
    CHECK(g.num_nodes() == 2);
    CHECK(g.num_edges() == 1);
    CHECK(g.has_edge(0, 1));
}

TEST_CASE("empty edge list with explicit node count") {
    TempFile file("empty.txt", "");
    const auto g = load_edge_list(file.path, 4);
    CHECK(g.num_nodes() == 4);
    CHECK(g.num_edges() == 0);
}

TEST_CASE("comments and whitespace are tolerated") {
    TempFile file("comments.txt", "# header\n0 1\n\n  2 3\n");
    const auto g = load_edge_list(file.path);
    CHECK(g.num_edges() == 2);
    CHECK(g.has_edge(2, 3));
}

TEST_CASE("malformed lines report the line number") {
    TempFile file("bad.txt", "0 1\nnot an edge\n");
    CHECK_THROWS_WITH_AS(load_edge_list(file.path), doctest::Contains(":2"), InputError);
}

TEST_CASE("out-of-bounds index against explicit node count") {
    TempFile file("oob.txt", "0 5\n");
    CHECK_THROWS_AS(load_edge_list(file.path, 3), InputError);
}

TEST_CASE("random digraph: edgeless and saturated cases") {
    const auto empty = generate_random_digraph(5, 0, 7);
    CHECK(empty.num_nodes() == 5);
    CHECK(empty.num_edges() == 0);

    const auto full = generate_random_digraph(4, 12, 1);
    CHECK(full.num_edges() == 12);
    for (NodeId u = 0; u < 4; ++u) {
        for (NodeId v = 0; v < 4; ++v) {
            if (u != v) CHECK(full.has_edge(u, v));
        }
    }

    CHECK_THROWS_AS(generate_random_digraph(4, 13, 1), InputError);
}

TEST_CASE("random digraph is deterministic per seed") {
    const auto a = generate_random_digraph(50, 200, 3);
    const auto b = generate_random_digraph(50, 200, 3);
    CHECK(a.num_edges() == 200);
    CHECK(a.out_row_ptr() == b.out_row_ptr());
    CHECK(a.out_col_idx() == b.out_col_idx());
    CHECK(a.fingerprint() == b.fingerprint());

    const auto c = generate_random_digraph(50, 200, 4);
    CHECK(a.fingerprint() != c.fingerprint());
}

TEST_CASE("transpose consistency holds for random graphs") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.uniform(40);
        const std::size_t cap = n * (n - 1);
        const auto g = generate_random_digraph(n, rng.uniform(cap + 1), rng.next_u64());

        std::set<Edge> forward;
        for (NodeId u = 0; u < n; ++u) {
            for (NodeId v : g.out_neighbors(u)) forward.insert({u, v});
        }
        std::set<Edge> backward;
        for (NodeId v = 0; v < n; ++v) {
            for (NodeId u : g.in_neighbors(v)) backward.insert({u, v});
        }
        CHECK(forward == backward);
        CHECK(forward.size() == g.num_edges());

        // column indices strictly increasing per row, both directions
        for (NodeId u = 0; u < n; ++u) {
            const auto row = g.out_neighbors(u);
            CHECK(std::is_sorted(row.begin(), row.end()));
            CHECK(std::adjacent_find(row.begin(), row.end()) == row.end());
            const auto in_row = g.in_neighbors(u);
            CHECK(std::is_sorted(in_row.begin(), in_row.end()));
            CHECK(std::adjacent_find(in_row.begin(), in_row.end()) == in_row.end());
        }
    }
}

TEST_CASE("edge list save/load round-trips") {
    const auto g = generate_random_digraph(23, 80, 11);
    const std::string path = "/tmp/lightdic_test_roundtrip.txt";
    save_edge_list(g, path);
    const auto g2 = load_edge_list(path, 23);
    CHECK(g2.fingerprint() == g.fingerprint());
    std::remove(path.c_str());
}
