#include <doctest.h>

#include "lightdic/errors.hpp"
#include "lightdic/oracle.hpp"
#include "lightdic/rng.hpp"
#include "lightdic/spectral_features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace lightdic;

namespace {

/// Dense S = D~^{-1/2} (A_s + I) D~^{-1/2} for the oracle route.
oracle::DenseMatrix dense_operator(const DirectedGraph& g) {
    const std::size_t n = g.num_nodes();
    oracle::DenseMatrix s(n);
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v : g.out_neighbors(u)) {
            s.at(u, v) = 1.0;
            s.at(v, u) = 1.0;
        }
    }
    std::vector<double> inv_sqrt(n);
    for (std::size_t u = 0; u < n; ++u) {
        double deg = 1.0;
        for (std::size_t v = 0; v < n; ++v) deg += s.at(u, v);
        inv_sqrt[u] = 1.0 / std::sqrt(deg);
        s.at(u, u) += 1.0;
    }
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            s.at(u, v) *= inv_sqrt[u] * inv_sqrt[v];
        }
    }
    return s;
}

double rayleigh(const oracle::DenseMatrix& s, const FeatureMatrix& v, std::size_t col) {
    const std::size_t n = s.n;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double si = 0.0;
        for (std::size_t j = 0; j < n; ++j) si += s.at(i, j) * v.at(j, col);
        num += v.at(i, col) * si;
        den += v.at(i, col) * v.at(i, col);
    }
    return num / den;
}

} // namespace

TEST_CASE("argument validation") {
    const auto g = generate_random_digraph(6, 12, 1);
    CHECK_THROWS_AS(spectral_features(g, 7, 10, 0), InputError);
    CHECK_THROWS_AS(spectral_features(DirectedGraph(0, {}), 1, 10, 0), InputError);
}

TEST_CASE("edgeless graph: operator is the identity, any orthonormal pair works") {
    const DirectedGraph g(8, {});
    const auto v = spectral_features(g, 2, 20, 3);
    REQUIRE(v.rows == 8);
    REQUIRE(v.cols == 2);
    double d00 = 0.0, d01 = 0.0, d11 = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        d00 += v.at(i, 0) * v.at(i, 0);
        d01 += v.at(i, 0) * v.at(i, 1);
        d11 += v.at(i, 1) * v.at(i, 1);
    }
    CHECK(std::abs(d00 - 1.0) <= 1e-10);
    CHECK(std::abs(d11 - 1.0) <= 1e-10);
    CHECK(std::abs(d01) <= 1e-10);
}

TEST_CASE("top column tracks the dominant eigenvalue on a connected graph") {
    // ring plus chords keeps the graph connected
    std::vector<Edge> edges;
    const std::size_t n = 20;
    for (NodeId u = 0; u < n; ++u) {
        edges.push_back({u, static_cast<NodeId>((u + 1) % n)});
        if (u % 3 == 0) edges.push_back({u, static_cast<NodeId>((u + 7) % n)});
    }
    const DirectedGraph g(n, edges);
    const auto v = spectral_features(g, 1, 300, 5);
    const auto s = dense_operator(g);

    std::vector<double> evals;
    oracle::jacobi_symmetric(s, evals, nullptr);
    const double top = evals.back(); // largest eigenvalue of S is 1 (Perron)
    CHECK(top == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rayleigh(s, v, 0) == doctest::Approx(top).epsilon(1e-6));
}

TEST_CASE("full basis reconstructs S on a 6-node graph") {
    const auto g = generate_random_digraph(6, 14, 9);
    const std::size_t n = 6;
    const auto v = spectral_features(g, n, 400, 2);
    const auto s = dense_operator(g);

    std::vector<double> evals;
    oracle::jacobi_symmetric(s, evals, nullptr);
    // columns are ordered by |eigenvalue| descending; align oracle values
    std::vector<double> by_mag = evals;
    std::sort(by_mag.begin(), by_mag.end(),
              [](double a, double b) { return std::abs(a) > std::abs(b); });

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                acc += v.at(i, k) * by_mag[k] * v.at(j, k);
            }
            err += (acc - s.at(i, j)) * (acc - s.at(i, j));
        }
    }
    CHECK(std::sqrt(err) <= 1e-6);
}

TEST_CASE("columns are orthonormal and Rayleigh quotients match the oracle") {
    Rng rng(33);
    std::size_t checked = 0;
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 8 + rng.uniform(43); // up to 50
        const std::size_t m = std::min<std::size_t>(3 * n, n * (n - 1));
        const auto g = generate_random_digraph(n, m, rng.next_u64());
        const std::size_t k = 1 + rng.uniform(4);

        const auto s = dense_operator(g);
        std::vector<double> evals;
        oracle::jacobi_symmetric(s, evals, nullptr);
        std::vector<double> by_mag = evals;
        std::sort(by_mag.begin(), by_mag.end(),
                  [](double a, double b) { return std::abs(a) > std::abs(b); });

        // boundary eigenvalue ratio dictates how many iterations power
        // iteration needs; skip graphs with no usable gap at the cut
        const double boundary = std::abs(by_mag[k - 1]);
        const double next = k < n ? std::abs(by_mag[k]) : 0.0;
        if (boundary <= 1e-12) continue;
        const double ratio = next / boundary;
        if (ratio > 0.99) continue;
        const std::size_t iters = std::min<std::size_t>(
            20000, 200 + static_cast<std::size_t>(std::ceil(std::log(1e-9) / std::log(ratio))));

        const auto v = spectral_features(g, k, iters, rng.next_u64());
        ++checked;

        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = a; b < k; ++b) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += v.at(i, a) * v.at(i, b);
                CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-8);
            }
        }
        for (std::size_t col = 0; col < k; ++col) {
            CHECK(rayleigh(s, v, col) == doctest::Approx(by_mag[col]).epsilon(1e-6));
        }
    }
    CHECK(checked >= 4); // the gap precondition must not skip everything
}

TEST_CASE("deterministic per seed") {
    const auto g = generate_random_digraph(15, 40, 6);
    const auto a = spectral_features(g, 3, 50, 11);
    const auto b = spectral_features(g, 3, 50, 11);
    CHECK(a.values == b.values);
    const auto c = spectral_features(g, 3, 50, 12);
    CHECK(a.values != c.values);
}
