#include <doctest.h>

#include "lightdic/errors.hpp"
#include "lightdic/magnetic.hpp"
#include "lightdic/oracle.hpp"
#include "lightdic/rng.hpp"

#include <cmath>

using namespace lightdic;
using oracle::ComplexVector;
using oracle::DenseHermitian;

TEST_CASE("jacobi on a diagonal matrix returns the sorted diagonal") {
    oracle::DenseMatrix m(3);
    m.at(0, 0) = 3.0;
    m.at(1, 1) = 1.0;
    m.at(2, 2) = 2.0;
    std::vector<double> evals;
    oracle::DenseMatrix vecs;
    oracle::jacobi_symmetric(m, evals, &vecs);
    CHECK(evals == std::vector<double>{1.0, 2.0, 3.0});
    // eigenvector columns are permuted standard basis vectors
    CHECK(std::abs(vecs.at(1, 0)) == 1.0);
    CHECK(std::abs(vecs.at(2, 1)) == 1.0);
    CHECK(std::abs(vecs.at(0, 2)) == 1.0);
}

TEST_CASE("hermitian eigendecomposition of a diagonal real matrix") {
    DenseHermitian m(3);
    m.re.at(0, 0) = 3.0;
    m.re.at(1, 1) = 1.0;
    m.re.at(2, 2) = 2.0;
    const auto sys = oracle::eigendecompose(m);
    CHECK(sys.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sys.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sys.eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-14));
    // phase convention: pivot components real positive -> +e_i columns
    CHECK(sys.vec_re.at(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sys.vec_re.at(2, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sys.vec_re.at(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < 9; ++i) CHECK(std::abs(sys.vec_im.a[i]) < 1e-12);
}

TEST_CASE("single-edge magnetic laplacian at q = 1/4 has spectrum {0, 1}") {
    const DirectedGraph g(2, {{0, 1}});
    const auto lm = DenseHermitian::from_sparse(magnetic_laplacian(g, 0.25));
    const auto sys = oracle::eigendecompose(lm);
    CHECK(sys.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(sys.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigendecompose rejects non-Hermitian input") {
    DenseHermitian bad(2);
    bad.re.at(0, 1) = 1.0;
    bad.re.at(1, 0) = 2.0;
    CHECK_THROWS_AS(oracle::eigendecompose(bad), InputError);
}

TEST_CASE("random Hermitian reconstruction within 1e-8") {
    Rng rng(12);
    const std::size_t n = 16;
    DenseHermitian m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.re.at(i, i) = rng.normal();
        for (std::size_t j = i + 1; j < n; ++j) {
            const double re = rng.normal();
            const double im = rng.normal();
            m.re.at(i, j) = re;
            m.re.at(j, i) = re;
            m.im.at(i, j) = im;
            m.im.at(j, i) = -im;
        }
    }
    const auto sys = oracle::eigendecompose(m);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double rr = 0.0, ri = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double ar = sys.vec_re.at(i, k);
                const double ai = sys.vec_im.at(i, k);
                const double br = sys.vec_re.at(j, k);
                const double bi = -sys.vec_im.at(j, k);
                rr += sys.eigenvalues[k] * (ar * br - ai * bi);
                ri += sys.eigenvalues[k] * (ar * bi + ai * br);
            }
            err += (rr - m.re.at(i, j)) * (rr - m.re.at(i, j)) +
                   (ri - m.im.at(i, j)) * (ri - m.im.at(i, j));
        }
    }
    CHECK(std::sqrt(err) <= 1e-8 * m.frobenius_norm());
}

TEST_CASE("degenerate spectra recover full orthonormal bases") {
    // zero matrix: one cluster of multiplicity n
    const DirectedGraph edgeless(5, {});
    const auto zero_sys =
        oracle::eigendecompose(DenseHermitian::from_sparse(magnetic_laplacian(edgeless, 0.1)));
    for (double v : zero_sys.eigenvalues) CHECK(v == 0.0);

    // complete reciprocal graph on 6 nodes: Laplacian spectrum {0, 6^(x5)}
    std::vector<Edge> complete;
    for (NodeId u = 0; u < 6; ++u) {
        for (NodeId v = 0; v < 6; ++v) {
            if (u != v) complete.push_back({u, v});
        }
    }
    const DirectedGraph kn(6, complete);
    const auto sys =
        oracle::eigendecompose(DenseHermitian::from_sparse(magnetic_laplacian(kn, 0.25)));
    CHECK(sys.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t k = 1; k < 6; ++k) {
        CHECK(sys.eigenvalues[k] == doctest::Approx(6.0).epsilon(1e-12));
    }

    // repeated diagonal entries: a two-dimensional eigenvalue cluster
    DenseHermitian diag(3);
    diag.re.at(0, 0) = 2.0;
    diag.re.at(1, 1) = 2.0;
    diag.re.at(2, 2) = 1.0;
    const auto dsys = oracle::eigendecompose(diag);
    CHECK(dsys.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(dsys.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(dsys.eigenvalues[2] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("eigenvectors are deterministic across repeated runs") {
    const auto g = generate_random_digraph(14, 40, 5);
    const auto lm = DenseHermitian::from_sparse(magnetic_laplacian(g, 0.1));
    const auto a = oracle::eigendecompose(lm);
    const auto b = oracle::eigendecompose(lm);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.vec_re.a == b.vec_re.a);
    CHECK(a.vec_im.a == b.vec_im.a);
}

TEST_CASE("dirichlet energy of a constant vector at q = 0 vanishes") {
    const auto g = generate_random_digraph(9, 20, 4);
    ComplexVector x(9);
    for (std::size_t i = 0; i < 9; ++i) {
        x.re[i] = 2.5;
        x.im[i] = -1.0;
    }
    CHECK(oracle::dirichlet_energy(g, 0.0, x) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("phase-aligned pair has zero energy on a single edge") {
    // x = (1, -i) at q = 1/4: |1 - e^{i pi/2}(-i)|^2 * 0.5 = 0
    const DirectedGraph g(2, {{0, 1}});
    ComplexVector x(2);
    x.re[0] = 1.0;
    x.im[1] = -1.0;
    CHECK(oracle::dirichlet_energy(g, 0.25, x) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("edge-sum energy equals the quadratic form") {
    Rng rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 4 + rng.uniform(20);
        const std::size_t m = std::min<std::size_t>(3 + rng.uniform(50), n * (n - 1));
        const auto g = generate_random_digraph(n, m, rng.next_u64());
        const double q = 0.25 * rng.uniform_real();
        ComplexVector x(g.num_nodes());
        for (std::size_t i = 0; i < x.size(); ++i) {
            x.re[i] = rng.normal();
            x.im[i] = rng.normal();
        }
        const double edge_sum = oracle::dirichlet_energy(g, q, x);
        const double quad = oracle::dirichlet_quadratic_form(magnetic_laplacian(g, q), x);
        CHECK(edge_sum == doctest::Approx(quad).epsilon(1e-9));
    }
}

TEST_CASE("denoise on an edgeless graph is the identity") {
    const DirectedGraph g(5, {});
    Rng rng(3);
    ComplexVector y(5);
    for (std::size_t i = 0; i < 5; ++i) {
        y.re[i] = rng.normal();
        y.im[i] = rng.normal();
    }
    const auto x = oracle::denoise_solve(g, 0.1, y);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(x.re[i] == doctest::Approx(y.re[i]).epsilon(1e-12));
        CHECK(x.im[i] == doctest::Approx(y.im[i]).epsilon(1e-12));
    }
}

TEST_CASE("denoising an eigenvector rescales it by 1/(lambda+1)") {
    const auto g = generate_random_digraph(10, 24, 8);
    const double q = 0.2;
    const auto sys = oracle::eigendecompose(DenseHermitian::from_sparse(magnetic_laplacian(g, q)));
    const std::size_t k = 3;
    ComplexVector u(10);
    for (std::size_t i = 0; i < 10; ++i) {
        u.re[i] = sys.vec_re.at(i, k);
        u.im[i] = sys.vec_im.at(i, k);
    }
    const auto x = oracle::denoise_solve(g, q, u);
    const double scale = 1.0 / (sys.eigenvalues[k] + 1.0);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(x.re[i] == doctest::Approx(scale * u.re[i]).epsilon(1e-10));
        CHECK(x.im[i] == doctest::Approx(scale * u.im[i]).epsilon(1e-10));
    }
}

TEST_CASE("prox iteration: zero steps returns the start point") {
    const auto g = generate_random_digraph(8, 20, 2);
    Rng rng(4);
    ComplexVector y(8), x0(8);
    for (std::size_t i = 0; i < 8; ++i) {
        y.re[i] = rng.normal();
        x0.re[i] = rng.normal();
    }
    const auto x = oracle::prox_gradient_iterate(g, 0.1, y, x0, 0.5, 0);
    CHECK(x.re == x0.re);
    CHECK(x.im == x0.im);
}

TEST_CASE("prox iteration with y = 0, alpha = 1 is one left-normalized step") {
    const auto g = generate_random_digraph(9, 25, 6);
    const double q = 0.15;
    Rng rng(5);
    ComplexVector x0(9);
    for (std::size_t i = 0; i < 9; ++i) {
        x0.re[i] = rng.normal();
        x0.im[i] = rng.normal();
    }
    const ComplexVector zero(9);
    const auto got = oracle::prox_gradient_iterate(g, q, zero, x0, 1.0, 1);

    // expected: (D_m + I)^{-1} (A_m .* e^{i Theta}) x0
    const auto lm = magnetic_laplacian(g, q);
    for (NodeId u = 0; u < 9; ++u) {
        double zr = 0.0, zi = 0.0;
        for (std::uint64_t k = lm.row_ptr[u]; k < lm.row_ptr[u + 1]; ++k) {
            const NodeId v = lm.col_idx[k];
            if (v == u) continue;
            zr += -lm.re[k] * x0.re[v] + lm.im[k] * x0.im[v];
            zi += -lm.re[k] * x0.im[v] - lm.im[k] * x0.re[v];
        }
        const double inv = 1.0 / (lm.entry(u, u).first + 1.0);
        CHECK(got.re[u] == doctest::Approx(inv * zr).epsilon(1e-12));
        CHECK(got.im[u] == doctest::Approx(inv * zi).epsilon(1e-12));
    }
}

TEST_CASE("prox iteration converges to the closed-form denoiser") {
    Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const auto g = generate_random_digraph(10 + rng.uniform(15), 20 + rng.uniform(30),
                                               rng.next_u64());
        const double q = 0.25 * rng.uniform_real();
        const std::size_t n = g.num_nodes();
        ComplexVector y(n), x0(n);
        for (std::size_t i = 0; i < n; ++i) {
            y.re[i] = rng.normal();
            y.im[i] = rng.normal();
            x0.re[i] = rng.normal();
            x0.im[i] = rng.normal();
        }
        const auto lm = magnetic_laplacian(g, q);
        ComplexVector x = x0;
        double prev = oracle::denoise_objective(lm, x, y);
        for (int step = 0; step < 200; ++step) {
            x = oracle::prox_gradient_iterate(g, q, y, x, 0.5, 1);
            const double cur = oracle::denoise_objective(lm, x, y);
            CHECK(cur <= prev + 1e-10 * std::max(1.0, std::abs(prev)));
            prev = cur;
        }
        const auto target = oracle::denoise_solve(g, q, y);
        double dist = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dist += (x.re[i] - target.re[i]) * (x.re[i] - target.re[i]) +
                    (x.im[i] - target.im[i]) * (x.im[i] - target.im[i]);
        }
        CHECK(std::sqrt(dist) <= 1e-4);
    }
}

TEST_CASE("prox iteration validates alpha") {
    const DirectedGraph g(2, {{0, 1}});
    const ComplexVector y(2), x0(2);
    CHECK_THROWS_AS(oracle::prox_gradient_iterate(g, 0.1, y, x0, 0.0, 1), InputError);
    CHECK_THROWS_AS(oracle::prox_gradient_iterate(g, 0.1, y, x0, 1.5, 1), InputError);
}
