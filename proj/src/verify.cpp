#include "lightdic/verify.hpp"

#include "lightdic/errors.hpp"
#include "lightdic/graph.hpp"
#include "lightdic/io.hpp"
#include "lightdic/magnetic.hpp"
#include "lightdic/model.hpp"
#include "lightdic/oracle.hpp"
#include "lightdic/propagation.hpp"
#include "lightdic/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numeric>

namespace lightdic::verify {

namespace {

using oracle::ComplexVector;
using oracle::DenseHermitian;

constexpr double kQGrid[4] = {0.0, 0.05, 0.1, 0.25};

DirectedGraph random_graph(Rng& rng, std::size_t max_n, std::size_t min_n = 4) {
    max_n = std::max(max_n, min_n);
    const std::size_t n = min_n + rng.uniform(max_n - min_n + 1);
    const std::uint64_t cap = static_cast<std::uint64_t>(n) * (n - 1);
    const std::uint64_t lo = std::min<std::uint64_t>(n, cap);
    const std::uint64_t hi = std::min<std::uint64_t>(3 * n, cap);
    const std::size_t m = lo + rng.uniform(hi - lo + 1);
    return generate_random_digraph(n, m, rng.next_u64());
}

ComplexVector random_signal(Rng& rng, std::size_t n) {
    ComplexVector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x.re[i] = rng.normal();
        x.im[i] = rng.normal();
    }
    return x;
}

double signal_norm(const ComplexVector& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x.re[i] * x.re[i] + x.im[i] * x.im[i];
    return std::sqrt(s);
}

std::pair<double, double> coefficient(const oracle::EigenSystem& sys, std::size_t k,
                                      const ComplexVector& x) {
    // <u_k, x> = sum conj(u) x
    double cr = 0.0;
    double ci = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double ur = sys.vec_re.at(i, k);
        const double ui = sys.vec_im.at(i, k);
        cr += ur * x.re[i] + ui * x.im[i];
        ci += ur * x.im[i] - ui * x.re[i];
    }
    return {cr, ci};
}

/// One step of the sparse propagation path on a complex vector.
ComplexVector apply_sparse(const ComplexSparseMatrix& m, const ComplexVector& x) {
    FeatureMatrix xr(x.size(), 1), xi(x.size(), 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        xr.values[i] = x.re[i];
        xi.values[i] = x.im[i];
    }
    FeatureMatrix yr, yi;
    complex_spmm(m, xr, xi, yr, yi);
    ComplexVector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y.re[i] = yr.values[i];
        y.im[i] = yi.values[i];
    }
    return y;
}

CheckResult make_result(std::string name, double threshold) {
    CheckResult r;
    r.name = std::move(name);
    r.threshold = threshold;
    r.passed = true;
    return r;
}

void fold(CheckResult& r, double observed) {
    r.worst = std::max(r.worst, observed);
    if (observed > r.threshold) r.passed = false;
    ++r.cases;
}

void fold_flag(CheckResult& r, bool ok) {
    if (!ok) {
        r.passed = false;
        r.worst = 1.0;
    }
    ++r.cases;
}

std::size_t scaled_trials(const VerifyOptions& opt, std::size_t reference) {
    // reference counts are quoted against trials=100
    return (opt.trials * reference + 99) / 100;
}

} // namespace

CheckResult check_hermitian_psd(const VerifyOptions& opt) {
    CheckResult r = make_result("hermitian_psd", 1e-9);
    Rng rng(opt.seed ^ 0x11ULL);
    const std::size_t cases = scaled_trials(opt, 100);
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, opt.scale);
        const double q = kQGrid[t % 4];
        const ComplexSparseMatrix lm = magnetic_laplacian(g, q);

        // exact Hermitian symmetry of the stored planes
        bool exact = true;
        for (NodeId u = 0; u < lm.n && exact; ++u) {
            for (std::uint64_t k = lm.row_ptr[u]; k < lm.row_ptr[u + 1]; ++k) {
                const NodeId v = lm.col_idx[k];
                const auto [vr, vi] = lm.entry(v, u);
                if (vr != lm.re[k] || vi != -lm.im[k]) {
                    exact = false;
                    break;
                }
            }
        }
        if (!exact) {
            r.passed = false;
            r.detail = "stored planes are not bit-exactly Hermitian";
            ++r.cases;
            continue;
        }

        const auto evals = oracle::eigenvalues_only(DenseHermitian::from_sparse(lm));
        const double min_eig = evals.empty() ? 0.0 : evals.front();
        fold(r, std::max(0.0, -min_eig));
    }
    return r;
}

CheckResult check_dirichlet_equality(const VerifyOptions& opt) {
    CheckResult r = make_result("dirichlet_energy_equality", 1e-9);
    Rng rng(opt.seed ^ 0x22ULL);
    const std::size_t cases = scaled_trials(opt, 100);
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, opt.scale);
        const double q = kQGrid[t % 4];
        const ComplexVector x = random_signal(rng, g.num_nodes());
        const double edge_sum = oracle::dirichlet_energy(g, q, x);
        const double quad = oracle::dirichlet_quadratic_form(magnetic_laplacian(g, q), x);
        const double scale = std::max({std::abs(edge_sum), std::abs(quad), 1e-30});
        fold(r, std::abs(edge_sum - quad) / scale);
    }
    return r;
}

CheckResult check_lowpass_filter(const VerifyOptions& opt) {
    CheckResult r = make_result("lowpass_filter_attenuation", 1e-8);
    Rng rng(opt.seed ^ 0x33ULL);
    const std::size_t cases = scaled_trials(opt, 20);
    const std::size_t k_grid[4] = {1, 2, 5, 10};
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, opt.scale);
        const double q = kQGrid[t % 4];
        const ComplexSparseMatrix mgo = magnetic_graph_operator(g, q);
        const auto sys = oracle::eigendecompose(DenseHermitian::from_sparse(mgo));
        ComplexVector x = random_signal(rng, g.num_nodes());

        for (const std::size_t steps : k_grid) {
            ComplexVector y = x;
            for (std::size_t s = 0; s < steps; ++s) y = apply_sparse(mgo, y);
            for (std::size_t k = 0; k < g.num_nodes(); ++k) {
                // eigenvalue of L~ = I - A^ is 1 - mu; the filter gain is
                // (1 - lambda)^K = mu^K
                const double gain = std::pow(sys.eigenvalues[k], static_cast<double>(steps));
                const auto [cr0, ci0] = coefficient(sys, k, x);
                const auto [cr1, ci1] = coefficient(sys, k, y);
                fold(r, std::hypot(cr1 - gain * cr0, ci1 - gain * ci0));
                --r.cases; // count cases per graph, not per coefficient
            }
        }
        ++r.cases;
    }
    return r;
}

CheckResult check_rayleigh_order(const VerifyOptions& opt) {
    CheckResult r = make_result("rayleigh_quotient_order", 1e-8);
    Rng rng(opt.seed ^ 0x44ULL);
    const std::size_t cases = scaled_trials(opt, 20);
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, opt.scale);
        const double q = kQGrid[t % 4];
        const DenseHermitian lm = DenseHermitian::from_sparse(magnetic_laplacian(g, q));
        const auto sys = oracle::eigendecompose(lm);
        const std::size_t n = g.num_nodes();

        for (std::size_t k = 0; k < n; ++k) {
            ComplexVector u(n);
            for (std::size_t i = 0; i < n; ++i) {
                u.re[i] = sys.vec_re.at(i, k);
                u.im[i] = sys.vec_im.at(i, k);
            }
            const ComplexVector mu = lm.apply(u);
            double quad = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                quad += u.re[i] * mu.re[i] + u.im[i] * mu.im[i];
            }
            fold(r, std::abs(quad - sys.eigenvalues[k]));
            --r.cases;
        }

        // lambda_1 lower-bounds the Rayleigh quotient of random unit vectors
        const double lambda1 = sys.eigenvalues.front();
        const double slack = 1e-9 * (1.0 + std::abs(lambda1));
        bool bounded = true;
        for (int probe = 0; probe < 1000; ++probe) {
            ComplexVector v = random_signal(rng, n);
            const double len = signal_norm(v);
            const ComplexVector mv = lm.apply(v);
            double quad = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                quad += v.re[i] * mv.re[i] + v.im[i] * mv.im[i];
            }
            if (quad / (len * len) < lambda1 - slack) {
                bounded = false;
                break;
            }
        }
        fold_flag(r, bounded);
    }
    return r;
}

CheckResult check_prox_descent(const VerifyOptions& opt) {
    CheckResult r = make_result("prox_gradient_descent", 1e-4);
    Rng rng(opt.seed ^ 0x55ULL);
    const std::size_t cases = scaled_trials(opt, 20);
    const std::size_t max_n = std::min<std::size_t>(opt.scale, 30);
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, max_n, 4);
        const double q = kQGrid[t % 4];
        const std::size_t n = g.num_nodes();
        const ComplexVector y = random_signal(rng, n);
        const ComplexVector x0 = random_signal(rng, n);
        const ComplexSparseMatrix lm = magnetic_laplacian(g, q);

        // objective along the trajectory is non-increasing
        ComplexVector x = x0;
        double prev = oracle::denoise_objective(lm, x, y);
        bool monotone = true;
        for (int step = 0; step < 500; ++step) {
            x = oracle::prox_gradient_iterate(g, q, y, x, 0.5, 1);
            const double cur = oracle::denoise_objective(lm, x, y);
            if (cur > prev + 1e-10 * std::max(1.0, std::abs(prev))) {
                monotone = false;
                break;
            }
            prev = cur;
        }
        fold_flag(r, monotone);
        --r.cases;

        const ComplexVector target = oracle::denoise_solve(g, q, y);
        double dist = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dist += (x.re[i] - target.re[i]) * (x.re[i] - target.re[i]) +
                    (x.im[i] - target.im[i]) * (x.im[i] - target.im[i]);
        }
        fold(r, std::sqrt(dist));
    }
    return r;
}

CheckResult check_propagation_equivalence(const VerifyOptions& opt) {
    CheckResult r = make_result("sparse_dense_propagation_equivalence", 1e-10);
    Rng rng(opt.seed ^ 0x66ULL);
    const std::size_t cases = scaled_trials(opt, 50);
    const double q_grid[3] = {0.0, 0.1, 0.25};
    const std::size_t k_grid[4] = {1, 2, 5, 10};
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, opt.scale);
        const std::size_t n = g.num_nodes();
        const std::size_t f = 1 + rng.uniform(4);

        PropagationConfig cfg;
        cfg.q = q_grid[t % 3];
        cfg.steps = k_grid[t % 4];

        FeatureMatrix x(n, f);
        for (double& v : x.values) v = rng.normal();

        const ComplexFeatureSet set = propagate(g, x, cfg);
        const DenseHermitian dense = DenseHermitian::from_sparse(magnetic_graph_operator(g, cfg.q));

        // dense complex power application, column by column
        double num = 0.0;
        double den = 0.0;
        for (std::size_t col = 0; col < f; ++col) {
            ComplexVector v(n);
            for (std::size_t i = 0; i < n; ++i) {
                v.re[i] = x.at(i, col);
                v.im[i] = x.at(i, col);
            }
            for (std::size_t s = 0; s < cfg.steps; ++s) v = dense.apply(v);
            for (std::size_t i = 0; i < n; ++i) {
                const double dr = set.real_steps.back().at(i, col) - v.re[i];
                const double di = set.imag_steps.back().at(i, col) - v.im[i];
                num += dr * dr + di * di;
                den += v.re[i] * v.re[i] + v.im[i] * v.im[i];
            }
        }
        fold(r, std::sqrt(num) / std::max(std::sqrt(den), 1e-30));
    }
    return r;
}

CheckResult check_propagation_linearity(const VerifyOptions& opt) {
    CheckResult r = make_result("propagation_linearity", 1e-10);
    Rng rng(opt.seed ^ 0x77ULL);
    const std::size_t cases = scaled_trials(opt, 20);
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, opt.scale);
        const std::size_t n = g.num_nodes();
        const std::size_t f = 1 + rng.uniform(3);
        PropagationConfig cfg;
        cfg.q = kQGrid[t % 4];
        cfg.steps = 1 + rng.uniform(6);

        FeatureMatrix x(n, f), y(n, f), mix(n, f);
        const double a = rng.normal();
        const double b = rng.normal();
        for (std::size_t i = 0; i < n * f; ++i) {
            x.values[i] = rng.normal();
            y.values[i] = rng.normal();
            mix.values[i] = a * x.values[i] + b * y.values[i];
        }

        const auto px = propagate(g, x, cfg);
        const auto py = propagate(g, y, cfg);
        const auto pm = propagate(g, mix, cfg);

        double num = 0.0;
        double den = 1e-30;
        for (std::size_t i = 0; i < n * f; ++i) {
            const double er = pm.real_steps.back().values[i] -
                              (a * px.real_steps.back().values[i] + b * py.real_steps.back().values[i]);
            const double ei = pm.imag_steps.back().values[i] -
                              (a * px.imag_steps.back().values[i] + b * py.imag_steps.back().values[i]);
            num += er * er + ei * ei;
            den += pm.real_steps.back().values[i] * pm.real_steps.back().values[i] +
                   pm.imag_steps.back().values[i] * pm.imag_steps.back().values[i];
        }
        fold(r, std::sqrt(num / den));
    }
    return r;
}

CheckResult check_propagation_determinism(const VerifyOptions& opt) {
    CheckResult r = make_result("propagation_thread_determinism", 0.0);
    Rng rng(opt.seed ^ 0x88ULL);
    const std::size_t cases = scaled_trials(opt, 10);
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, opt.scale);
        const std::size_t f = 1 + rng.uniform(5);
        FeatureMatrix x(g.num_nodes(), f);
        for (double& v : x.values) v = rng.normal();
        PropagationConfig cfg;
        cfg.q = kQGrid[t % 4];
        cfg.steps = 3;

        const auto serial = propagate(g, x, cfg, 1);
        const auto threaded = propagate(g, x, cfg, 4);
        const bool identical =
            serial.real_steps.back().values == threaded.real_steps.back().values &&
            serial.imag_steps.back().values == threaded.imag_steps.back().values;
        fold_flag(r, identical);
    }
    return r;
}

CheckResult check_rayleigh_descent_k64(const VerifyOptions& opt) {
    CheckResult r = make_result("rayleigh_descent_k64", 1e-4);
    Rng rng(opt.seed ^ 0x99ULL);
    const std::size_t cases = scaled_trials(opt, 20);
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, opt.scale);
        const double q = kQGrid[t % 4];
        const std::size_t n = g.num_nodes();
        const ComplexSparseMatrix mgo = magnetic_graph_operator(g, q);
        const auto sys = oracle::eigendecompose(DenseHermitian::from_sparse(mgo));

        // |1 - lambda_k| of L~ is |mu_k| of the operator; require the
        // algebraically largest mu to dominate in magnitude with a margin
        // wide enough that K=64 converges below the tolerance
        const std::size_t top = n - 1;
        double second = 0.0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            second = std::max(second, std::abs(sys.eigenvalues[k]));
        }
        const double mu_top = std::abs(sys.eigenvalues[top]);
        if (mu_top <= second || (second / mu_top) > 0.9) {
            ++r.skipped;
            continue;
        }

        ComplexVector x = random_signal(rng, n);
        const auto [cr, ci] = coefficient(sys, top, x);
        if (std::hypot(cr, ci) < 1e-3 * signal_norm(x)) {
            ++r.skipped;
            continue;
        }

        for (int s = 0; s < 64; ++s) {
            x = apply_sparse(mgo, x);
            const double len = signal_norm(x);
            for (std::size_t i = 0; i < n; ++i) {
                x.re[i] /= len;
                x.im[i] /= len;
            }
        }
        // smoothness under L~ = I - A^: 1 - x^dag A^ x (x is unit)
        const ComplexVector ax = apply_sparse(mgo, x);
        double quad = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            quad += x.re[i] * ax.re[i] + x.im[i] * ax.im[i];
        }
        const double smoothness = 1.0 - quad;
        const double lambda_min = 1.0 - sys.eigenvalues[top];
        fold(r, std::abs(smoothness - lambda_min));
    }
    if (r.cases == 0 && opt.trials > 0) {
        r.detail = "all cases skipped by the spectral-gap precondition";
        r.passed = false;
    }
    return r;
}

CheckResult check_spectral_containment(const VerifyOptions& opt) {
    CheckResult r = make_result("mgo_spectrum_in_unit_interval", 1e-9);
    Rng rng(opt.seed ^ 0xaaULL);
    const std::size_t cases = scaled_trials(opt, 50);
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, opt.scale);
        const double q = kQGrid[t % 4];
        const auto evals =
            oracle::eigenvalues_only(DenseHermitian::from_sparse(magnetic_graph_operator(g, q)));
        double excess = 0.0;
        for (double mu : evals) excess = std::max(excess, std::abs(mu) - 1.0);
        fold(r, std::max(0.0, excess));
    }
    return r;
}

CheckResult check_cos_theta_nonnegative(const VerifyOptions& opt) {
    CheckResult r = make_result("cos_theta_nonnegative", 0.0);
    Rng rng(opt.seed ^ 0xbbULL);
    const std::size_t cases = scaled_trials(opt, 50);
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, opt.scale);
        const double q = 0.25 * rng.uniform_real();
        const ComplexSparseMatrix theta = phase_matrix(g, q);
        bool ok = true;
        for (double th : theta.re) {
            if (std::cos(th) < 0.0) {
                ok = false;
                break;
            }
        }
        fold_flag(r, ok);
    }
    return r;
}

CheckResult check_q_zero_reduction(const VerifyOptions& opt) {
    CheckResult r = make_result("q_zero_real_reduction", 1e-14);
    Rng rng(opt.seed ^ 0xccULL);
    const std::size_t cases = scaled_trials(opt, 20);
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, opt.scale);
        const ComplexSparseMatrix at_q0 = magnetic_graph_operator(g, 0.0);
        bool ok = true;
        for (double v : at_q0.im) {
            if (v != 0.0) {
                ok = false;
                break;
            }
        }
        for (double v : at_q0.re) {
            if (v <= 0.0) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            fold_flag(r, false);
            continue;
        }
        // entry magnitudes are phase-invariant: the real operator at q = 0
        // must match |entry| of the operator at any other q, entry for entry
        const ComplexSparseMatrix at_q = magnetic_graph_operator(g, 0.05 + 0.2 * rng.uniform_real());
        double worst = 0.0;
        for (std::size_t k = 0; k < at_q0.nnz(); ++k) {
            const double magnitude = std::hypot(at_q.re[k], at_q.im[k]);
            worst = std::max(worst, std::abs(magnitude - at_q0.re[k]) / at_q0.re[k]);
        }
        fold(r, worst);
    }
    return r;
}

CheckResult check_spmm_dense_agreement(const VerifyOptions& opt) {
    CheckResult r = make_result("complex_spmm_dense_agreement", 1e-12);
    Rng rng(opt.seed ^ 0xddULL);
    const std::size_t cases = scaled_trials(opt, 50);
    const std::size_t max_n = std::min<std::size_t>(opt.scale, 64);
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, max_n);
        const double q = kQGrid[t % 4];
        const ComplexSparseMatrix m = magnetic_graph_operator(g, q);
        const DenseHermitian dense = DenseHermitian::from_sparse(m);
        const std::size_t n = g.num_nodes();
        const std::size_t f = 1 + rng.uniform(6);

        FeatureMatrix xr(n, f), xi(n, f);
        for (double& v : xr.values) v = rng.normal();
        for (double& v : xi.values) v = rng.normal();
        FeatureMatrix yr, yi;
        complex_spmm(m, xr, xi, yr, yi);

        double num = 0.0;
        double den = 1e-30;
        for (std::size_t col = 0; col < f; ++col) {
            ComplexVector v(n);
            for (std::size_t i = 0; i < n; ++i) {
                v.re[i] = xr.at(i, col);
                v.im[i] = xi.at(i, col);
            }
            const ComplexVector w = dense.apply(v);
            for (std::size_t i = 0; i < n; ++i) {
                num += (yr.at(i, col) - w.re[i]) * (yr.at(i, col) - w.re[i]) +
                       (yi.at(i, col) - w.im[i]) * (yi.at(i, col) - w.im[i]);
                den += w.re[i] * w.re[i] + w.im[i] * w.im[i];
            }
        }
        fold(r, std::sqrt(num / den));
    }
    return r;
}

CheckResult check_eigensystem_self_consistency(const VerifyOptions& opt) {
    CheckResult r = make_result("eigensystem_self_consistency", 1e-8);
    Rng rng(opt.seed ^ 0xeeULL);
    const std::size_t cases = scaled_trials(opt, 20);
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, opt.scale);
        const double q = kQGrid[t % 4];
        const DenseHermitian m = DenseHermitian::from_sparse(magnetic_laplacian(g, q));
        const auto sys = oracle::eigendecompose(m);
        const std::size_t n = m.n;

        // reconstruction ||M - U Lambda U^dag||_F <= tol ||M||_F
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double rr = 0.0;
                double ri = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double ar = sys.vec_re.at(i, k);
                    const double ai = sys.vec_im.at(i, k);
                    const double br = sys.vec_re.at(j, k);
                    const double bi = -sys.vec_im.at(j, k); // conj
                    rr += sys.eigenvalues[k] * (ar * br - ai * bi);
                    ri += sys.eigenvalues[k] * (ar * bi + ai * br);
                }
                err += (rr - m.re.at(i, j)) * (rr - m.re.at(i, j)) +
                       (ri - m.im.at(i, j)) * (ri - m.im.at(i, j));
            }
        }
        const double fro = std::max(m.frobenius_norm(), 1e-30);
        fold(r, std::sqrt(err) / fro);
    }
    return r;
}

CheckResult check_denoise_optimality(const VerifyOptions& opt) {
    CheckResult r = make_result("denoise_solution_optimality", 1e-8);
    Rng rng(opt.seed ^ 0xffULL);
    const std::size_t cases = scaled_trials(opt, 20);
    for (std::size_t t = 0; t < cases; ++t) {
        const DirectedGraph g = random_graph(rng, opt.scale);
        const double q = kQGrid[t % 4];
        const std::size_t n = g.num_nodes();
        const ComplexVector y = random_signal(rng, n);
        const ComplexVector x = oracle::denoise_solve(g, q, y);
        const ComplexSparseMatrix lm = magnetic_laplacian(g, q);

        // residual ||(L + I) x - y|| <= tol ||y||
        ComplexVector lx = apply_sparse(lm, x);
        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            resid += (lx.re[i] + x.re[i] - y.re[i]) * (lx.re[i] + x.re[i] - y.re[i]) +
                     (lx.im[i] + x.im[i] - y.im[i]) * (lx.im[i] + x.im[i] - y.im[i]);
        }
        fold(r, std::sqrt(resid) / std::max(signal_norm(y), 1e-30));
        --r.cases;

        // local optimality against random perturbations
        const double base = oracle::denoise_objective(lm, x, y);
        bool optimal = true;
        for (int probe = 0; probe < 1000; ++probe) {
            ComplexVector p = x;
            const double eps = probe % 2 == 0 ? 1e-2 : 1e-4;
            for (std::size_t i = 0; i < n; ++i) {
                p.re[i] += eps * rng.normal();
                p.im[i] += eps * rng.normal();
            }
            if (oracle::denoise_objective(lm, p, y) < base - 1e-12 * std::max(1.0, base)) {
                optimal = false;
                break;
            }
        }
        fold_flag(r, optimal);
    }
    return r;
}

CheckResult check_gradient_finite_difference(const VerifyOptions& opt) {
    CheckResult r = make_result("classifier_gradient_fd", 1e-5);
    Rng rng(opt.seed ^ 0x1234ULL);
    const std::size_t cases = scaled_trials(opt, 50);
    for (std::size_t t = 0; t < cases; ++t) {
        const std::size_t rows = 3 + rng.uniform(10);
        const std::size_t d = 2 + rng.uniform(6);
        const std::size_t c = 2 + rng.uniform(3);
        const double wd = (t % 3 == 0) ? 0.1 : 0.0;

        LinearModel model = LinearModel::zeros(d, c, true);
        for (double& w : model.weights) w = 0.5 * rng.normal();
        for (double& b : model.bias) b = 0.5 * rng.normal();

        FeatureMatrix x(rows, d);
        for (double& v : x.values) v = rng.normal();
        std::vector<std::int64_t> y(rows);
        for (auto& label : y) label = static_cast<std::int64_t>(rng.uniform(c));

        std::vector<double> gw, gb;
        loss_and_gradient(model, x, y, wd, gw, gb);

        const double eps = 1e-5;
        std::vector<double> fd_w(gw.size()), fd_b(gb.size());
        std::vector<double> scratch_w, scratch_b;
        for (std::size_t i = 0; i < gw.size(); ++i) {
            LinearModel probe = model;
            probe.weights[i] = model.weights[i] + eps;
            const double up = loss_and_gradient(probe, x, y, wd, scratch_w, scratch_b);
            probe.weights[i] = model.weights[i] - eps;
            const double down = loss_and_gradient(probe, x, y, wd, scratch_w, scratch_b);
            fd_w[i] = (up - down) / (2.0 * eps);
        }
        for (std::size_t i = 0; i < gb.size(); ++i) {
            LinearModel probe = model;
            probe.bias[i] = model.bias[i] + eps;
            const double up = loss_and_gradient(probe, x, y, wd, scratch_w, scratch_b);
            probe.bias[i] = model.bias[i] - eps;
            const double down = loss_and_gradient(probe, x, y, wd, scratch_w, scratch_b);
            fd_b[i] = (up - down) / (2.0 * eps);
        }

        double num = 0.0;
        double den = 1e-30;
        for (std::size_t i = 0; i < gw.size(); ++i) {
            num += (gw[i] - fd_w[i]) * (gw[i] - fd_w[i]);
            den += gw[i] * gw[i];
        }
        for (std::size_t i = 0; i < gb.size(); ++i) {
            num += (gb[i] - fd_b[i]) * (gb[i] - fd_b[i]);
            den += gb[i] * gb[i];
        }
        fold(r, std::sqrt(num / den));
    }
    return r;
}

CheckResult check_metrics_brute_force(const VerifyOptions& opt) {
    CheckResult r = make_result("metrics_equal_brute_force", 0.0);
    Rng rng(opt.seed ^ 0x5678ULL);
    const std::size_t cases = scaled_trials(opt, 50);
    for (std::size_t t = 0; t < cases; ++t) {
        const std::size_t count = 2 + rng.uniform(199);

        // AUC: quantized scores force plenty of ties
        std::vector<double> scores(count);
        std::vector<std::int64_t> labels(count);
        bool has_pos = false;
        bool has_neg = false;
        for (std::size_t i = 0; i < count; ++i) {
            scores[i] = 0.1 * static_cast<double>(rng.uniform(11));
            labels[i] = static_cast<std::int64_t>(rng.uniform(2));
            (labels[i] == 1 ? has_pos : has_neg) = true;
        }
        if (!has_pos) labels[0] = 1;
        if (!has_neg) labels[count == 1 ? 0 : 1] = 0;

        double pairs = 0.0;
        double won = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            if (labels[i] != 1) continue;
            for (std::size_t j = 0; j < count; ++j) {
                if (labels[j] != 0) continue;
                pairs += 1.0;
                if (scores[i] > scores[j]) {
                    won += 1.0;
                } else if (scores[i] == scores[j]) {
                    won += 0.5;
                }
            }
        }
        const double brute_auc = won / pairs;
        fold_flag(r, metrics::auc(scores, labels) == brute_auc);
        --r.cases;

        // macro-F1 against a from-scratch per-class recount
        const std::size_t classes = 2 + rng.uniform(4);
        std::vector<std::int64_t> pred(count), truth(count);
        for (std::size_t i = 0; i < count; ++i) {
            pred[i] = static_cast<std::int64_t>(rng.uniform(classes));
            truth[i] = static_cast<std::int64_t>(rng.uniform(classes));
        }
        double f1_sum = 0.0;
        for (std::size_t k = 0; k < classes; ++k) {
            double tp = 0.0;
            double pred_k = 0.0;
            double truth_k = 0.0;
            for (std::size_t i = 0; i < count; ++i) {
                if (pred[i] == static_cast<std::int64_t>(k) &&
                    truth[i] == static_cast<std::int64_t>(k)) {
                    tp += 1.0;
                }
                if (pred[i] == static_cast<std::int64_t>(k)) pred_k += 1.0;
                if (truth[i] == static_cast<std::int64_t>(k)) truth_k += 1.0;
            }
            const double precision = pred_k > 0.0 ? tp / pred_k : 0.0;
            const double recall = truth_k > 0.0 ? tp / truth_k : 0.0;
            f1_sum += (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        }
        const double brute_f1 = f1_sum / static_cast<double>(classes);
        fold_flag(r, metrics::macro_f1(pred, truth, classes) == brute_f1);
    }
    return r;
}

CheckResult check_format_roundtrip(const VerifyOptions& opt) {
    CheckResult r = make_result("format_roundtrip_bit_exact", 0.0);
    Rng rng(opt.seed ^ 0x9abcULL);
    const std::size_t cases = scaled_trials(opt, 20);

    namespace fs = std::filesystem;
    const fs::path dir = opt.scratch_dir.empty()
                             ? fs::temp_directory_path() / "lightdic_verify"
                             : fs::path(opt.scratch_dir);
    fs::create_directories(dir);

    for (std::size_t t = 0; t < cases; ++t) {
        const std::string tag = std::to_string(t);
        bool ok = true;

        FeatureMatrix fm(1 + rng.uniform(20), 1 + rng.uniform(8));
        for (double& v : fm.values) v = rng.normal();
        const std::string f_path = (dir / ("f" + tag + ".ldcf")).string();
        io::write_features(fm, f_path);
        const FeatureMatrix fm2 = io::read_features(f_path);
        ok = ok && fm2.rows == fm.rows && fm2.cols == fm.cols &&
             std::memcmp(fm2.values.data(), fm.values.data(), fm.values.size() * 8) == 0;

        std::vector<std::int64_t> labels(1 + rng.uniform(50));
        for (auto& v : labels) v = static_cast<std::int64_t>(rng.uniform(7));
        const std::string l_path = (dir / ("l" + tag + ".ldcf")).string();
        io::write_labels(labels, l_path);
        ok = ok && io::read_labels(l_path) == labels;

        const DirectedGraph g = random_graph(rng, std::max<std::size_t>(opt.scale, 8));
        const ComplexSparseMatrix mgo = magnetic_graph_operator(g, 0.1);
        const std::string m_path = (dir / ("m" + tag + ".ldcm")).string();
        io::write_matrix(mgo, m_path);
        const ComplexSparseMatrix mgo2 = io::read_matrix(m_path);
        ok = ok && mgo2.n == mgo.n && mgo2.row_ptr == mgo.row_ptr && mgo2.col_idx == mgo.col_idx &&
             std::memcmp(mgo2.re.data(), mgo.re.data(), mgo.re.size() * 8) == 0 &&
             std::memcmp(mgo2.im.data(), mgo.im.data(), mgo.im.size() * 8) == 0;

        AggregatedFeatures agg;
        agg.n = 1 + rng.uniform(16);
        agg.width = 1 + rng.uniform(6);
        agg.real = FeatureMatrix(agg.n, agg.width);
        agg.imag = FeatureMatrix(agg.n, agg.width);
        for (double& v : agg.real.values) v = rng.normal();
        for (double& v : agg.imag.values) v = rng.normal();
        agg.config.q = 0.25 * rng.uniform_real();
        agg.config.steps = rng.uniform(11);
        agg.config.aggregation = static_cast<Aggregation>(rng.uniform(4));
        agg.graph_fingerprint = rng.next_u64();
        const std::string p_path = (dir / ("p" + tag + ".ldcp")).string();
        io::write_cache(agg, p_path);
        const AggregatedFeatures agg2 = io::read_cache(p_path);
        ok = ok && agg2.n == agg.n && agg2.width == agg.width && agg2.config.q == agg.config.q &&
             agg2.config.steps == agg.config.steps &&
             agg2.config.aggregation == agg.config.aggregation &&
             agg2.graph_fingerprint == agg.graph_fingerprint &&
             std::memcmp(agg2.real.values.data(), agg.real.values.data(),
                         agg.real.values.size() * 8) == 0 &&
             std::memcmp(agg2.imag.values.data(), agg.imag.values.data(),
                         agg.imag.values.size() * 8) == 0;

        LinearModel model = LinearModel::zeros(1 + rng.uniform(12), 2 + rng.uniform(5),
                                               rng.uniform(2) == 1);
        for (double& w : model.weights) w = rng.normal();
        for (double& b : model.bias) b = rng.normal();
        const std::string w_path = (dir / ("w" + tag + ".ldcw")).string();
        io::write_model(model, w_path);
        const LinearModel model2 = io::read_model(w_path);
        ok = ok && model2.d_in == model.d_in && model2.num_classes == model.num_classes &&
             model2.has_bias == model.has_bias &&
             std::memcmp(model2.weights.data(), model.weights.data(),
                         model.weights.size() * 8) == 0 &&
             std::memcmp(model2.bias.data(), model.bias.data(), model.bias.size() * 8) == 0;

        fold_flag(r, ok);
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    return r;
}

std::vector<CheckResult> run_all(const VerifyOptions& opt) {
    std::vector<CheckResult> results;
    results.push_back(check_hermitian_psd(opt));
    results.push_back(check_dirichlet_equality(opt));
    results.push_back(check_lowpass_filter(opt));
    results.push_back(check_rayleigh_order(opt));
    results.push_back(check_prox_descent(opt));
    results.push_back(check_propagation_equivalence(opt));
    results.push_back(check_propagation_linearity(opt));
    results.push_back(check_propagation_determinism(opt));
    results.push_back(check_rayleigh_descent_k64(opt));
    results.push_back(check_spectral_containment(opt));
    results.push_back(check_cos_theta_nonnegative(opt));
    results.push_back(check_q_zero_reduction(opt));
    results.push_back(check_spmm_dense_agreement(opt));
    results.push_back(check_eigensystem_self_consistency(opt));
    results.push_back(check_denoise_optimality(opt));
    results.push_back(check_gradient_finite_difference(opt));
    results.push_back(check_metrics_brute_force(opt));
    results.push_back(check_format_roundtrip(opt));
    return results;
}

} // namespace lightdic::verify
