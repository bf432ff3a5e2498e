#include "lightdic/oracle.hpp"

#include "lightdic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lightdic::oracle {

namespace {

double sq(double x) { return x * x; }

struct Complex {
    double re = 0.0;
    double im = 0.0;
};

Complex inner(const ComplexVector& a, const ComplexVector& b) {
    // <a, b> = sum conj(a_i) b_i
    Complex acc;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc.re += a.re[i] * b.re[i] + a.im[i] * b.im[i];
        acc.im += a.re[i] * b.im[i] - a.im[i] * b.re[i];
    }
    return acc;
}

double norm(const ComplexVector& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += sq(a.re[i]) + sq(a.im[i]);
    return std::sqrt(s);
}

} // namespace

DenseHermitian DenseHermitian::from_sparse(const ComplexSparseMatrix& m) {
    DenseHermitian d(m.n);
    for (NodeId u = 0; u < m.n; ++u) {
        for (std::uint64_t k = m.row_ptr[u]; k < m.row_ptr[u + 1]; ++k) {
            const NodeId v = m.col_idx[k];
            d.re.at(u, v) = m.re[k];
            d.im.at(u, v) = m.im[k];
        }
    }
    return d;
}

double DenseHermitian::hermitian_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            worst = std::max(worst, std::abs(re.at(i, j) - re.at(j, i)));
            worst = std::max(worst, std::abs(im.at(i, j) + im.at(j, i)));
        }
    }
    return worst;
}

double DenseHermitian::frobenius_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) s += sq(re.a[i]) + sq(im.a[i]);
    return std::sqrt(s);
}

ComplexVector DenseHermitian::apply(const ComplexVector& x) const {
    ComplexVector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double yr = 0.0;
        double yi = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double mr = re.at(i, j);
            const double mi = im.at(i, j);
            yr += mr * x.re[j] - mi * x.im[j];
            yi += mr * x.im[j] + mi * x.re[j];
        }
        y.re[i] = yr;
        y.im[i] = yi;
    }
    return y;
}

void jacobi_symmetric(DenseMatrix work, std::vector<double>& eigenvalues,
                      DenseMatrix* vectors) {
    const std::size_t n = work.n;
    if (vectors != nullptr) {
        *vectors = DenseMatrix(n);
        for (std::size_t i = 0; i < n; ++i) vectors->at(i, i) = 1.0;
    }
    eigenvalues.assign(n, 0.0);
    if (n == 0) return;

    double fro = 0.0;
    for (double v : work.a) fro += sq(v);
    fro = std::sqrt(fro);
    const double stop = 1e-14 * std::max(fro, 1e-300);

    constexpr int kMaxSweeps = 80;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) off += sq(work.at(i, j));
        }
        if (std::sqrt(2.0 * off) <= stop) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = work.at(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (work.at(q, q) - work.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(theta * theta + 1.0))
                                     : 1.0 / (theta - std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const double app = work.at(p, p);
                const double aqq = work.at(q, q);
                work.at(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                work.at(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                work.at(p, q) = 0.0;
                work.at(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = work.at(i, p);
                    const double aiq = work.at(i, q);
                    work.at(i, p) = c * aip - s * aiq;
                    work.at(p, i) = work.at(i, p);
                    work.at(i, q) = s * aip + c * aiq;
                    work.at(q, i) = work.at(i, q);
                }
                if (vectors != nullptr) {
                    for (std::size_t i = 0; i < n; ++i) {
                        const double vip = vectors->at(i, p);
                        const double viq = vectors->at(i, q);
                        vectors->at(i, p) = c * vip - s * viq;
                        vectors->at(i, q) = s * vip + c * viq;
                    }
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = work.at(i, i);
    std::stable_sort(order.begin(), order.end(),
                     [&diag](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });
    for (std::size_t k = 0; k < n; ++k) eigenvalues[k] = diag[order[k]];
    if (vectors != nullptr) {
        DenseMatrix sorted(n);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) sorted.at(i, k) = vectors->at(i, order[k]);
        }
        *vectors = std::move(sorted);
    }
}

namespace {

DenseMatrix build_embedding(const DenseHermitian& m) {
    const std::size_t n = m.n;
    DenseMatrix e(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            e.at(i, j) = m.re.at(i, j);
            e.at(i, j + n) = -m.im.at(i, j);
            e.at(i + n, j) = m.im.at(i, j);
            e.at(i + n, j + n) = m.re.at(i, j);
        }
    }
    return e;
}

void check_hermitian(const DenseHermitian& m) {
    const double scale = std::max(m.frobenius_norm(), 1.0);
    if (m.hermitian_defect() > 1e-12 * scale) {
        throw InputError("eigendecompose: input is not Hermitian");
    }
}

} // namespace

std::vector<double> eigenvalues_only(const DenseHermitian& m) {
    check_hermitian(m);
    std::vector<double> mu;
    jacobi_symmetric(build_embedding(m), mu, nullptr);
    std::vector<double> lambda(m.n);
    for (std::size_t k = 0; k < m.n; ++k) lambda[k] = 0.5 * (mu[2 * k] + mu[2 * k + 1]);
    return lambda;
}

EigenSystem eigendecompose(const DenseHermitian& m) {
    check_hermitian(m);
    const std::size_t n = m.n;

    std::vector<double> mu;
    DenseMatrix w;
    jacobi_symmetric(build_embedding(m), mu, &w);

    EigenSystem sys;
    sys.eigenvalues.resize(n);
    sys.vec_re = DenseMatrix(n);
    sys.vec_im = DenseMatrix(n);
    for (std::size_t k = 0; k < n; ++k) {
        sys.eigenvalues[k] = 0.5 * (mu[2 * k] + mu[2 * k + 1]);
    }
    if (n == 0) return sys;

    const double fro = m.frobenius_norm();
    const double cluster_tol = 1e-9 * std::max(fro, 1e-30);

    // Recover complex eigenvectors cluster by cluster. Embedding column j
    // maps to the complex candidate x + i y with x = top half, y = bottom
    // half; within each eigenvalue cluster a complex modified Gram-Schmidt
    // keeps one representative per doubled pair (the i*u duplicates project
    // away to ~0) and a phase convention makes the result deterministic.
    std::size_t k = 0;
    std::size_t out_col = 0;
    while (k < n) {
        std::size_t k_end = k + 1;
        while (k_end < n && sys.eigenvalues[k_end] - sys.eigenvalues[k_end - 1] <= cluster_tol) {
            ++k_end;
        }
        const std::size_t r = k_end - k;
        std::vector<ComplexVector> accepted;
        accepted.reserve(r);
        for (std::size_t j = 2 * k; j < 2 * k_end && accepted.size() < r; ++j) {
            ComplexVector u(n);
            for (std::size_t i = 0; i < n; ++i) {
                u.re[i] = w.at(i, j);
                u.im[i] = w.at(i + n, j);
            }
            for (const auto& a : accepted) {
                const Complex proj = inner(a, u);
                for (std::size_t i = 0; i < n; ++i) {
                    u.re[i] -= proj.re * a.re[i] - proj.im * a.im[i];
                    u.im[i] -= proj.re * a.im[i] + proj.im * a.re[i];
                }
            }
            const double len = norm(u);
            if (len < 0.25) continue; // duplicate of an accepted direction
            for (std::size_t i = 0; i < n; ++i) {
                u.re[i] /= len;
                u.im[i] /= len;
            }
            accepted.push_back(std::move(u));
        }
        if (accepted.size() != r) {
            throw NumericError("eigendecompose: failed to recover a full eigenbasis");
        }
        for (auto& u : accepted) {
            // phase convention: first component with significant magnitude
            // becomes real positive
            double colmax = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                colmax = std::max(colmax, std::hypot(u.re[i], u.im[i]));
            }
            std::size_t pivot = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (std::hypot(u.re[i], u.im[i]) >= 1e-8 * colmax) {
                    pivot = i;
                    break;
                }
            }
            const double mag = std::hypot(u.re[pivot], u.im[pivot]);
            const double cr = u.re[pivot] / mag;
            const double ci = -u.im[pivot] / mag;
            for (std::size_t i = 0; i < n; ++i) {
                const double nr = cr * u.re[i] - ci * u.im[i];
                const double ni = cr * u.im[i] + ci * u.re[i];
                u.re[i] = nr;
                u.im[i] = ni;
            }
            for (std::size_t i = 0; i < n; ++i) {
                sys.vec_re.at(i, out_col) = u.re[i];
                sys.vec_im.at(i, out_col) = u.im[i];
            }
            ++out_col;
        }
        k = k_end;
    }

    // self-checks: residual and orthonormality at 1e-8 scale
    const double residual_tol = 1e-8 * std::max(fro, 1e-30);
    for (std::size_t kk = 0; kk < n; ++kk) {
        ComplexVector u(n);
        for (std::size_t i = 0; i < n; ++i) {
            u.re[i] = sys.vec_re.at(i, kk);
            u.im[i] = sys.vec_im.at(i, kk);
        }
        ComplexVector mu_vec = m.apply(u);
        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            resid += sq(mu_vec.re[i] - sys.eigenvalues[kk] * u.re[i]) +
                     sq(mu_vec.im[i] - sys.eigenvalues[kk] * u.im[i]);
        }
        if (std::sqrt(resid) > residual_tol) {
            throw NumericError("eigendecompose: residual check failed");
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
            double pr = 0.0;
            double pi = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                pr += sys.vec_re.at(i, a) * sys.vec_re.at(i, b) +
                      sys.vec_im.at(i, a) * sys.vec_im.at(i, b);
                pi += sys.vec_re.at(i, a) * sys.vec_im.at(i, b) -
                      sys.vec_im.at(i, a) * sys.vec_re.at(i, b);
            }
            const double expect = (a == b) ? 1.0 : 0.0;
            if (std::hypot(pr - expect, pi) > 1e-8) {
                throw NumericError("eigendecompose: orthonormality check failed");
            }
        }
    }
    return sys;
}

double dirichlet_energy(const DirectedGraph& graph, double q, const ComplexVector& x) {
    if (x.size() != graph.num_nodes()) {
        throw InputError("dirichlet_energy: vector length != node count");
    }
    const ComplexSparseMatrix am = symmetrized_adjacency(graph);
    const ComplexSparseMatrix theta = phase_matrix(graph, q);
    double energy = 0.0;
    for (NodeId u = 0; u < am.n; ++u) {
        for (std::uint64_t k = am.row_ptr[u]; k < am.row_ptr[u + 1]; ++k) {
            const NodeId v = am.col_idx[k];
            if (v <= u) continue; // each unordered pair once
            const double w = am.re[k];
            const double th = theta.re[k];
            const double c = std::cos(th);
            const double s = std::sin(th);
            // x_u - e^{i th} x_v
            const double dr = x.re[u] - (c * x.re[v] - s * x.im[v]);
            const double di = x.im[u] - (c * x.im[v] + s * x.re[v]);
            energy += w * (sq(dr) + sq(di));
        }
    }
    return energy;
}

double dirichlet_quadratic_form(const ComplexSparseMatrix& laplacian, const ComplexVector& x) {
    // x^dag L x: imaginary part vanishes for Hermitian L, so only the real
    // part is accumulated
    double acc = 0.0;
    for (NodeId u = 0; u < laplacian.n; ++u) {
        for (std::uint64_t k = laplacian.row_ptr[u]; k < laplacian.row_ptr[u + 1]; ++k) {
            const NodeId v = laplacian.col_idx[k];
            const double lr = laplacian.re[k];
            const double li = laplacian.im[k];
            // conj(x_u) * (lr + i li) * x_v, real part
            const double tr = lr * x.re[v] - li * x.im[v];
            const double ti = lr * x.im[v] + li * x.re[v];
            acc += x.re[u] * tr + x.im[u] * ti;
        }
    }
    return acc;
}

double denoise_objective(const ComplexSparseMatrix& laplacian, const ComplexVector& x,
                         const ComplexVector& y) {
    double fidelity = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        fidelity += sq(x.re[i] - y.re[i]) + sq(x.im[i] - y.im[i]);
    }
    return fidelity + dirichlet_quadratic_form(laplacian, x);
}

ComplexVector denoise_solve(const DirectedGraph& graph, double q, const ComplexVector& y) {
    const auto lm = DenseHermitian::from_sparse(magnetic_laplacian(graph, q));
    const EigenSystem sys = eigendecompose(lm);
    const std::size_t n = lm.n;

    ComplexVector x(n);
    for (std::size_t k = 0; k < n; ++k) {
        ComplexVector u(n);
        for (std::size_t i = 0; i < n; ++i) {
            u.re[i] = sys.vec_re.at(i, k);
            u.im[i] = sys.vec_im.at(i, k);
        }
        const Complex coef = inner(u, y);
        const double scale = 1.0 / (sys.eigenvalues[k] + 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            x.re[i] += scale * (coef.re * u.re[i] - coef.im * u.im[i]);
            x.im[i] += scale * (coef.re * u.im[i] + coef.im * u.re[i]);
        }
    }
    return x;
}

ComplexVector prox_gradient_iterate(const DirectedGraph& graph, double q,
                                    const ComplexVector& y, const ComplexVector& x0,
                                    double alpha, std::size_t steps) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw InputError("prox_gradient_iterate: alpha must lie in (0, 1]");
    }
    const ComplexSparseMatrix lm = magnetic_laplacian(graph, q);
    const std::size_t n = lm.n;

    // A_m .* e^{i Theta} is -L off the diagonal; d~ = D_m + I from the diagonal
    std::vector<double> inv_deg(n);
    for (NodeId u = 0; u < n; ++u) {
        auto [dr, di] = lm.entry(u, u);
        (void)di;
        inv_deg[u] = 1.0 / (dr + 1.0);
    }

    ComplexVector x = x0;
    ComplexVector next(n);
    for (std::size_t step = 0; step < steps; ++step) {
        for (NodeId u = 0; u < n; ++u) {
            double zr = y.re[u];
            double zi = y.im[u];
            for (std::uint64_t k = lm.row_ptr[u]; k < lm.row_ptr[u + 1]; ++k) {
                const NodeId v = lm.col_idx[k];
                if (v == u) continue;
                const double ar = -lm.re[k];
                const double ai = -lm.im[k];
                zr += ar * x.re[v] - ai * x.im[v];
                zi += ar * x.im[v] + ai * x.re[v];
            }
            next.re[u] = (1.0 - alpha) * x.re[u] + alpha * inv_deg[u] * zr;
            next.im[u] = (1.0 - alpha) * x.im[u] + alpha * inv_deg[u] * zi;
        }
        std::swap(x, next);
    }
    return x;
}

} // namespace lightdic::oracle
