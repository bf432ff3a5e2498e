#pragma once

#include "lightdic/graph.hpp"
#include "lightdic/magnetic.hpp"

#include <cstddef>
#include <vector>

namespace lightdic::oracle {

/// Dense row-major square matrix (oracle scale only).
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> a;

    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Complex vector stored as paired real planes.
struct ComplexVector {
    std::vector<double> re;
    std::vector<double> im;

    ComplexVector() = default;
    explicit ComplexVector(std::size_t size) : re(size, 0.0), im(size, 0.0) {}

    std::size_t size() const { return re.size(); }
};

/// Dense Hermitian matrix as two real planes (re symmetric, im antisymmetric).
struct DenseHermitian {
    std::size_t n = 0;
    DenseMatrix re;
    DenseMatrix im;

    DenseHermitian() = default;
    explicit DenseHermitian(std::size_t size) : n(size), re(size), im(size) {}

    static DenseHermitian from_sparse(const ComplexSparseMatrix& m);

    /// Largest Hermitian-symmetry violation max|re-re^T|, max|im+im^T|.
    double hermitian_defect() const;

    double frobenius_norm() const;

    /// y = M x (complex matvec).
    ComplexVector apply(const ComplexVector& x) const;
};

/// Full spectrum of a Hermitian matrix: ascending eigenvalues with
/// orthonormal complex eigenvectors (column k of vec_re/vec_im is u_k).
struct EigenSystem {
    std::vector<double> eigenvalues;
    DenseMatrix vec_re;
    DenseMatrix vec_im;
};

/// Cyclic Jacobi eigendecomposition of a dense real symmetric matrix.
/// Eigenvalues ascending; eigenvector columns fill `vectors` when non-null.
void jacobi_symmetric(DenseMatrix work, std::vector<double>& eigenvalues,
                      DenseMatrix* vectors);

/// Hermitian eigendecomposition through the 2n real-symmetric embedding
/// [[re, -im], [im, re]], whose spectrum is the complex spectrum doubled.
/// Complex eigenvectors are recovered pairwise with a deterministic phase
/// convention (first significant component real positive). Throws InputError
/// on non-Hermitian input, NumericError if residual or orthonormality checks
/// fail afterwards.
EigenSystem eigendecompose(const DenseHermitian& m);

/// Eigenvalues only (skips eigenvector accumulation; about half the work).
std::vector<double> eigenvalues_only(const DenseHermitian& m);

/// Dirichlet energy as the phase-aligned edge-difference sum: each unordered
/// symmetrized pair counted once with its A_m weight,
/// sum w_uv |x_u - e^{i theta_uv} x_v|^2. Equals x^dag L_m x.
double dirichlet_energy(const DirectedGraph& graph, double q, const ComplexVector& x);

/// Same energy evaluated as the quadratic form from the sparse L_m; the
/// independent second route of the energy identity check.
double dirichlet_quadratic_form(const ComplexSparseMatrix& laplacian, const ComplexVector& x);

/// Denoising objective ||x - y||_2^2 + x^dag L_m x.
double denoise_objective(const ComplexSparseMatrix& laplacian, const ComplexVector& x,
                         const ComplexVector& y);

/// Closed-form denoiser (L_m + I)^{-1} y via the eigendecomposition.
ComplexVector denoise_solve(const DirectedGraph& graph, double q, const ComplexVector& y);

/// Preconditioned proximal-gradient iteration
/// x <- (1 - alpha) x + alpha (D_m + I)^{-1} [(A_m .* e^{i Theta}) x + y],
/// whose fixed point is (L_m + I)^{-1} y.
ComplexVector prox_gradient_iterate(const DirectedGraph& graph, double q,
                                    const ComplexVector& y, const ComplexVector& x0,
                                    double alpha, std::size_t steps);

} // namespace lightdic::oracle
