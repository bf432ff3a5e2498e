#pragma once

#include <cstddef>

namespace lightdic::kernels {

/// Dispatch table of the dense f64 inner loops everything hot routes through:
/// the complex-plane axpy of the propagation product, and the axpy/dot/add
/// reductions used by aggregation and the linear model.
///
/// One scalar reference table always exists; vectorized tables (AVX2 on
/// x86-64, NEON on aarch64) are selected at runtime when the CPU supports
/// them. Scalar and vector variants are equivalence-tested against each
/// other; all variants process elements in a fixed order per call, so a given
/// backend is bit-deterministic.
struct KernelTable {
    const char* name;

    /// yr += ar*xr - ai*xi ; yi += ar*xi + ai*xr
    /// (accumulates a complex scalar times a complex row stored as two planes)
    void (*caxpy2)(double ar, double ai, const double* xr, const double* xi,
                   double* yr, double* yi, std::size_t n);

    /// y += a*x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);

    /// sum_i x[i]*y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);

    /// y += x
    void (*add)(const double* x, double* y, std::size_t n);

    /// y *= a
    void (*scale)(double a, double* y, std::size_t n);
};

const KernelTable& scalar_table();

#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
bool avx2_supported();
#endif

#if defined(__aarch64__)
const KernelTable& neon_table();
#endif

/// Best table for this machine, chosen once per process. Honors
/// LIGHTDIC_KERNELS=scalar|avx2|neon as an override (unknown or unsupported
/// values fall back to autodetection).
const KernelTable& active();

} // namespace lightdic::kernels
