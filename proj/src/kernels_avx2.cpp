#if defined(__x86_64__) || defined(_M_X64)

#include "lightdic/kernels.hpp"

#include <immintrin.h>

// Compiled with -mavx2 -mfma (see src/CMakeLists.txt); only ever called
// after the runtime CPUID check in kernels.cpp.

namespace lightdic::kernels {
namespace {

void caxpy2_avx2(double ar, double ai, const double* xr, const double* xi,
                 double* yr, double* yi, std::size_t n) {
    const __m256d var = _mm256_set1_pd(ar);
    const __m256d vai = _mm256_set1_pd(ai);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d vxr = _mm256_loadu_pd(xr + j);
        const __m256d vxi = _mm256_loadu_pd(xi + j);
        __m256d vyr = _mm256_loadu_pd(yr + j);
        __m256d vyi = _mm256_loadu_pd(yi + j);
        vyr = _mm256_fmadd_pd(var, vxr, vyr);
        vyr = _mm256_fnmadd_pd(vai, vxi, vyr);
        vyi = _mm256_fmadd_pd(var, vxi, vyi);
        vyi = _mm256_fmadd_pd(vai, vxr, vyi);
        _mm256_storeu_pd(yr + j, vyr);
        _mm256_storeu_pd(yi + j, vyi);
    }
    for (; j < n; ++j) {
        yr[j] += ar * xr[j] - ai * xi[j];
        yi[j] += ar * xi[j] + ai * xr[j];
    }
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j));
        _mm256_storeu_pd(y + j, vy);
    }
    for (; j < n; ++j) y[j] += a * x[j];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + j + 4), _mm256_loadu_pd(y + j + 4), acc1);
    }
    for (; j + 4 <= n; j += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j), acc0);
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc0);
    double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; j < n; ++j) sum += x[j] * y[j];
    return sum;
}

void add_avx2(const double* x, double* y, std::size_t n) {
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        _mm256_storeu_pd(y + j, _mm256_add_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j)));
    }
    for (; j < n; ++j) y[j] += x[j];
}

void scale_avx2(double a, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        _mm256_storeu_pd(y + j, _mm256_mul_pd(va, _mm256_loadu_pd(y + j)));
    }
    for (; j < n; ++j) y[j] *= a;
}

} // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{
        "avx2", caxpy2_avx2, axpy_avx2, dot_avx2, add_avx2, scale_avx2,
    };
    return table;
}

} // namespace lightdic::kernels

#endif // x86-64
