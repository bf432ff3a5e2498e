#if defined(__aarch64__)

#include "lightdic/kernels.hpp"

#include <arm_neon.h>

// NEON is baseline on aarch64, so no runtime feature probe is needed.

namespace lightdic::kernels {
namespace {

void caxpy2_neon(double ar, double ai, const double* xr, const double* xi,
                 double* yr, double* yi, std::size_t n) {
    const float64x2_t var = vdupq_n_f64(ar);
    const float64x2_t vai = vdupq_n_f64(ai);
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        const float64x2_t vxr = vld1q_f64(xr + j);
        const float64x2_t vxi = vld1q_f64(xi + j);
        float64x2_t vyr = vld1q_f64(yr + j);
        float64x2_t vyi = vld1q_f64(yi + j);
        vyr = vfmaq_f64(vyr, var, vxr);
        vyr = vfmsq_f64(vyr, vai, vxi);
        vyi = vfmaq_f64(vyi, var, vxi);
        vyi = vfmaq_f64(vyi, vai, vxr);
        vst1q_f64(yr + j, vyr);
        vst1q_f64(yi + j, vyi);
    }
    for (; j < n; ++j) {
        yr[j] += ar * xr[j] - ai * xi[j];
        yi[j] += ar * xi[j] + ai * xr[j];
    }
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        vst1q_f64(y + j, vfmaq_f64(vld1q_f64(y + j), va, vld1q_f64(x + j)));
    }
    for (; j < n; ++j) y[j] += a * x[j];
}

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + j), vld1q_f64(y + j));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + j + 2), vld1q_f64(y + j + 2));
    }
    for (; j + 2 <= n; j += 2) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + j), vld1q_f64(y + j));
    }
    acc0 = vaddq_f64(acc0, acc1);
    double sum = vgetq_lane_f64(acc0, 0) + vgetq_lane_f64(acc0, 1);
    for (; j < n; ++j) sum += x[j] * y[j];
    return sum;
}

void add_neon(const double* x, double* y, std::size_t n) {
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        vst1q_f64(y + j, vaddq_f64(vld1q_f64(x + j), vld1q_f64(y + j)));
    }
    for (; j < n; ++j) y[j] += x[j];
}

void scale_neon(double a, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        vst1q_f64(y + j, vmulq_f64(va, vld1q_f64(y + j)));
    }
    for (; j < n; ++j) y[j] *= a;
}

} // namespace

const KernelTable& neon_table() {
    static const KernelTable table{
        "neon", caxpy2_neon, axpy_neon, dot_neon, add_neon, scale_neon,
    };
    return table;
}

} // namespace lightdic::kernels

#endif // aarch64
