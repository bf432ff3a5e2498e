#include "lightdic/kernels.hpp"

namespace lightdic::kernels {
namespace {

void caxpy2_scalar(double ar, double ai, const double* xr, const double* xi,
                   double* yr, double* yi, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        yr[j] += ar * xr[j] - ai * xi[j];
        yi[j] += ar * xi[j] + ai * xr[j];
    }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) y[j] += a * x[j];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += x[j] * y[j];
    return acc;
}

void add_scalar(const double* x, double* y, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) y[j] += x[j];
}

void scale_scalar(double a, double* y, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) y[j] *= a;
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        "scalar", caxpy2_scalar, axpy_scalar, dot_scalar, add_scalar, scale_scalar,
    };
    return table;
}

} // namespace lightdic::kernels
