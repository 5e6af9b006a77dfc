#include "ffr/simd/kernels.hpp"

namespace ffr::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* w, std::size_t rows, std::size_t cols, const double* x,
                 double* out) {
    for (std::size_t r = 0; r < rows; ++r) out[r] = dot_scalar(w + r * cols, x, cols);
}

void rank1_scalar(double* w, std::size_t rows, std::size_t cols, const double* coeff,
                  const double* x) {
    for (std::size_t r = 0; r < rows; ++r) {
        if (coeff[r] == 0.0) continue;
        axpy_scalar(coeff[r], x, w + r * cols, cols);
    }
}

double sum_squares_scalar(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
    return s;
}

constexpr KernelTable kScalar{Isa::scalar, dot_scalar, axpy_scalar, gemv_scalar,
                              rank1_scalar, sum_squares_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace ffr::simd
