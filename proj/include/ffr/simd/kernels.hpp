#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace ffr::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Dense double-precision kernels behind the policy's inner loops.
///
/// Every entry point has a scalar reference implementation; the AVX2+FMA
/// variant is equivalent up to summation order and contraction, and is
/// selected at startup when the CPU supports it. Results are bitwise
/// reproducible for a fixed Isa.
struct KernelTable {
    Isa isa;
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    /// out[r] = W[r, :] . x  for a row-major rows x cols matrix
    void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x,
                 double* out);
    /// W[r, :] += coeff[r] * x  (rank-1 update, skipping zero coefficients)
    void (*rank1)(double* w, std::size_t rows, std::size_t cols, const double* coeff,
                  const double* x);
    double (*sum_squares)(const double* a, std::size_t n);
};

const KernelTable& scalar_kernels();

/// Null when the binary or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Active table. Chosen once: FFR_SIMD=scalar|avx2 overrides autodetection.
const KernelTable& kernels();

/// Test hook; returns the previously active Isa.
Isa set_active_isa(Isa isa);

// Convenience wrappers over the active table.
inline double dot(std::span<const double> a, std::span<const double> b) {
    return kernels().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    kernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace ffr::simd
