#pragma once

// Data-parallel inner loops shared by the restoration pipeline. Every kernel
// has a portable scalar reference implementation; an AVX2/FMA variant is
// selected at runtime when the CPU supports it. The EDOF_SIMD environment
// variable ("scalar" or "avx2") overrides the automatic choice.

#include <complex>
#include <cstddef>
#include <string_view>

namespace edof::simd {

using Complex = std::complex<double>;

enum class Isa { scalar, avx2 };

struct VariationSums {
    double total = 0.0;     // sum of |o[i + step] - o[i]|
    double variation = 0.0; // sum of max(0, |o[i+step]-o[i]| - |r[i+step]-r[i]|)
};

struct KernelTable {
    Isa isa;
    // out[i] = conj(a[i]) * b[i] / (|a[i]|^2 + reg[i])
    void (*regularized_divide)(const Complex* a, const Complex* b, const double* reg, Complex* out,
                               std::size_t n);
    // out[i] = b[i] / a'[i] where a' is a[i] with its magnitude floored at eps
    // (phase kept; a zero a[i] is treated as the real value eps).
    void (*floored_divide)(const Complex* a, const Complex* b, double eps, Complex* out,
                           std::size_t n);
    // out[i] = a[i] * b[i]
    void (*complex_multiply)(const Complex* a, const Complex* b, Complex* out, std::size_t n);
    // Pairs (i, i + step) for i in [0, count).
    VariationSums (*variation_sums)(const double* original, const double* reblurred,
                                    std::size_t count, std::size_t step);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // acc[i] += w[i] * v[i]; wsum[i] += w[i]
    void (*weighted_accumulate)(const double* w, const double* v, double* acc, double* wsum,
                                std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
#if defined(EDOF_HAVE_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif

bool isa_available(Isa isa) noexcept;
std::string_view isa_name(Isa isa) noexcept;

// Currently selected table.
const KernelTable& kernels() noexcept;
Isa active_isa() noexcept;

// Pin the dispatch (tests, benchmarking). Throws DomainError when the ISA is
// not supported on this machine or build.
void force_isa(Isa isa);
void reset_isa() noexcept;

} // namespace edof::simd
