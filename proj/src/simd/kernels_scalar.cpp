#include <algorithm>
#include <cmath>

#include "edof/simd.hpp"

namespace edof::simd {
namespace {

void regularized_divide(const Complex* a, const Complex* b, const double* reg, Complex* out,
                        std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        const double re = ar * br + ai * bi;
        const double im = ar * bi - ai * br;
        const double den = (ar * ar + ai * ai) + reg[i];
        out[i] = Complex(re / den, im / den);
    }
}

void floored_divide(const Complex* a, const Complex* b, double eps, Complex* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        const double mag = std::sqrt(ar * ar + ai * ai);
        if (mag == 0.0) {
            out[i] = Complex(br / eps, bi / eps);
            continue;
        }
        const double den = mag * std::max(mag, eps);
        out[i] = Complex((ar * br + ai * bi) / den, (ar * bi - ai * br) / den);
    }
}

void complex_multiply(const Complex* a, const Complex* b, Complex* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = Complex(ar * br - ai * bi, ar * bi + ai * br);
    }
}

VariationSums variation_sums(const double* o, const double* r, std::size_t count, std::size_t step)
{
    VariationSums s;
    for (std::size_t i = 0; i < count; ++i) {
        const double d_o = std::abs(o[i + step] - o[i]);
        const double d_r = std::abs(r[i + step] - r[i]);
        s.total += d_o;
        s.variation += std::max(0.0, d_o - d_r);
    }
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void weighted_accumulate(const double* w, const double* v, double* acc, double* wsum,
                         std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        acc[i] += w[i] * v[i];
        wsum[i] += w[i];
    }
}

constexpr KernelTable table{
    Isa::scalar,   regularized_divide, floored_divide,      complex_multiply,
    variation_sums, axpy,              weighted_accumulate,
};

} // namespace

const KernelTable& scalar_kernels() noexcept
{
    return table;
}

} // namespace edof::simd
