// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "edof/simd.hpp"

namespace edof::simd {
namespace {

inline const double* as_doubles(const Complex* p) noexcept
{
    return reinterpret_cast<const double*>(p);
}
inline double* as_doubles(Complex* p) noexcept
{
    return reinterpret_cast<double*>(p);
}

// Lanes (r0, r0, r1, r1) from two consecutive reals.
inline __m256d duplicate_pairs(const double* p) noexcept
{
    return _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(p)), 0b01010000);
}

// conj(a) * b for two interleaved complex values.
inline __m256d conj_mul(__m256d va, __m256d vb) noexcept
{
    const __m256d prod = _mm256_mul_pd(va, vb);                           // ar*br, ai*bi
    const __m256d cross = _mm256_mul_pd(_mm256_permute_pd(va, 0b0101), vb); // ai*br, ar*bi
    const __m256d re = _mm256_hadd_pd(prod, prod);
    const __m256d im = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_hsub_pd(cross, cross));
    return _mm256_blend_pd(re, im, 0b1010);
}

void regularized_divide(const Complex* a, const Complex* b, const double* reg, Complex* out,
                        std::size_t n)
{
    const double* ap = as_doubles(a);
    const double* bp = as_doubles(b);
    double* op = as_doubles(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(ap + 2 * i);
        const __m256d vb = _mm256_loadu_pd(bp + 2 * i);
        const __m256d sq = _mm256_mul_pd(va, va);
        const __m256d den = _mm256_add_pd(_mm256_hadd_pd(sq, sq), duplicate_pairs(reg + i));
        _mm256_storeu_pd(op + 2 * i, _mm256_div_pd(conj_mul(va, vb), den));
    }
    scalar_kernels().regularized_divide(a + i, b + i, reg + i, out + i, n - i);
}

void floored_divide(const Complex* a, const Complex* b, double eps, Complex* out, std::size_t n)
{
    const double* ap = as_doubles(a);
    const double* bp = as_doubles(b);
    double* op = as_doubles(out);
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(ap + 2 * i);
        const __m256d vb = _mm256_loadu_pd(bp + 2 * i);
        const __m256d sq = _mm256_mul_pd(va, va);
        const __m256d mag2 = _mm256_hadd_pd(sq, sq);
        const __m256d mag = _mm256_sqrt_pd(mag2);
        const __m256d den = _mm256_mul_pd(mag, _mm256_max_pd(mag, veps));
        const __m256d q = _mm256_div_pd(conj_mul(va, vb), den);
        const __m256d is_zero = _mm256_cmp_pd(mag2, zero, _CMP_EQ_OQ);
        _mm256_storeu_pd(op + 2 * i, _mm256_blendv_pd(q, _mm256_div_pd(vb, veps), is_zero));
    }
    scalar_kernels().floored_divide(a + i, b + i, eps, out + i, n - i);
}

void complex_multiply(const Complex* a, const Complex* b, Complex* out, std::size_t n)
{
    const double* ap = as_doubles(a);
    const double* bp = as_doubles(b);
    double* op = as_doubles(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(ap + 2 * i);
        const __m256d vb = _mm256_loadu_pd(bp + 2 * i);
        const __m256d prod = _mm256_mul_pd(va, vb);
        const __m256d cross = _mm256_mul_pd(_mm256_permute_pd(va, 0b0101), vb);
        const __m256d re = _mm256_hsub_pd(prod, prod);
        const __m256d im = _mm256_hadd_pd(cross, cross);
        _mm256_storeu_pd(op + 2 * i, _mm256_blend_pd(re, im, 0b1010));
    }
    scalar_kernels().complex_multiply(a + i, b + i, out + i, n - i);
}

inline double horizontal_sum(__m256d v) noexcept
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

VariationSums variation_sums(const double* o, const double* r, std::size_t count, std::size_t step)
{
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d zero = _mm256_setzero_pd();
    __m256d total = zero;
    __m256d variation = zero;
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256d d_o = _mm256_andnot_pd(
            sign, _mm256_sub_pd(_mm256_loadu_pd(o + i + step), _mm256_loadu_pd(o + i)));
        const __m256d d_r = _mm256_andnot_pd(
            sign, _mm256_sub_pd(_mm256_loadu_pd(r + i + step), _mm256_loadu_pd(r + i)));
        total = _mm256_add_pd(total, d_o);
        variation = _mm256_add_pd(variation, _mm256_max_pd(zero, _mm256_sub_pd(d_o, d_r)));
    }
    VariationSums tail = scalar_kernels().variation_sums(o + i, r + i, count - i, step);
    tail.total += horizontal_sum(total);
    tail.variation += horizontal_sum(variation);
    return tail;
}

void axpy(double alpha, const double* x, double* y, std::size_t n)
{
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    scalar_kernels().axpy(alpha, x + i, y + i, n - i);
}

void weighted_accumulate(const double* w, const double* v, double* acc, double* wsum,
                         std::size_t n)
{
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vw = _mm256_loadu_pd(w + i);
        _mm256_storeu_pd(acc + i,
                         _mm256_fmadd_pd(vw, _mm256_loadu_pd(v + i), _mm256_loadu_pd(acc + i)));
        _mm256_storeu_pd(wsum + i, _mm256_add_pd(vw, _mm256_loadu_pd(wsum + i)));
    }
    scalar_kernels().weighted_accumulate(w + i, v + i, acc + i, wsum + i, n - i);
}

constexpr KernelTable table{
    Isa::avx2,     regularized_divide, floored_divide,      complex_multiply,
    variation_sums, axpy,              weighted_accumulate,
};

} // namespace

const KernelTable& avx2_kernels() noexcept
{
    return table;
}

} // namespace edof::simd
