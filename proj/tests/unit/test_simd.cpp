#include "doctest.h"

#include <complex>

#include "edof/blur_metric.hpp"
#include "edof/errors.hpp"
#include "edof/forward_model.hpp"
#include "edof/psf_models.hpp"
#include "edof/restoration.hpp"
#include "edof/simd.hpp"
#include "helpers.hpp"

using namespace edof;
using simd::Complex;

namespace {

struct Data {
    std::vector<Complex> a, b;
    std::vector<double> x, y, reg;
};

Data make(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Data d;
    for (std::size_t i = 0; i < n; ++i) {
        d.a.emplace_back(g(rng), g(rng));
        d.b.emplace_back(g(rng), g(rng));
        d.x.push_back(g(rng));
        d.y.push_back(g(rng));
        d.reg.push_back(std::abs(g(rng)) * 0.1);
    }
    if (n > 3) d.a[3] = 0.0; // exercises the zero-OTF branch
    if (n > 5) d.a[5] = Complex(1e-9, -1e-9);
    return d;
}

bool close(double p, double q) { return std::abs(p - q) <= 1e-12 * std::max(1.0, std::abs(q)); }
bool close(Complex p, Complex q) { return close(p.real(), q.real()) && close(p.imag(), q.imag()); }

} // namespace

#if defined(EDOF_HAVE_AVX2)
TEST_CASE("AVX2 kernels match the scalar reference")
{
    if (!simd::isa_available(simd::Isa::avx2)) return;
    const auto& s = simd::scalar_kernels();
    const auto& v = simd::avx2_kernels();
    CHECK(v.isa == simd::Isa::avx2);

    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 1021u}) {
        const Data d = make(n, n);
        std::vector<Complex> o1(n), o2(n);

        s.regularized_divide(d.a.data(), d.b.data(), d.reg.data(), o1.data(), n);
        v.regularized_divide(d.a.data(), d.b.data(), d.reg.data(), o2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(o2[i], o1[i]));

        for (double eps : {1e-6, 0.5}) {
            s.floored_divide(d.a.data(), d.b.data(), eps, o1.data(), n);
            v.floored_divide(d.a.data(), d.b.data(), eps, o2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(close(o2[i], o1[i]));
        }

        s.complex_multiply(d.a.data(), d.b.data(), o1.data(), n);
        v.complex_multiply(d.a.data(), d.b.data(), o2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(o2[i], o1[i]));

        if (n > 2) {
            for (std::size_t step : {1u, 2u}) {
                const auto r1 = s.variation_sums(d.x.data(), d.y.data(), n - step, step);
                const auto r2 = v.variation_sums(d.x.data(), d.y.data(), n - step, step);
                CHECK(close(r2.total, r1.total));
                CHECK(close(r2.variation, r1.variation));
            }
        }

        std::vector<double> y1 = d.y, y2 = d.y;
        s.axpy(0.37, d.x.data(), y1.data(), n);
        v.axpy(0.37, d.x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(y2[i], y1[i]));

        std::vector<double> acc1(n, 0.5), acc2(n, 0.5), w1(n, 1.0), w2(n, 1.0);
        s.weighted_accumulate(d.reg.data(), d.x.data(), acc1.data(), w1.data(), n);
        v.weighted_accumulate(d.reg.data(), d.x.data(), acc2.data(), w2.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(close(acc2[i], acc1[i]));
            CHECK(close(w2[i], w1[i]));
        }
    }
}

TEST_CASE("pipeline results agree across ISAs")
{
    if (!simd::isa_available(simd::Isa::avx2)) return;
    const Image s = random_texture(128, 96, 3);
    const Kernel k = gaussian_kernel(2.0);

    simd::force_isa(simd::Isa::scalar);
    CHECK(simd::active_isa() == simd::Isa::scalar);
    const double b_scalar = crete_blur(convolve(s, k));
    const Image w_scalar = wiener(convolve(s, k), k, 0.1, false);
    const Image d_scalar = deblur_image(s, DeblurParams{});

    simd::force_isa(simd::Isa::avx2);
    const double b_avx = crete_blur(convolve(s, k));
    const Image w_avx = wiener(convolve(s, k), k, 0.1, false);
    const Image d_avx = deblur_image(s, DeblurParams{});
    simd::reset_isa();

    CHECK(b_avx == doctest::Approx(b_scalar).epsilon(1e-12));
    CHECK(testutil::max_abs_diff(w_avx, w_scalar) < 1e-12);
    CHECK(testutil::max_abs_diff(d_avx, d_scalar) < 1e-9);
}
#endif

TEST_CASE("ISA selection")
{
    CHECK(simd::isa_available(simd::Isa::scalar));
    CHECK(simd::isa_name(simd::Isa::scalar) == "scalar");
    CHECK(simd::isa_name(simd::Isa::avx2) == "avx2");
    simd::force_isa(simd::Isa::scalar);
    CHECK(&simd::kernels() == &simd::scalar_kernels());
    simd::reset_isa();
    if (!simd::isa_available(simd::Isa::avx2)) CHECK_THROWS_AS(simd::force_isa(simd::Isa::avx2), DomainError);
}

TEST_CASE("EDOF_SIMD overrides the automatic choice")
{
    setenv("EDOF_SIMD", "scalar", 1);
    simd::reset_isa();
    CHECK(simd::active_isa() == simd::Isa::scalar);
    unsetenv("EDOF_SIMD");
    simd::reset_isa();
    CHECK(simd::active_isa() == (simd::isa_available(simd::Isa::avx2) ? simd::Isa::avx2 : simd::Isa::scalar));
}
