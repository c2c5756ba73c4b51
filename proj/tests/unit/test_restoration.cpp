#include "doctest.h"

#include <limits>

#include "edof/errors.hpp"
#include "edof/forward_model.hpp"
#include "edof/parallel.hpp"
#include "edof/psf_models.hpp"
#include "edof/restoration.hpp"
#include "helpers.hpp"

using namespace edof;

namespace {

double laplacian_energy(const Image& img)
{
    double e = 0.0;
    for (std::size_t y = 1; y + 1 < img.height(); ++y)
        for (std::size_t x = 1; x + 1 < img.width(); ++x) {
            const double l = img.at(x - 1, y) + img.at(x + 1, y) + img.at(x, y - 1) + img.at(x, y + 1) - 4 * img.at(x, y);
            e += l * l;
        }
    return e;
}

} // namespace

TEST_CASE("inverse_filter")
{
    const Image s = random_texture(64, 64, 1);
    CHECK(testutil::max_abs_diff(inverse_filter(s, Kernel::delta(1), 1e-6), s) < 1e-9);
    CHECK(testutil::max_abs_diff(inverse_filter(s, Kernel::delta(7), 1e-6), s) < 1e-9);

    // The filter inverts circular blur, so the test blurs circularly.
    const Kernel k = gaussian_kernel(1.0);
    const Image b = testutil::circular_convolve(s, k);
    CHECK(testutil::max_abs_diff(inverse_filter(b, k, 1e-6), s) < 1e-3);
    CHECK_THROWS_AS(inverse_filter(b, k, 0.0), DomainError);
}

TEST_CASE("inverse filter amplifies noise more than Wiener")
{
    const Image s = random_texture(64, 64, 2);
    const Kernel k = gaussian_kernel(1.0);
    const Image noisy = add_noise(testutil::circular_convolve(s, k), 0.005, 3);
    CHECK(mse(inverse_filter(noisy, k, 1e-6), s) > mse(wiener(noisy, k, 0.1, false), s));
}

TEST_CASE("wiener basics")
{
    const Image s = random_texture(64, 64, 4);
    CHECK(testutil::max_abs_diff(wiener(s, Kernel::delta(1), 0.0), s) < 1e-9);
    CHECK(testutil::max_abs_diff(wiener(s, Kernel::delta(5), 0.0, false), s) < 1e-9);

    const Image c(48, 48, 1, 0.61);
    for (double lambda : {0.0, 0.1, 5.0}) {
        const Image out = wiener(c, gaussian_kernel(2.0), lambda);
        for (double v : out.data()) CHECK(v == doctest::Approx(0.61).epsilon(1e-9));
    }
    CHECK_THROWS_AS(wiener(s, Kernel::delta(1), -1.0), DomainError);
}

TEST_CASE("wiener restores a noisy Gaussian blur")
{
    // Circular blur matches the filter's own boundary model.
    const Kernel k = gaussian_kernel(2.0);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const Image s = random_texture(64, 64, seed, 2.0);
        const Image b = add_noise(testutil::circular_convolve(s, k), 0.003, seed + 100);
        CHECK(psnr(wiener(b, k, 0.1), s) >= psnr(b, s) + 3.0);
    }
}

TEST_CASE("wiener preserves the mean before clamping")
{
    const Image s = random_texture(64, 64, 7);
    for (double sigma : {1.0, 3.0})
        for (double lambda : {0.01, 0.1, 1.0}) {
            const Image b = convolve(s, gaussian_kernel(sigma));
            CHECK(std::abs(wiener(b, gaussian_kernel(sigma), lambda, false).mean() - b.mean()) < 1e-6);
        }
}

TEST_CASE("wiener tends to the inverse filter as lambda vanishes")
{
    const Image s = random_texture(64, 64, 8);
    const Kernel k = gaussian_kernel(1.0);
    const Image b = testutil::circular_convolve(s, k);
    const Image inv = inverse_filter(b, k, 1e-12);
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
        const double d = testutil::max_abs_diff(wiener(b, k, lambda, false), inv);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 1e-4);
}

TEST_CASE("wiener smooths more as lambda grows")
{
    const Image s = random_texture(64, 64, 9);
    const Kernel k = gaussian_kernel(1.5);
    const Image b = add_noise(convolve(s, k), 0.003, 1);
    const double e1 = laplacian_energy(wiener(b, k, 0.01, false));
    const double e2 = laplacian_energy(wiener(b, k, 0.1, false));
    const double e3 = laplacian_energy(wiener(b, k, 1.0, false));
    CHECK(e2 <= e1);
    CHECK(e3 <= e2);
}

TEST_CASE("wiener treats RGB channels independently with one kernel")
{
    const Image rgb = testutil::random_image(32, 32, 10, 3);
    const Kernel k = gaussian_kernel(1.0);
    const Image out = wiener(rgb, k, 0.1);
    for (std::size_t c = 0; c < 3; ++c) CHECK(testutil::max_abs_diff(out.plane(c), wiener(rgb.plane(c), k, 0.1)) == 0.0);
}

TEST_CASE("deblur_image pipeline")
{
    const Image sharp = random_texture(192, 160, 11);
    const Image blurry = synth_depth_blur(sharp, DepthProfile::horizontal_ramp(0.0, 6.0, 192), 64, 32);
    DeblurParams p;

    SUBCASE("bit-reproducible and independent of the thread count")
    {
        set_thread_count(1);
        const Image a = deblur_image(blurry, p);
        set_thread_count(4);
        const Image b = deblur_image(blurry, p);
        set_thread_count(0);
        CHECK(a == b);
        CHECK(a == deblur_image(blurry, p));
    }
    SUBCASE("max_blur below every score leaves the image untouched")
    {
        p.max_blur = 0.0;
        CHECK(testutil::max_abs_diff(deblur_image(blurry, p), blurry) < 1e-12);
    }
    SUBCASE("near-delta kernels barely change a sharp image")
    {
        // With a small blur-to-sigma scale every patch gets a near-delta kernel.
        p.sigma_scale = 1.0;
        const Image out = deblur_image(sharp, p);
        double mae = 0.0;
        for (std::size_t i = 0; i < out.data().size(); ++i) mae += std::abs(out.data()[i] - sharp.data()[i]);
        CHECK(mae / static_cast<double>(out.data().size()) < 0.02);
    }
    SUBCASE("LUT method needs a table")
    {
        p.method = DeblurMethod::lut;
        CHECK_THROWS_AS(deblur_image(blurry, p), ConfigError);
        KernelLut empty(10, 3);
        p.lut = &empty;
        CHECK_THROWS_AS(deblur_image(blurry, p), ConfigError);
    }
    SUBCASE("RGB output keeps its shape")
    {
        Image rgb(192, 160, 3);
        for (std::size_t i = 0; i < blurry.pixel_count(); ++i)
            for (std::size_t c = 0; c < 3; ++c) rgb.data()[3 * i + c] = blurry.data()[i] * (0.5 + 0.25 * c);
        const Image out = deblur_image(rgb, p);
        CHECK(out.same_shape(rgb));
    }
}

TEST_CASE("mse and psnr")
{
    const Image zero(8, 8, 1, 0.0), one(8, 8, 1, 1.0), half(8, 8, 1, 0.5);
    CHECK(mse(half, half) == 0.0);
    CHECK(mse(zero, one) == 1.0);
    CHECK(mse(zero, half) == 0.25);
    CHECK(psnr(zero, one) == 0.0);
    CHECK(psnr(zero, half) == doctest::Approx(6.020599913279624));
    CHECK(psnr(zero, Image(8, 8, 1, 0.1)) == doctest::Approx(20.0));
    CHECK(psnr(half, half) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(mse(zero, Image(8, 9)), DimensionError);
}
