#include "doctest.h"

#include "edof/blur_metric.hpp"
#include "edof/errors.hpp"
#include "edof/forward_model.hpp"
#include "edof/kernel_estimation.hpp"
#include "edof/psf_models.hpp"
#include "helpers.hpp"

using namespace edof;

namespace {

double off_center_l1(const Kernel& k, std::size_t cx, std::size_t cy)
{
    double s = 0.0;
    for (std::size_t y = 0; y < k.size(); ++y)
        for (std::size_t x = 0; x < k.size(); ++x)
            if (x != cx || y != cy) s += std::abs(k.at(x, y));
    return s;
}

double l2_norm(const Image& img)
{
    double s = 0.0;
    for (double v : img.data()) s += v * v;
    return std::sqrt(s);
}

double relative_residual(const Image& sharp, const Kernel& k, const Image& blurry)
{
    Image diff = convolve(sharp, k);
    for (std::size_t i = 0; i < diff.data().size(); ++i) diff.data()[i] -= blurry.data()[i];
    return l2_norm(diff) / l2_norm(blurry);
}

} // namespace

TEST_CASE("identical pair gives a centered delta")
{
    const Image s = testutil::random_image(64, 64, 1);
    const Kernel k = estimate_kernel(s, s, 15, 1e-3);
    CHECK(k.at(7, 7) > 0.95);
    CHECK(off_center_l1(k, 7, 7) < 0.05);
}

TEST_CASE("circular one-pixel shift gives a displaced delta")
{
    const Image s = testutil::random_image(64, 64, 2);
    Image b(64, 64);
    for (std::size_t y = 0; y < 64; ++y)
        for (std::size_t x = 0; x < 64; ++x) b.at(x, y) = s.at((x + 63) % 64, y); // b(x) = s(x - 1)
    const Kernel k = estimate_kernel(s, b, 15, 1e-3);
    CHECK(k.at(8, 7) > 0.95);
    CHECK(off_center_l1(k, 8, 7) < 0.05);
    // Brute-force check: the estimate reproduces the pair under circular convolution.
    CHECK(testutil::max_abs_diff(testutil::circular_convolve(s, k), b) < 0.05);
}

TEST_CASE("Gaussian kernel recovery")
{
    const Image s = testutil::random_image(64, 64, 3);
    const Kernel truth = gaussian_kernel(2.0, 15);
    const Image b = convolve(s, truth);
    const Kernel k = estimate_kernel(s, b, 15, 1e-4);
    CHECK(kernel_distance(k, truth) < 0.05);
    CHECK(relative_residual(s, k, b) < 0.05);
    CHECK(k.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stronger regularization yields smoother kernels")
{
    const Image s = testutil::random_image(64, 64, 4);
    const Image b = add_noise(convolve(s, gaussian_kernel(1.5, 15)), 0.002, 1);
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1}) {
        const double e = estimate_kernel(s, b, 15, lambda).laplacian_energy();
        CHECK(e <= prev * (1.0 + 1e-9));
        prev = e;
    }
}

TEST_CASE("estimation error grows with blur")
{
    const Image s = testutil::random_image(64, 64, 5);
    // Relative L2 error; the absolute distance shrinks for wide, flat kernels.
    auto error = [&](double sigma) {
        const Kernel truth = gaussian_kernel(sigma, 15);
        const Kernel est = estimate_kernel(s, convolve(s, gaussian_kernel(sigma)), 15, 1e-3);
        return kernel_distance(est, truth) / kernel_distance(truth, Kernel(15, std::vector<double>(225, 0.0)));
    };
    CHECK(error(8.0) > error(2.0));
}

TEST_CASE("swapped arguments fail recovery")
{
    const Image s = testutil::random_image(64, 64, 6);
    const Kernel truth = gaussian_kernel(2.0, 15);
    const Image b = convolve(s, truth);
    CHECK(kernel_distance(estimate_kernel(b, s, 15, 1e-4), truth) > 0.05);
}

TEST_CASE("estimate_kernel argument checks")
{
    const Image s = testutil::random_image(32, 32, 7);
    CHECK_THROWS_AS(estimate_kernel(Image(32, 32), s, 7, 1e-3), DegenerateInputError);
    CHECK_THROWS_AS(estimate_kernel(s, Image(32, 30), 7, 1e-3), DimensionError);
    CHECK_THROWS_AS(estimate_kernel(s, s, 8, 1e-3), DimensionError);
    CHECK_THROWS_AS(estimate_kernel(s, s, 33, 1e-3), DimensionError);
    CHECK_THROWS_AS(estimate_kernel(s, s, 7, 0.0), DomainError);
}

TEST_CASE("kernel map of an identical pair is all deltas")
{
    const Image s = random_texture(160, 128, 8);
    const KernelMap map = estimate_kernel_map(s, s, 64, 32, 15, 1e-3);
    CHECK(map.cols == 4);
    CHECK(map.rows == 3);
    REQUIRE(map.cells.size() == 12);
    for (const auto& c : map.cells) {
        CHECK_FALSE(c.degenerate);
        CHECK(c.kernel.at(7, 7) > 0.95);
        CHECK(c.blur == doctest::Approx(crete_blur(s.crop(c.origin.x, c.origin.y, 64, 64))));
    }
}

TEST_CASE("kernel width follows the true sigma across a ramp")
{
    const Image s = random_texture(512, 64, 9);
    const DepthProfile ramp = DepthProfile::horizontal_ramp(0.5, 4.0, 512);
    const Image b = synth_depth_blur(s, ramp, 64, 32);
    const KernelMap map = estimate_kernel_map(s, b, 64, 32, 15, 10.0);
    std::vector<double> truth, width;
    for (const auto& c : map.cells) {
        truth.push_back(ramp.sigma_at(c.origin.x + 32.0, c.origin.y + 32.0));
        width.push_back(c.kernel.second_moment());
    }
    CHECK(testutil::spearman(truth, width) > 0.9);
}

TEST_CASE("flat sharp cells are degenerate deltas")
{
    Image s = random_texture(128, 64, 10);
    for (std::size_t y = 0; y < 64; ++y)
        for (std::size_t x = 0; x < 64; ++x) s.at(x, y) = 0.5;
    const KernelMap map = estimate_kernel_map(s, s, 64, 64, 9, 1e-3);
    REQUIRE(map.cells.size() == 2);
    CHECK(map.cells[0].degenerate);
    CHECK(map.cells[0].kernel == Kernel::delta(9));
    CHECK_FALSE(map.cells[1].degenerate);
    CHECK_THROWS_AS(estimate_kernel_map(s, Image(128, 60), 64, 64, 9, 1e-3), DimensionError);
}

TEST_CASE("kernel map JSON round trip")
{
    const Image s = random_texture(96, 64, 11);
    KernelMap map = estimate_kernel_map(s, convolve(s, gaussian_kernel(1.0)), 64, 32, 7, 1e-3);
    map.source = "pair-a";
    const KernelMap back = kernel_map_from_json(kernel_map_to_json(map));
    CHECK(back.source == "pair-a");
    CHECK(back.cols == map.cols);
    CHECK(back.lambda_k == map.lambda_k);
    REQUIRE(back.cells.size() == map.cells.size());
    for (std::size_t i = 0; i < map.cells.size(); ++i) {
        CHECK(back.cells[i].origin == map.cells[i].origin);
        CHECK(back.cells[i].blur == map.cells[i].blur);
        CHECK(back.cells[i].kernel == map.cells[i].kernel);
    }
    CHECK_THROWS_AS(kernel_map_from_json("{\"version\": 2}"), ConfigError);
    CHECK_THROWS_AS(kernel_map_from_json("not json"), ConfigError);
}

TEST_CASE("kernel montage layout")
{
    const Image s = random_texture(192, 64, 12);
    const Image b = synth_depth_blur(s, DepthProfile::horizontal_ramp(0.5, 3.0, 192), 64, 64);
    const KernelMap map = estimate_kernel_map(s, b, 64, 64, 7, 1e-3);
    const Image m = kernel_montage(map, 2);
    CHECK(m.width() == 2 * 8 + 1);
    CHECK(m.height() == 2 * 8 + 1);
    // Tile order follows ascending blur.
    std::vector<std::size_t> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](auto a, auto c) { return map.cells[a].blur < map.cells[c].blur; });
    const Kernel& first = map.cells[order[0]].kernel;
    const double peak = *std::max_element(first.weights().begin(), first.weights().end());
    CHECK(m.at(1 + 3, 1 + 3) == doctest::Approx(std::clamp(first.at(3, 3) / peak, 0.0, 1.0)));
    CHECK(m.at(0, 0) == 0.0);
}
