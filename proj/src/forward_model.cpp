#include "edof/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "edof/errors.hpp"
#include "edof/fft.hpp"
#include "edof/parallel.hpp"
#include "edof/patches.hpp"
#include "edof/psf_models.hpp"
#include "edof/simd.hpp"

namespace edof {
namespace {

constexpr double passthrough_sigma = 0.05;

// Single plane padded by `r` on every side with reflected samples.
std::vector<double> reflect_pad(const Image& plane, std::size_t r, std::size_t& pw, std::size_t& ph)
{
    const std::size_t w = plane.width(), h = plane.height();
    pw = w + 2 * r;
    ph = h + 2 * r;
    std::vector<double> out(pw * ph);
    const long lr = static_cast<long>(r);
    for (std::size_t y = 0; y < ph; ++y) {
        const std::size_t sy = reflect_index(static_cast<long>(y) - lr, h);
        for (std::size_t x = 0; x < pw; ++x)
            out[y * pw + x] = plane.at(reflect_index(static_cast<long>(x) - lr, w), sy);
    }
    return out;
}

Image convolve_plane_direct(const Image& plane, const Kernel& ker)
{
    const std::size_t w = plane.width(), h = plane.height();
    const std::size_t k = ker.size(), r = ker.radius();
    std::size_t pw = 0, ph = 0;
    const auto padded = reflect_pad(plane, r, pw, ph);
    const auto& simd = simd::kernels();

    Image out(w, h, 1);
    auto dst = out.data();
    for (std::size_t y = 0; y < h; ++y) {
        double* row = dst.data() + y * w;
        for (std::size_t ky = 0; ky < k; ++ky)
            for (std::size_t kx = 0; kx < k; ++kx) {
                const double wgt = ker.at(kx, ky);
                if (wgt == 0.0) continue;
                // out(y, x) += k(ky, kx) * in(y + r - ky, x + r - kx)
                const double* src = padded.data() + (y + 2 * r - ky) * pw + (2 * r - kx);
                simd.axpy(wgt, src, row, w);
            }
    }
    return out;
}

Image convolve_plane_fft(const Image& plane, const Kernel& ker)
{
    const std::size_t w = plane.width(), h = plane.height();
    const std::size_t r = ker.radius();
    std::size_t pw = 0, ph = 0;
    const auto padded = reflect_pad(plane, r, pw, ph);

    auto spectrum = fft2(padded, pw, ph);
    const auto otf = fft2(embed_centered(ker.weights(), ker.size(), pw, ph), pw, ph);
    simd::kernels().complex_multiply(otf.data(), spectrum.data(), spectrum.data(), spectrum.size());
    const auto full = ifft2_real(spectrum, pw, ph);

    Image out(w, h, 1);
    for (std::size_t y = 0; y < h; ++y)
        std::copy_n(full.data() + (y + r) * pw + r, w, out.data().data() + y * w);
    return out;
}

template <typename PlaneFn>
Image per_plane(const Image& img, PlaneFn&& fn)
{
    if (img.channels() == 1) return fn(img);
    Image out(img.width(), img.height(), img.channels());
    for (std::size_t c = 0; c < img.channels(); ++c) out.set_plane(c, fn(img.plane(c)));
    return out;
}

} // namespace

std::size_t reflect_index(long i, std::size_t n) noexcept
{
    if (n <= 1) return 0;
    const long period = 2 * static_cast<long>(n);
    long m = i % period;
    if (m < 0) m += period;
    return static_cast<std::size_t>(m < static_cast<long>(n) ? m : period - 1 - m);
}

Image convolve_direct(const Image& img, const Kernel& ker)
{
    return per_plane(img, [&](const Image& p) { return convolve_plane_direct(p, ker); });
}

Image convolve_fft(const Image& img, const Kernel& ker)
{
    return per_plane(img, [&](const Image& p) { return convolve_plane_fft(p, ker); });
}

Image convolve(const Image& img, const Kernel& ker)
{
    if (ker.size() == 1) {
        Image out = img;
        for (double& v : out.data()) v *= ker.weights()[0];
        return out;
    }
    return ker.size() > direct_convolution_max_size ? convolve_fft(img, ker)
                                                    : convolve_direct(img, ker);
}

DepthProfile DepthProfile::constant(double sigma)
{
    return DepthProfile([sigma](double, double) { return sigma; });
}

DepthProfile DepthProfile::horizontal_ramp(double sigma_left, double sigma_right, std::size_t width)
{
    const double span = width > 1 ? static_cast<double>(width - 1) : 1.0;
    return DepthProfile([=](double x, double) {
        const double t = std::clamp(x / span, 0.0, 1.0);
        return sigma_left + (sigma_right - sigma_left) * t;
    });
}

double DepthProfile::sigma_at(double x, double y) const
{
    const double s = field_(x, y);
    if (!std::isfinite(s) || s < 0.0) throw DomainError("depth profile sigma must be finite and >= 0");
    return s;
}

std::vector<PatchSigma> patch_sigmas(std::size_t width, std::size_t height,
                                     const DepthProfile& profile, std::size_t patch,
                                     std::size_t stride)
{
    const auto grid = plan_grid(width, height, patch, stride == 0 ? std::max<std::size_t>(1, patch / 2) : stride);
    std::vector<PatchSigma> out;
    out.reserve(grid.size());
    const double half = static_cast<double>(patch) / 2.0;
    for (const auto& o : grid.origins)
        out.push_back({o.x, o.y,
                       profile.sigma_at(static_cast<double>(o.x) + half,
                                        static_cast<double>(o.y) + half)});
    return out;
}

Image synth_depth_blur(const Image& sharp, const DepthProfile& profile, std::size_t patch,
                       std::size_t stride)
{
    if (stride == 0) stride = std::max<std::size_t>(1, patch / 2);
    auto grid = plan_grid(sharp.width(), sharp.height(), patch, stride);
    const auto sigmas = patch_sigmas(sharp.width(), sharp.height(), profile, patch, stride);
    grid.patches.resize(grid.size());

    parallel_for(grid.size(), [&](std::size_t i) {
        const auto [x0, y0] = grid.origins[i];
        const double sigma = sigmas[i].sigma;
        if (sigma < passthrough_sigma) {
            grid.patches[i] = sharp.crop(x0, y0, patch, patch);
            return;
        }
        const Kernel ker = gaussian_kernel(sigma);
        // Blur a context window so the patch matches a global convolution.
        const std::size_t r = ker.radius();
        const std::size_t cx0 = x0 > r ? x0 - r : 0;
        const std::size_t cy0 = y0 > r ? y0 - r : 0;
        const std::size_t cx1 = std::min(sharp.width(), x0 + patch + r);
        const std::size_t cy1 = std::min(sharp.height(), y0 + patch + r);
        const Image context = convolve(sharp.crop(cx0, cy0, cx1 - cx0, cy1 - cy0), ker);
        grid.patches[i] = context.crop(x0 - cx0, y0 - cy0, patch, patch);
    });
    return stitch_patches(grid, sharp.width(), sharp.height());
}

Image add_noise(const Image& img, double sigma_n, std::uint64_t seed)
{
    if (!(sigma_n >= 0.0)) throw DomainError("noise sigma must be >= 0");
    Image out = img;
    if (sigma_n == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma_n);
    for (double& v : out.data()) v = std::clamp(v + noise(rng), 0.0, 1.0);
    return out;
}

Image random_texture(std::size_t width, std::size_t height, std::uint64_t seed, double smoothing)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Image tex(width, height, 1);
    for (double& v : tex.data()) v = uniform(rng);
    if (smoothing >= passthrough_sigma) tex = convolve(tex, gaussian_kernel(smoothing));
    const auto [lo, hi] = std::minmax_element(tex.data().begin(), tex.data().end());
    const double lo_v = *lo, range = *hi - *lo;
    if (range > 0)
        for (double& v : tex.data()) v = (v - lo_v) / range;
    return tex;
}

} // namespace edof
