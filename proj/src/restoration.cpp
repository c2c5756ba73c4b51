#include "edof/restoration.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "edof/blur_metric.hpp"
#include "edof/errors.hpp"
#include "edof/fft.hpp"
#include "edof/parallel.hpp"
#include "edof/patches.hpp"
#include "edof/simd.hpp"

namespace edof {
namespace {

constexpr std::array<double, 9> laplacian = {0, 1, 0, 1, -4, 1, 0, 1, 0};

std::vector<Complex> otf_of(const Kernel& ker, std::size_t w, std::size_t h)
{
    return fft2(embed_centered(ker.weights(), ker.size(), w, h), w, h);
}

template <typename PlaneFn>
Image per_channel(const Image& img, PlaneFn&& fn)
{
    Image out(img.width(), img.height(), img.channels());
    for (std::size_t c = 0; c < img.channels(); ++c) {
        const Image p = img.channels() == 1 ? img : img.plane(c);
        const auto spectrum = fft2(p.data(), p.width(), p.height());
        auto restored = fn(spectrum);
        const auto real = ifft2_real(restored, p.width(), p.height());
        out.set_plane(c, Image(p.width(), p.height(), 1, real));
    }
    return out;
}

} // namespace

Image inverse_filter(const Image& blurry, const Kernel& ker, double eps)
{
    if (!(eps > 0.0)) throw DomainError("inverse filter floor must be > 0");
    const auto otf = otf_of(ker, blurry.width(), blurry.height());
    return per_channel(blurry, [&](const std::vector<Complex>& b) {
        std::vector<Complex> out(b.size());
        simd::kernels().floored_divide(otf.data(), b.data(), eps, out.data(), out.size());
        return out;
    });
}

Image wiener(const Image& blurry, const Kernel& ker, double lambda_w, bool clamp)
{
    if (!(lambda_w >= 0.0) || !std::isfinite(lambda_w)) throw DomainError("lambda_w must be >= 0");
    const std::size_t w = blurry.width(), h = blurry.height();
    const auto otf = otf_of(ker, w, h);
    const auto lap = fft2(embed_centered(laplacian, 3, w, h), w, h);
    std::vector<double> reg(lap.size());
    for (std::size_t i = 0; i < reg.size(); ++i) reg[i] = lambda_w * std::norm(lap[i]);

    Image out = per_channel(blurry, [&](const std::vector<Complex>& b) {
        std::vector<Complex> res(b.size());
        simd::kernels().regularized_divide(otf.data(), b.data(), reg.data(), res.data(), res.size());
        // 0/0 where both the OTF and the regularizer vanish.
        for (auto& v : res)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) v = 0.0;
        return res;
    });
    if (clamp) out.clamp_unit();
    return out;
}

Image deblur_image(const Image& img, const DeblurParams& params)
{
    if (params.method == DeblurMethod::lut && (params.lut == nullptr || params.lut->empty()))
        throw ConfigError("LUT method needs a loaded, non-empty kernel LUT");
    if (!(params.sigma_scale >= 0.0)) throw DomainError("sigma scale must be >= 0");

    const BlurMap bmap = blur_map(img, params.patch, params.stride);
    auto grid = plan_grid(img.width(), img.height(), params.patch, params.stride);
    grid.patches.resize(grid.size());

    parallel_for(grid.size(), [&](std::size_t i) {
        const auto [x, y] = grid.origins[i];
        Image patch = img.crop(x, y, params.patch, params.patch);
        const double blur = mean_blur(bmap, x, y, params.patch, params.patch);
        if (blur > params.max_blur) {
            grid.patches[i] = std::move(patch);
            return;
        }
        const Kernel ker = params.method == DeblurMethod::lut
                               ? lut_query(*params.lut, blur)
                               : gaussian_kernel(sigma_from_blur(blur, params.sigma_scale));
        grid.patches[i] = wiener(patch, ker, params.lambda_w);
    });
    return stitch_patches(grid, img.width(), img.height());
}

double mse(const Image& a, const Image& b)
{
    if (!a.same_shape(b)) throw DimensionError("images differ in shape");
    if (a.empty()) throw DimensionError("empty images");
    double s = 0.0;
    const auto da = a.data(), db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = da[i] - db[i];
        s += d * d;
    }
    return s / static_cast<double>(da.size());
}

double psnr(const Image& a, const Image& b)
{
    const double m = mse(a, b);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / m);
}

} // namespace edof
