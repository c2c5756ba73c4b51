#pragma once

#include <cstddef>

#include "edof/image.hpp"
#include "edof/kernel.hpp"
#include "edof/psf_models.hpp"

namespace edof {

inline constexpr double default_lambda_w = 0.1;

/// Plain frequency-domain division B / OTF, with |OTF| floored at eps (phase
/// kept). Amplifies noise wherever the OTF is small; kept as a baseline.
Image inverse_filter(const Image& blurry, const Kernel& ker, double eps);

/// Laplacian-regularized Wiener deconvolution:
///
///     I = conj(OTF) B / (|OTF|^2 + lambda_w |L|^2)
///
/// with L the transform of the 3x3 discrete Laplacian. Circular model on the
/// patch; applied per channel. `clamp` restricts the result to [0, 1].
Image wiener(const Image& blurry, const Kernel& ker, double lambda_w = default_lambda_w,
             bool clamp = true);

enum class DeblurMethod { gaussian, lut };

struct DeblurParams {
    DeblurMethod method = DeblurMethod::gaussian;
    std::size_t patch = 64;
    std::size_t stride = 32;
    double lambda_w = default_lambda_w;
    double sigma_scale = default_sigma_scale;
    double max_blur = 1.0;         // patches blurrier than this are left as-is
    const KernelLut* lut = nullptr; // required for DeblurMethod::lut
};

/// Space-variant restoration: blur map on the green channel, one kernel per
/// patch from the mean map value over that patch, Wiener per channel, stitch.
Image deblur_image(const Image& img, const DeblurParams& params);

double mse(const Image& a, const Image& b);

/// 10 log10(1 / mse) for unit-range images; +infinity for identical images.
double psnr(const Image& a, const Image& b);

} // namespace edof
