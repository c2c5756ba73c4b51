#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "edof/image.hpp"
#include "edof/kernel.hpp"

namespace edof {

/// Kernels larger than this go through the frequency-domain path.
inline constexpr std::size_t direct_convolution_max_size = 15;

/// 2D convolution with half-sample symmetric (reflect) boundaries. Each channel
/// is filtered independently; the output has the input's shape.
Image convolve(const Image& img, const Kernel& ker);

// The two implementation paths behind convolve(); exposed for cross-checking.
Image convolve_direct(const Image& img, const Kernel& ker);
Image convolve_fft(const Image& img, const Kernel& ker);

/// Reflect-boundary index: maps any integer onto [0, n) by mirroring about the
/// half-sample points -0.5 and n - 0.5.
std::size_t reflect_index(long i, std::size_t n) noexcept;

/// Gaussian sigma (pixels) as a function of pixel position.
class DepthProfile {
public:
    using Field = std::function<double(double x, double y)>;

    explicit DepthProfile(Field field) : field_(std::move(field)) {}

    static DepthProfile constant(double sigma);
    // Linear in x: sigma_left at x = 0, sigma_right at x = width - 1.
    static DepthProfile horizontal_ramp(double sigma_left, double sigma_right, std::size_t width);

    // Throws DomainError for negative or non-finite sigma.
    double sigma_at(double x, double y) const;

private:
    Field field_;
};

struct PatchSigma {
    std::size_t x = 0;
    std::size_t y = 0;
    double sigma = 0.0;
};

/// Sigma sampled at the center of every patch of the synthesis grid.
std::vector<PatchSigma> patch_sigmas(std::size_t width, std::size_t height,
                                     const DepthProfile& profile, std::size_t patch,
                                     std::size_t stride);

/// Space-variant defocus: each patch is blurred with the Gaussian whose sigma
/// the profile gives at the patch center (sigma < 0.05 passes through), then
/// the patches are blended with the standard stitching window. stride = 0
/// means patch / 2.
Image synth_depth_blur(const Image& sharp, const DepthProfile& profile, std::size_t patch,
                       std::size_t stride = 0);

/// Adds zero-mean Gaussian noise and clamps to [0, 1]. Deterministic per seed.
Image add_noise(const Image& img, double sigma_n, std::uint64_t seed);

/// Uniform random texture low-passed by a Gaussian of the given sigma and
/// rescaled to span [0, 1]. smoothing < 0.05 leaves white noise.
Image random_texture(std::size_t width, std::size_t height, std::uint64_t seed,
                     double smoothing = 1.0);

} // namespace edof
