#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "edof/image.hpp"

namespace edof {

struct PatchOrigin {
    std::size_t x = 0;
    std::size_t y = 0;
    friend bool operator==(const PatchOrigin&, const PatchOrigin&) = default;
};

/// Grid of square patches over an image. Origins are listed row by row
/// (y outer, x inner); `cols` and `rows` give the grid extent.
struct PatchGrid {
    std::size_t patch_size = 64;
    std::size_t stride = 32;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::vector<PatchOrigin> origins;
    std::vector<Image> patches;

    std::size_t size() const noexcept { return origins.size(); }
};

/// Origins along one axis: 0, s, 2s, ... with the last one clamped to
/// dim - patch so the edge is covered.
std::vector<std::size_t> axis_origins(std::size_t dim, std::size_t patch, std::size_t stride);

/// Origins for a 2D grid without copying any pixels.
PatchGrid plan_grid(std::size_t width, std::size_t height, std::size_t patch, std::size_t stride);

PatchGrid extract_patches(const Image& img, std::size_t patch, std::size_t stride);

/// 1D blend window: triangular ramp peaking at the patch center, floored at
/// 1e-3.
std::vector<double> blend_window(std::size_t patch);

/// Weighted overlap-add of the grid's patches. Each output pixel is the
/// window-weighted mean of the patch samples covering it.
Image stitch_patches(const PatchGrid& grid, std::size_t out_w, std::size_t out_h);

/// Same blend, but every patch contributes one constant value per cell.
Image splat_values(const PatchGrid& grid, std::span<const double> values, std::size_t out_w,
                   std::size_t out_h);

} // namespace edof
