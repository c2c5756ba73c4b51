#pragma once

#include <cstddef>
#include <vector>

#include "edof/image.hpp"
#include "edof/patches.hpp"

namespace edof {

/// Taps of the uniform re-blur filter used by crete_blur.
inline constexpr std::size_t crete_reblur_taps = 9;

/// No-reference blur level of a patch, in [0, 1]; higher is blurrier.
///
/// The patch is re-blurred along each axis with a 9-tap moving average
/// (reflect boundaries). For each axis, with D the absolute neighbour
/// differences of the original and R those of the re-blurred patch:
///
///     b = (sum D - sum max(0, D - R)) / sum D
///
/// The result is max(b_horizontal, b_vertical). An axis whose sum D is at
/// most 1e-9 carries no information and is skipped; a patch flat along both
/// axes scores 1. RGB input is measured on its green channel.
double crete_blur(const Image& patch);

/// Per-pixel blur level: every patch score is spread over its footprint with
/// the stitching window and weight-normalized.
struct BlurMap {
    Image values;                     // single channel, width x height of the source
    PatchGrid grid;                   // origins only
    std::vector<double> patch_scores; // one per grid cell, same order as grid.origins

    std::size_t width() const noexcept { return values.width(); }
    std::size_t height() const noexcept { return values.height(); }
};

BlurMap blur_map(const Image& img, std::size_t patch, std::size_t stride);

/// Mean of the map over a rectangle.
double mean_blur(const BlurMap& map, std::size_t x0, std::size_t y0, std::size_t w, std::size_t h);

} // namespace edof
