#include "edof/patches.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edof/errors.hpp"
#include "edof/simd.hpp"

namespace edof {

namespace {

constexpr double window_floor = 1e-3;

void check_grid_args(std::size_t width, std::size_t height, std::size_t patch, std::size_t stride)
{
    if (patch == 0) throw DimensionError("patch size must be positive");
    if (patch > std::min(width, height))
        throw DimensionError("image " + std::to_string(width) + "x" + std::to_string(height) +
                             " is smaller than patch size " + std::to_string(patch));
    if (stride < 1 || stride > patch)
        throw DimensionError("stride must be in [1, patch size]");
}

// Shared overlap-add: value_of(cell, x, y, c) supplies the sample.
template <typename ValueOf>
Image blend(const PatchGrid& grid, std::size_t channels, std::size_t out_w, std::size_t out_h,
            ValueOf&& value_of)
{
    const std::size_t p = grid.patch_size;
    const auto win = blend_window(p);
    const auto& k = simd::kernels();

    Image out(out_w, out_h, channels);
    std::vector<double> acc(out_w * out_h * channels, 0.0);
    std::vector<double> wsum(out_w * out_h * channels, 0.0);
    std::vector<double> row_w(p * channels);
    std::vector<double> row_v(p * channels);

    for (std::size_t cell = 0; cell < grid.origins.size(); ++cell) {
        const auto [x0, y0] = grid.origins[cell];
        if (x0 + p > out_w || y0 + p > out_h)
            throw CoverageError("patch extends past the output extent");
        for (std::size_t py = 0; py < p; ++py) {
            for (std::size_t px = 0; px < p; ++px)
                for (std::size_t c = 0; c < channels; ++c) {
                    row_w[px * channels + c] = win[py] * win[px];
                    row_v[px * channels + c] = value_of(cell, px, py, c);
                }
            const std::size_t offset = ((y0 + py) * out_w + x0) * channels;
            k.weighted_accumulate(row_w.data(), row_v.data(), acc.data() + offset,
                                  wsum.data() + offset, p * channels);
        }
    }

    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        if (!(wsum[i] > 0.0))
            throw CoverageError("pixel (" + std::to_string((i / channels) % out_w) + ", " +
                                std::to_string((i / channels) / out_w) +
                                ") is not covered by any patch");
        dst[i] = acc[i] / wsum[i];
    }
    return out;
}

} // namespace

std::vector<std::size_t> axis_origins(std::size_t dim, std::size_t patch, std::size_t stride)
{
    const std::size_t span = dim - patch;
    const std::size_t count = (span + stride - 1) / stride + 1;
    std::vector<std::size_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = std::min(i * stride, span);
    return out;
}

PatchGrid plan_grid(std::size_t width, std::size_t height, std::size_t patch, std::size_t stride)
{
    check_grid_args(width, height, patch, stride);
    PatchGrid grid;
    grid.patch_size = patch;
    grid.stride = stride;
    const auto xs = axis_origins(width, patch, stride);
    const auto ys = axis_origins(height, patch, stride);
    grid.cols = xs.size();
    grid.rows = ys.size();
    grid.origins.reserve(xs.size() * ys.size());
    for (auto y : ys)
        for (auto x : xs) grid.origins.push_back({x, y});
    return grid;
}

PatchGrid extract_patches(const Image& img, std::size_t patch, std::size_t stride)
{
    auto grid = plan_grid(img.width(), img.height(), patch, stride);
    grid.patches.reserve(grid.origins.size());
    for (const auto& o : grid.origins) grid.patches.push_back(img.crop(o.x, o.y, patch, patch));
    return grid;
}

std::vector<double> blend_window(std::size_t patch)
{
    std::vector<double> w(patch);
    const double half = static_cast<double>(patch) / 2.0;
    for (std::size_t i = 0; i < patch; ++i) {
        const double t = 1.0 - std::abs(static_cast<double>(i) + 0.5 - half) / half;
        w[i] = std::max(t, window_floor);
    }
    return w;
}

Image stitch_patches(const PatchGrid& grid, std::size_t out_w, std::size_t out_h)
{
    if (grid.patches.size() != grid.origins.size() || grid.patches.empty())
        throw CoverageError("grid has no patches to stitch");
    const std::size_t channels = grid.patches.front().channels();
    for (const auto& p : grid.patches)
        if (p.width() != grid.patch_size || p.height() != grid.patch_size ||
            p.channels() != channels)
            throw DimensionError("patch shape does not match grid");
    return blend(grid, channels, out_w, out_h,
                 [&](std::size_t cell, std::size_t x, std::size_t y, std::size_t c) {
                     return grid.patches[cell].at(x, y, c);
                 });
}

Image splat_values(const PatchGrid& grid, std::span<const double> values, std::size_t out_w,
                   std::size_t out_h)
{
    if (values.size() != grid.origins.size())
        throw DimensionError("one value per patch cell is required");
    if (values.empty()) throw CoverageError("grid has no cells");
    return blend(grid, 1, out_w, out_h,
                 [&](std::size_t cell, std::size_t, std::size_t, std::size_t) {
                     return values[cell];
                 });
}

} // namespace edof
