#include "edof/blur_metric.hpp"

#include <algorithm>

#include "edof/errors.hpp"
#include "edof/forward_model.hpp"
#include "edof/parallel.hpp"
#include "edof/simd.hpp"

namespace edof {
namespace {

constexpr double flat_threshold = 1e-9;

// 1D moving average along x (horizontal = true) or y, reflect boundaries.
std::vector<double> box_blur(const Image& plane, bool horizontal)
{
    const std::size_t w = plane.width(), h = plane.height();
    const long half = static_cast<long>(crete_reblur_taps / 2);
    const double norm = 1.0 / static_cast<double>(crete_reblur_taps);
    std::vector<double> out(w * h, 0.0);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (long t = -half; t <= half; ++t) {
                if (horizontal)
                    s += plane.at(reflect_index(static_cast<long>(x) + t, w), y);
                else
                    s += plane.at(x, reflect_index(static_cast<long>(y) + t, h));
            }
            out[y * w + x] = s * norm;
        }
    return out;
}

} // namespace

double crete_blur(const Image& patch)
{
    const Image g = green_channel(patch);
    const std::size_t w = g.width(), h = g.height();
    if (std::min(w, h) < 3) throw DimensionError("blur metric needs a patch of at least 3x3");

    const auto& k = simd::kernels();
    const double* orig = g.data().data();

    const auto rh = box_blur(g, true);
    simd::VariationSums horiz;
    for (std::size_t y = 0; y < h; ++y) {
        const auto s = k.variation_sums(orig + y * w, rh.data() + y * w, w - 1, 1);
        horiz.total += s.total;
        horiz.variation += s.variation;
    }

    const auto rv = box_blur(g, false);
    const auto vert = k.variation_sums(orig, rv.data(), w * (h - 1), w);

    double score = -1.0;
    for (const auto& s : {horiz, vert}) {
        if (s.total <= flat_threshold) continue;
        score = std::max(score, (s.total - s.variation) / s.total);
    }
    if (score < 0.0) return 1.0;
    return std::clamp(score, 0.0, 1.0);
}

BlurMap blur_map(const Image& img, std::size_t patch, std::size_t stride)
{
    const Image g = green_channel(img);
    BlurMap map;
    map.grid = plan_grid(g.width(), g.height(), patch, stride);
    map.patch_scores.resize(map.grid.size());
    parallel_for(map.grid.size(), [&](std::size_t i) {
        const auto [x, y] = map.grid.origins[i];
        map.patch_scores[i] = crete_blur(g.crop(x, y, patch, patch));
    });
    map.values = splat_values(map.grid, map.patch_scores, g.width(), g.height());
    map.values.clamp_unit();
    return map;
}

double mean_blur(const BlurMap& map, std::size_t x0, std::size_t y0, std::size_t w, std::size_t h)
{
    if (x0 + w > map.width() || y0 + h > map.height() || w == 0 || h == 0)
        throw DimensionError("region outside blur map");
    double s = 0.0;
    for (std::size_t y = y0; y < y0 + h; ++y)
        for (std::size_t x = x0; x < x0 + w; ++x) s += map.values.at(x, y);
    return s / static_cast<double>(w * h);
}

} // namespace edof
