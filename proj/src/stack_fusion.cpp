#include "edof/stack_fusion.hpp"

#include <cmath>

#include "edof/blur_metric.hpp"
#include "edof/errors.hpp"
#include "edof/fft.hpp"
#include "edof/parallel.hpp"

namespace edof {

Translation register_translation(const Image& reference, const Image& moving)
{
    if (reference.width() != moving.width() || reference.height() != moving.height())
        throw DimensionError("registration needs images of equal size");
    const Image r = green_channel(reference);
    const Image m = green_channel(moving);
    const std::size_t w = r.width(), h = r.height();

    const auto fr = fft2(r.data(), w, h);
    auto cross = fft2(m.data(), w, h);
    for (std::size_t i = 0; i < cross.size(); ++i) {
        const Complex c = cross[i] * std::conj(fr[i]);
        const double mag = std::abs(c);
        cross[i] = mag > 0.0 ? c / mag : Complex(0.0);
    }
    const auto surface = ifft2_real(cross, w, h);

    std::size_t best = 0;
    double energy = 0.0;
    for (std::size_t i = 0; i < surface.size(); ++i) {
        energy += surface[i] * surface[i];
        if (surface[i] > surface[best]) best = i;
    }
    Translation t;
    t.confidence = energy > 0.0 ? std::max(0.0, surface[best]) / std::sqrt(energy) : 0.0;
    if (t.confidence < min_registration_confidence)
        throw RegistrationError("phase correlation peak too weak (confidence " +
                                std::to_string(t.confidence) + ")");
    const long px = static_cast<long>(best % w), py = static_cast<long>(best / w);
    t.dx = px > static_cast<long>(w) / 2 ? px - static_cast<long>(w) : px;
    t.dy = py > static_cast<long>(h) / 2 ? py - static_cast<long>(h) : py;
    return t;
}

RegisteredStack register_stack(std::span<const Image> stack, std::size_t ref_index)
{
    if (stack.empty()) throw DegenerateInputError("empty image stack");
    if (ref_index >= stack.size()) throw DomainError("reference index outside the stack");
    RegisteredStack out;
    out.images.resize(stack.size());
    out.translations.resize(stack.size());
    parallel_for(stack.size(), [&](std::size_t i) {
        if (i == ref_index) {
            out.translations[i] = {0, 0, 1.0};
            out.images[i] = stack[i];
            return;
        }
        const auto t = register_translation(stack[ref_index], stack[i]);
        out.translations[i] = t;
        out.images[i] = shift_image(stack[i], -t.dx, -t.dy);
    });
    return out;
}

FusionResult fuse_stack(std::span<const Image> stack, std::size_t patch, std::size_t stride)
{
    if (stack.empty()) throw DegenerateInputError("empty image stack");
    for (const auto& img : stack)
        if (!img.same_shape(stack.front())) throw DimensionError("stack members differ in shape");

    const std::size_t w = stack.front().width(), h = stack.front().height();
    std::vector<Image> greens;
    greens.reserve(stack.size());
    for (const auto& img : stack) greens.push_back(green_channel(img));

    FusionResult res;
    res.grid = plan_grid(w, h, patch, stride);
    res.selection.assign(res.grid.size(), 0);
    res.grid.patches.resize(res.grid.size());

    parallel_for(res.grid.size(), [&](std::size_t i) {
        const auto [x, y] = res.grid.origins[i];
        std::size_t winner = 0;
        double best = 0.0;
        for (std::size_t s = 0; s < stack.size(); ++s) {
            const double b = crete_blur(greens[s].crop(x, y, patch, patch));
            if (s == 0 || b < best) {
                best = b;
                winner = s;
            }
        }
        res.selection[i] = winner;
        res.grid.patches[i] = stack[winner].crop(x, y, patch, patch);
    });
    res.fused = stitch_patches(res.grid, w, h);
    res.grid.patches.clear();
    return res;
}

} // namespace edof
