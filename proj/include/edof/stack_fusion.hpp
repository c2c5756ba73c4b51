#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "edof/image.hpp"
#include "edof/patches.hpp"

namespace edof {

inline constexpr double min_registration_confidence = 0.05;

/// `moving` matches `reference` translated by (dx, dy):
/// moving(x, y) ~ reference(x - dx, y - dy).
struct Translation {
    long dx = 0;
    long dy = 0;
    double confidence = 0.0; // correlation peak over the surface's L2 norm
};

/// Integer translation by phase correlation on the green channels.
/// Throws RegistrationError when the confidence is below 0.05.
Translation register_translation(const Image& reference, const Image& moving);

struct RegisteredStack {
    std::vector<Image> images;             // aligned to the reference frame
    std::vector<Translation> translations; // as measured, one per input
};

/// Registers every frame against stack[ref_index] and undoes the shift with
/// edge replication.
RegisteredStack register_stack(std::span<const Image> stack, std::size_t ref_index);

struct FusionResult {
    Image fused;
    std::vector<std::size_t> selection; // winning stack index per grid cell
    PatchGrid grid;                     // origins only
};

/// Per grid cell, keeps the member with the lowest blur score (lowest index on
/// ties) and stitches the winners.
FusionResult fuse_stack(std::span<const Image> stack, std::size_t patch, std::size_t stride);

} // namespace edof
