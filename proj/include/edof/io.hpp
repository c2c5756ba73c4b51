#pragma once

#include <filesystem>

#include "edof/image.hpp"

namespace edof {

struct LoadedImage {
    Image image;
    int bit_depth = 8; // 8 or 16, as stored on disk
};

// PNG or TIFF (by extension), 8/16-bit, gray or RGB. Palette images are
// expanded and alpha is dropped. Samples are scaled to [0, 1] by 255 or 65535.
LoadedImage load_image(const std::filesystem::path& path);

// Writes PNG or TIFF by extension. Values are clamped to [0, 1] and rounded to
// the requested depth.
void save_image(const std::filesystem::path& path, const Image& img, int bit_depth = 8);

} // namespace edof
