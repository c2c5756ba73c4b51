#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "edof/image.hpp"
#include "edof/kernel.hpp"
#include "edof/patches.hpp"

namespace edof {

inline constexpr std::size_t default_kernel_size = 15;
inline constexpr double default_lambda_k = 1e-3;

/// Ground-truth PSF of a registered sharp/blurry patch pair.
///
/// Solves the ridge problem min_h ||b - h * i||^2 + lambda ||h||^2 under the
/// circular model, elementwise in the frequency domain:
///
///     H = conj(I) B / (|I|^2 + lambda_k)
///
/// then moves zero lag to the patch center, crops k x k and normalizes to unit
/// sum. Negative weights are kept. `lambda_k` is an absolute ridge weight on
/// unnormalized DFT coefficients, so its effect depends on the patch size.
///
/// Throws DimensionError on shape mismatch or k > patch, DomainError for
/// lambda_k <= 0 and DegenerateInputError when the sharp patch is all zeros.
Kernel estimate_kernel(const Image& sharp, const Image& blurry, std::size_t k = default_kernel_size,
                       double lambda_k = default_lambda_k);

struct KernelCell {
    PatchOrigin origin;
    Kernel kernel;
    double blur = 0.0;       // Crete score of the blurry patch
    bool degenerate = false; // flat sharp patch; kernel is a delta
};

struct KernelMap {
    std::size_t patch_size = 64;
    std::size_t stride = 64;
    std::size_t kernel_size = default_kernel_size;
    double lambda_k = default_lambda_k;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string source; // free-form id of the image pair
    std::vector<KernelCell> cells;
};

/// Per-cell estimate_kernel over the green channels of a registered pair.
KernelMap estimate_kernel_map(const Image& sharp, const Image& blurry, std::size_t patch,
                              std::size_t stride, std::size_t k = default_kernel_size,
                              double lambda_k = default_lambda_k);

std::string kernel_map_to_json(const KernelMap& map);
KernelMap kernel_map_from_json(const std::string& text);
void save_kernel_map(const std::filesystem::path& path, const KernelMap& map);
KernelMap load_kernel_map(const std::filesystem::path& path);

/// Tiles of every non-degenerate kernel in ascending blur order, left to right
/// and then top to bottom, each rescaled to its own peak. One pixel gutters.
Image kernel_montage(const KernelMap& map, std::size_t tiles_per_row = 16);

} // namespace edof
