#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edof/kernel.hpp"

namespace edof {

struct KernelMap;

inline constexpr double default_sigma_scale = 50.0;
inline constexpr std::size_t default_lut_bins = 100;
inline constexpr std::size_t max_auto_kernel_size = 63;

/// min(63, 2 * ceil(3 * sigma) + 1)
std::size_t auto_kernel_size(double sigma);

/// Sampled isotropic Gaussian exp(-d^2 / (2 sigma^2)) normalized to unit sum.
/// sigma < 0.05 yields an exact delta (1x1 unless a size is given).
Kernel gaussian_kernel(double sigma, std::optional<std::size_t> size = std::nullopt);

/// Linear blur-level to sigma mapping. Throws DomainError outside [0, 1].
double sigma_from_blur(double blur, double scale = default_sigma_scale);

struct LutEntry {
    std::size_t bin = 0;
    double blur_center = 0.0;
    std::size_t count = 0;
    Kernel kernel;
};

struct LutProvenance {
    std::vector<std::string> sources;
    double lambda_k = 0.0;
    std::size_t patch_size = 0;
};

/// Blur-level binned table of averaged kernels. Only populated bins are
/// stored; empty bins are interpolated at query time.
class KernelLut {
public:
    KernelLut(std::size_t bin_count, std::size_t kernel_size);

    std::size_t bin_count() const noexcept { return bin_count_; }
    std::size_t kernel_size() const noexcept { return kernel_size_; }
    const std::vector<LutEntry>& entries() const noexcept { return entries_; } // ascending bin
    bool empty() const noexcept { return entries_.empty(); }

    std::size_t bin_of(double blur) const noexcept;
    double bin_center(std::size_t bin) const noexcept;
    const LutEntry* find(std::size_t bin) const noexcept;

    // Adds or replaces the entry for e.bin. The kernel must be unit-sum.
    void set_entry(LutEntry e);

    LutProvenance provenance;

private:
    std::size_t bin_count_;
    std::size_t kernel_size_;
    std::vector<LutEntry> entries_;
};

/// Average the non-degenerate kernels of one or more kernel maps per blur bin
/// (bin = floor(blur * bins), clamped). Throws EmptyTableError when no usable
/// cell exists.
KernelLut lut_build(std::span<const KernelMap> maps, std::size_t bin_count = default_lut_bins);
KernelLut lut_build(const KernelMap& map, std::size_t bin_count = default_lut_bins);

/// Kernel for a blur level: the stored kernel of a populated bin, a linear
/// blend of the nearest populated neighbours for an empty bin, or the nearest
/// populated bin outside the populated range.
Kernel lut_query(const KernelLut& lut, double blur);

std::string lut_to_json(const KernelLut& lut);
KernelLut lut_from_json(const std::string& text);
void save_lut(const std::filesystem::path& path, const KernelLut& lut);
KernelLut load_lut(const std::filesystem::path& path);

} // namespace edof
