#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace edof {

/// Square, odd-sized convolution kernel (PSF), row-major. The center tap sits
/// at (size / 2, size / 2).
class Kernel {
public:
    static constexpr std::size_t max_size = 127;

    Kernel() : Kernel(delta(1)) {}
    Kernel(std::size_t size, std::vector<double> weights);

    static Kernel delta(std::size_t size = 1);

    std::size_t size() const noexcept { return size_; }
    std::size_t radius() const noexcept { return size_ / 2; }

    double at(std::size_t col, std::size_t row) const noexcept { return w_[row * size_ + col]; }
    double& at(std::size_t col, std::size_t row) noexcept { return w_[row * size_ + col]; }

    std::span<const double> weights() const noexcept { return w_; }
    std::span<double> weights() noexcept { return w_; }

    double sum() const noexcept;

    // Rescale to unit sum. Throws DomainError when the sum is (near) zero.
    Kernel normalized() const;

    // Second central moment of |w| treated as a 2D distribution
    // (var_x + var_y); a scalar width measure.
    double second_moment() const noexcept;

    // Sum of squared 3x3 Laplacian responses over the kernel (zero outside).
    double laplacian_energy() const noexcept;

    friend bool operator==(const Kernel&, const Kernel&) = default;

private:
    std::size_t size_ = 1;
    std::vector<double> w_;
};

/// Elementwise L2 distance; kernels must have the same size.
double kernel_distance(const Kernel& a, const Kernel& b);

} // namespace edof
