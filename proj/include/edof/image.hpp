#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace edof {

/// Row-major, channel-interleaved floating-point image. Intensities are in
/// [0, 1] once loaded or normalized; intermediate results (unclamped
/// deconvolution output, noise before clamping) may leave that range.
class Image {
public:
    Image() = default;
    Image(std::size_t width, std::size_t height, std::size_t channels = 1, double fill = 0.0);
    Image(std::size_t width, std::size_t height, std::size_t channels, std::vector<double> data);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t channels() const noexcept { return channels_; }
    std::size_t pixel_count() const noexcept { return width_ * height_; }
    bool empty() const noexcept { return data_.empty(); }

    double& at(std::size_t x, std::size_t y, std::size_t c = 0) noexcept
    {
        return data_[(y * width_ + x) * channels_ + c];
    }
    double at(std::size_t x, std::size_t y, std::size_t c = 0) const noexcept
    {
        return data_[(y * width_ + x) * channels_ + c];
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool same_shape(const Image& other) const noexcept
    {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }

    // Single-channel copy of one plane.
    Image plane(std::size_t c) const;
    void set_plane(std::size_t c, const Image& plane);

    // Copy of the w x h window whose top-left corner is (x0, y0). The window
    // must lie inside the image.
    Image crop(std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) const;

    void clamp_unit() noexcept;
    double mean() const noexcept;

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::size_t channels_ = 0;
    std::vector<double> data_;
};

/// Green plane of an RGB image; single-channel images are returned as-is.
Image green_channel(const Image& img);

/// Translate by (dx, dy) with edge replication: out(x, y) = in(x - dx, y - dy).
Image shift_image(const Image& img, long dx, long dy);

} // namespace edof
