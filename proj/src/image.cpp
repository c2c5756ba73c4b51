#include "edof/image.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "edof/errors.hpp"

namespace edof {

Image::Image(std::size_t width, std::size_t height, std::size_t channels, double fill)
    : width_(width), height_(height), channels_(channels), data_(width * height * channels, fill)
{
    if (channels != 1 && channels != 3)
        throw DimensionError("image must have 1 or 3 channels, got " + std::to_string(channels));
}

Image::Image(std::size_t width, std::size_t height, std::size_t channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data))
{
    if (channels != 1 && channels != 3)
        throw DimensionError("image must have 1 or 3 channels, got " + std::to_string(channels));
    if (data_.size() != width * height * channels)
        throw DimensionError("image data length does not match width*height*channels");
}

Image Image::plane(std::size_t c) const
{
    if (c >= channels_) throw DimensionError("channel index out of range");
    if (channels_ == 1) return *this;
    Image out(width_, height_, 1);
    auto dst = out.data();
    for (std::size_t i = 0; i < pixel_count(); ++i) dst[i] = data_[i * channels_ + c];
    return out;
}

void Image::set_plane(std::size_t c, const Image& plane)
{
    if (c >= channels_ || plane.channels() != 1 || plane.width() != width_ ||
        plane.height() != height_)
        throw DimensionError("plane does not match image");
    auto src = plane.data();
    for (std::size_t i = 0; i < pixel_count(); ++i) data_[i * channels_ + c] = src[i];
}

Image Image::crop(std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) const
{
    if (x0 + w > width_ || y0 + h > height_) throw DimensionError("crop window outside image");
    Image out(w, h, channels_);
    const std::size_t row = w * channels_;
    for (std::size_t y = 0; y < h; ++y) {
        const double* src = data_.data() + ((y0 + y) * width_ + x0) * channels_;
        std::copy(src, src + row, out.data().data() + y * row);
    }
    return out;
}

void Image::clamp_unit() noexcept
{
    for (double& v : data_) v = std::clamp(v, 0.0, 1.0);
}

double Image::mean() const noexcept
{
    if (data_.empty()) return 0.0;
    return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

Image green_channel(const Image& img)
{
    return img.channels() == 3 ? img.plane(1) : img;
}

Image shift_image(const Image& img, long dx, long dy)
{
    const long w = static_cast<long>(img.width());
    const long h = static_cast<long>(img.height());
    Image out(img.width(), img.height(), img.channels());
    for (long y = 0; y < h; ++y) {
        const long sy = std::clamp(y - dy, 0L, h - 1);
        for (long x = 0; x < w; ++x) {
            const long sx = std::clamp(x - dx, 0L, w - 1);
            for (std::size_t c = 0; c < img.channels(); ++c)
                out.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y), c) =
                    img.at(static_cast<std::size_t>(sx), static_cast<std::size_t>(sy), c);
        }
    }
    return out;
}

} // namespace edof
