#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "edof/image.hpp"
#include "edof/kernel.hpp"

namespace testutil {

inline edof::Image random_image(std::size_t w, std::size_t h, std::uint64_t seed, std::size_t channels = 1)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    edof::Image img(w, h, channels);
    for (double& v : img.data()) v = u(rng);
    return img;
}

inline double max_abs_diff(const edof::Image& a, const edof::Image& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

// Circular convolution by brute force: out(x) = sum_d k(d) in(x - d).
inline edof::Image circular_convolve(const edof::Image& img, const edof::Kernel& k)
{
    const long w = static_cast<long>(img.width()), h = static_cast<long>(img.height());
    const long r = static_cast<long>(k.radius());
    edof::Image out(img.width(), img.height(), 1);
    for (long y = 0; y < h; ++y)
        for (long x = 0; x < w; ++x) {
            double s = 0.0;
            for (long dy = -r; dy <= r; ++dy)
                for (long dx = -r; dx <= r; ++dx) {
                    const long sx = ((x - dx) % w + w) % w, sy = ((y - dy) % h + h) % h;
                    s += k.at(static_cast<std::size_t>(dx + r), static_cast<std::size_t>(dy + r)) *
                         img.at(static_cast<std::size_t>(sx), static_cast<std::size_t>(sy));
                }
            out.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = s;
        }
    return out;
}

inline std::vector<double> ranks(const std::vector<double>& v)
{
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        for (std::size_t t = i; t <= j; ++t) r[idx[t]] = 0.5 * static_cast<double>(i + j);
        i = j + 1;
    }
    return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b)
{
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace testutil
