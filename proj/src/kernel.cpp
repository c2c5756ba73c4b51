#include "edof/kernel.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "edof/errors.hpp"

namespace edof {

Kernel::Kernel(std::size_t size, std::vector<double> weights) : size_(size), w_(std::move(weights))
{
    if (size % 2 == 0 || size < 1 || size > max_size)
        throw DomainError("kernel size must be odd and in [1, 127], got " + std::to_string(size));
    if (w_.size() != size * size) throw DimensionError("kernel data length must be size*size");
    for (double v : w_)
        if (!std::isfinite(v)) throw DomainError("kernel weights must be finite");
}

Kernel Kernel::delta(std::size_t size)
{
    std::vector<double> w(size * size, 0.0);
    w[(size / 2) * size + size / 2] = 1.0;
    return Kernel(size, std::move(w));
}

double Kernel::sum() const noexcept
{
    return std::accumulate(w_.begin(), w_.end(), 0.0);
}

Kernel Kernel::normalized() const
{
    const double s = sum();
    if (!(std::abs(s) > 1e-300)) throw DomainError("cannot normalize a zero-sum kernel");
    std::vector<double> w(w_);
    for (double& v : w) v /= s;
    return Kernel(size_, std::move(w));
}

double Kernel::second_moment() const noexcept
{
    double mass = 0, mx = 0, my = 0;
    for (std::size_t r = 0; r < size_; ++r)
        for (std::size_t c = 0; c < size_; ++c) {
            const double m = std::abs(at(c, r));
            mass += m;
            mx += m * static_cast<double>(c);
            my += m * static_cast<double>(r);
        }
    if (mass <= 0) return 0.0;
    mx /= mass;
    my /= mass;
    double var = 0;
    for (std::size_t r = 0; r < size_; ++r)
        for (std::size_t c = 0; c < size_; ++c) {
            const double dx = static_cast<double>(c) - mx;
            const double dy = static_cast<double>(r) - my;
            var += std::abs(at(c, r)) * (dx * dx + dy * dy);
        }
    return var / mass;
}

double Kernel::laplacian_energy() const noexcept
{
    const long n = static_cast<long>(size_);
    auto w = [&](long c, long r) {
        if (c < 0 || r < 0 || c >= n || r >= n) return 0.0;
        return at(static_cast<std::size_t>(c), static_cast<std::size_t>(r));
    };
    double e = 0;
    for (long r = -1; r <= n; ++r)
        for (long c = -1; c <= n; ++c) {
            const double l = w(c - 1, r) + w(c + 1, r) + w(c, r - 1) + w(c, r + 1) - 4 * w(c, r);
            e += l * l;
        }
    return e;
}

double kernel_distance(const Kernel& a, const Kernel& b)
{
    if (a.size() != b.size()) throw DimensionError("kernel sizes differ");
    double s = 0;
    for (std::size_t i = 0; i < a.weights().size(); ++i) {
        const double d = a.weights()[i] - b.weights()[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace edof
