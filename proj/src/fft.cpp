#include "edof/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "edof/errors.hpp"

namespace edof {
namespace {

class PlanCache {
public:
    ~PlanCache()
    {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t width, std::size_t height, int sign)
    {
        const auto key = std::make_tuple(width, height, sign);
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        // Planning needs scratch arrays; FFTW_ESTIMATE leaves them untouched.
        const auto n = width * height;
        auto* in = fftw_alloc_complex(n);
        auto* out = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width), in, out,
                                          sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        if (!plan) throw Error("FFTW failed to create a plan");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache()
{
    static PlanCache instance;
    return instance;
}

std::vector<Complex> execute(std::vector<Complex> in, std::size_t width, std::size_t height,
                             int sign)
{
    if (in.size() != width * height || in.empty()) throw DimensionError("FFT size mismatch");
    std::vector<Complex> out(in.size());
    fftw_execute_dft(cache().get(width, height, sign), reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

} // namespace

std::vector<Complex> fft2(std::span<const double> real, std::size_t width, std::size_t height)
{
    return execute(std::vector<Complex>(real.begin(), real.end()), width, height, FFTW_FORWARD);
}

std::vector<Complex> fft2(std::span<const Complex> data, std::size_t width, std::size_t height)
{
    return execute(std::vector<Complex>(data.begin(), data.end()), width, height, FFTW_FORWARD);
}

std::vector<Complex> ifft2(std::span<const Complex> spectrum, std::size_t width, std::size_t height)
{
    auto out = execute(std::vector<Complex>(spectrum.begin(), spectrum.end()), width, height,
                       FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(width * height);
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<double> ifft2_real(std::span<const Complex> spectrum, std::size_t width,
                               std::size_t height)
{
    const auto full = ifft2(spectrum, width, height);
    std::vector<double> out(full.size());
    for (std::size_t i = 0; i < full.size(); ++i) out[i] = full[i].real();
    return out;
}

std::vector<double> embed_centered(std::span<const double> filter, std::size_t filter_size,
                                   std::size_t width, std::size_t height)
{
    if (filter.size() != filter_size * filter_size || filter_size % 2 == 0)
        throw DimensionError("filter must be odd-sized and square");
    std::vector<double> out(width * height, 0.0);
    const long r = static_cast<long>(filter_size / 2);
    const long w = static_cast<long>(width);
    const long h = static_cast<long>(height);
    for (long fy = 0; fy < static_cast<long>(filter_size); ++fy) {
        const long y = (((fy - r) % h) + h) % h;
        for (long fx = 0; fx < static_cast<long>(filter_size); ++fx) {
            const long x = (((fx - r) % w) + w) % w;
            out[static_cast<std::size_t>(y * w + x)] +=
                filter[static_cast<std::size_t>(fy) * filter_size + static_cast<std::size_t>(fx)];
        }
    }
    return out;
}

std::vector<double> fftshift(std::span<const double> data, std::size_t width, std::size_t height)
{
    std::vector<double> out(data.size());
    for (std::size_t y = 0; y < height; ++y) {
        const std::size_t ty = (y + height / 2) % height;
        for (std::size_t x = 0; x < width; ++x) {
            const std::size_t tx = (x + width / 2) % width;
            out[ty * width + tx] = data[y * width + x];
        }
    }
    return out;
}

} // namespace edof
