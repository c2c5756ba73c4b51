#include "edof/psf_models.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "edof/errors.hpp"
#include "edof/kernel_estimation.hpp"

namespace edof {

namespace {
constexpr double delta_sigma = 0.05;
constexpr double unit_sum_tolerance = 1e-6;
constexpr int lut_format_version = 1;

Kernel blend(const Kernel& a, const Kernel& b, double t)
{
    std::vector<double> w(a.weights().size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = (1.0 - t) * a.weights()[i] + t * b.weights()[i];
    return Kernel(a.size(), std::move(w)).normalized();
}
} // namespace

std::size_t auto_kernel_size(double sigma)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be finite and >= 0");
    const double half = std::ceil(3.0 * sigma);
    if (half >= static_cast<double>(max_auto_kernel_size)) return max_auto_kernel_size;
    return std::min(max_auto_kernel_size, 2 * static_cast<std::size_t>(half) + 1);
}

Kernel gaussian_kernel(double sigma, std::optional<std::size_t> size)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be finite and >= 0");
    if (size && (*size % 2 == 0 || *size > Kernel::max_size))
        throw DomainError("kernel size must be odd and at most 127");
    if (sigma < delta_sigma) return Kernel::delta(size.value_or(1));

    const std::size_t k = size.value_or(auto_kernel_size(sigma));
    const long r = static_cast<long>(k / 2);
    std::vector<double> w(k * k);
    const double denom = 2.0 * sigma * sigma;
    for (long y = -r; y <= r; ++y)
        for (long x = -r; x <= r; ++x)
            w[static_cast<std::size_t>((y + r) * static_cast<long>(k) + (x + r))] =
                std::exp(-static_cast<double>(x * x + y * y) / denom);
    return Kernel(k, std::move(w)).normalized();
}

double sigma_from_blur(double blur, double scale)
{
    if (!(blur >= 0.0 && blur <= 1.0)) throw DomainError("blur level must lie in [0, 1]");
    return scale * blur;
}

// ---- KernelLut ---------------------------------------------------------------

KernelLut::KernelLut(std::size_t bin_count, std::size_t kernel_size)
    : bin_count_(bin_count), kernel_size_(kernel_size)
{
    if (bin_count == 0) throw DomainError("LUT needs at least one bin");
    if (kernel_size % 2 == 0 || kernel_size > Kernel::max_size)
        throw DomainError("LUT kernel size must be odd and at most 127");
}

std::size_t KernelLut::bin_of(double blur) const noexcept
{
    const double b = std::clamp(blur, 0.0, 1.0) * static_cast<double>(bin_count_);
    return std::min(bin_count_ - 1, static_cast<std::size_t>(b));
}

double KernelLut::bin_center(std::size_t bin) const noexcept
{
    return (static_cast<double>(bin) + 0.5) / static_cast<double>(bin_count_);
}

const LutEntry* KernelLut::find(std::size_t bin) const noexcept
{
    auto it = std::lower_bound(entries_.begin(), entries_.end(), bin,
                               [](const LutEntry& e, std::size_t b) { return e.bin < b; });
    return it != entries_.end() && it->bin == bin ? &*it : nullptr;
}

void KernelLut::set_entry(LutEntry e)
{
    if (e.bin >= bin_count_) throw DomainError("LUT bin index out of range");
    if (e.kernel.size() != kernel_size_) throw DimensionError("LUT kernel size mismatch");
    if (std::abs(e.kernel.sum() - 1.0) > unit_sum_tolerance)
        throw DomainError("LUT kernels must be unit-sum");
    e.blur_center = bin_center(e.bin);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), e.bin,
                               [](const LutEntry& x, std::size_t b) { return x.bin < b; });
    if (it != entries_.end() && it->bin == e.bin)
        *it = std::move(e);
    else
        entries_.insert(it, std::move(e));
}

KernelLut lut_build(std::span<const KernelMap> maps, std::size_t bin_count)
{
    if (maps.empty()) throw EmptyTableError("no kernel maps given");
    const std::size_t k = maps.front().kernel_size;
    KernelLut lut(bin_count, k);

    std::vector<std::vector<double>> sums(bin_count);
    std::vector<std::size_t> counts(bin_count, 0);
    for (const auto& map : maps) {
        if (map.kernel_size != k) throw DimensionError("kernel maps use different kernel sizes");
        lut.provenance.sources.push_back(map.source);
        for (const auto& cell : map.cells) {
            if (cell.degenerate) continue;
            const std::size_t b = lut.bin_of(cell.blur);
            auto& acc = sums[b];
            if (acc.empty()) acc.assign(k * k, 0.0);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += cell.kernel.weights()[i];
            ++counts[b];
        }
    }
    lut.provenance.lambda_k = maps.front().lambda_k;
    lut.provenance.patch_size = maps.front().patch_size;

    for (std::size_t b = 0; b < bin_count; ++b) {
        if (counts[b] == 0) continue;
        for (double& v : sums[b]) v /= static_cast<double>(counts[b]);
        lut.set_entry({b, 0.0, counts[b], Kernel(k, std::move(sums[b])).normalized()});
    }
    if (lut.empty()) throw EmptyTableError("no non-degenerate kernel cells to tabulate");
    return lut;
}

KernelLut lut_build(const KernelMap& map, std::size_t bin_count)
{
    return lut_build(std::span<const KernelMap>(&map, 1), bin_count);
}

Kernel lut_query(const KernelLut& lut, double blur)
{
    if (lut.empty()) throw EmptyTableError("kernel LUT is empty");
    const auto& entries = lut.entries();
    const std::size_t bin = lut.bin_of(blur);
    if (const auto* hit = lut.find(bin)) return hit->kernel;

    auto upper = std::lower_bound(entries.begin(), entries.end(), bin,
                                  [](const LutEntry& e, std::size_t b) { return e.bin < b; });
    if (upper == entries.begin()) return upper->kernel;
    if (upper == entries.end()) return entries.back().kernel;
    const auto& lo = *std::prev(upper);
    const auto& hi = *upper;
    const double t = std::clamp((blur - lo.blur_center) / (hi.blur_center - lo.blur_center), 0.0, 1.0);
    return blend(lo.kernel, hi.kernel, t);
}

// ---- JSON --------------------------------------------------------------------

std::string lut_to_json(const KernelLut& lut)
{
    nlohmann::json j;
    j["version"] = lut_format_version;
    j["bin_count"] = lut.bin_count();
    j["kernel_size"] = lut.kernel_size();
    j["scale_note"] = "blur level in [0,1] (Crete metric) binned as floor(blur*bin_count); "
                      "kernels are unit-sum, row-major";
    j["provenance"] = {{"sources", lut.provenance.sources},
                       {"lambda_k", lut.provenance.lambda_k},
                       {"patch_size", lut.provenance.patch_size}};
    auto& entries = j["entries"] = nlohmann::json::array();
    for (const auto& e : lut.entries())
        entries.push_back({{"bin", e.bin},
                           {"blur_center", e.blur_center},
                           {"count", e.count},
                           {"kernel", std::vector<double>(e.kernel.weights().begin(),
                                                          e.kernel.weights().end())}});
    return j.dump(1);
}

KernelLut lut_from_json(const std::string& text)
{
    try {
        const auto j = nlohmann::json::parse(text);
        const int version = j.at("version").get<int>();
        if (version != lut_format_version)
            throw ConfigError("unsupported LUT version " + std::to_string(version));
        KernelLut lut(j.at("bin_count").get<std::size_t>(), j.at("kernel_size").get<std::size_t>());
        if (auto p = j.find("provenance"); p != j.end()) {
            lut.provenance.sources = p->value("sources", std::vector<std::string>{});
            lut.provenance.lambda_k = p->value("lambda_k", 0.0);
            lut.provenance.patch_size = p->value("patch_size", std::size_t{0});
        }
        for (const auto& e : j.at("entries")) {
            auto w = e.at("kernel").get<std::vector<double>>();
            if (w.size() != lut.kernel_size() * lut.kernel_size())
                throw ConfigError("LUT kernel has the wrong number of weights");
            Kernel ker(lut.kernel_size(), std::move(w));
            if (std::abs(ker.sum() - 1.0) > unit_sum_tolerance)
                throw ConfigError("LUT kernel for bin " + std::to_string(e.at("bin").get<std::size_t>()) +
                                  " is not unit-sum");
            lut.set_entry({e.at("bin").get<std::size_t>(), 0.0, e.at("count").get<std::size_t>(),
                           std::move(ker)});
        }
        if (lut.empty()) throw ConfigError("LUT has no entries");
        return lut;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed LUT JSON: ") + ex.what());
    } catch (const DomainError& ex) {
        throw ConfigError(std::string("invalid LUT: ") + ex.what());
    } catch (const DimensionError& ex) {
        throw ConfigError(std::string("invalid LUT: ") + ex.what());
    }
}

void save_lut(const std::filesystem::path& path, const KernelLut& lut)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot create " + path.string());
    out << lut_to_json(lut) << '\n';
    if (!out) throw IoError("failed to write " + path.string());
}

KernelLut load_lut(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open LUT " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return lut_from_json(ss.str());
}

} // namespace edof
