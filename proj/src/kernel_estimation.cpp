#include "edof/kernel_estimation.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "edof/blur_metric.hpp"
#include "edof/errors.hpp"
#include "edof/fft.hpp"
#include "edof/parallel.hpp"
#include "edof/simd.hpp"

namespace edof {
namespace {

constexpr int map_format_version = 1;
constexpr double flat_threshold = 1e-9;

bool is_flat(const Image& g)
{
    double total = 0.0;
    for (std::size_t y = 0; y < g.height(); ++y)
        for (std::size_t x = 0; x < g.width(); ++x) {
            if (x + 1 < g.width()) total += std::abs(g.at(x + 1, y) - g.at(x, y));
            if (y + 1 < g.height()) total += std::abs(g.at(x, y + 1) - g.at(x, y));
        }
    return total <= flat_threshold;
}

} // namespace

Kernel estimate_kernel(const Image& sharp, const Image& blurry, std::size_t k, double lambda_k)
{
    const Image s = green_channel(sharp);
    const Image b = green_channel(blurry);
    if (!s.same_shape(b)) throw DimensionError("sharp and blurry patches differ in size");
    const std::size_t w = s.width(), h = s.height();
    if (k % 2 == 0 || k == 0 || k > std::min(w, h) || k > Kernel::max_size)
        throw DimensionError("kernel size must be odd and fit inside the patch");
    if (!(lambda_k > 0.0) || !std::isfinite(lambda_k)) throw DomainError("lambda_k must be > 0");
    if (std::all_of(s.data().begin(), s.data().end(), [](double v) { return v == 0.0; }))
        throw DegenerateInputError("sharp patch is all zeros");

    const auto I = fft2(s.data(), w, h);
    const auto B = fft2(b.data(), w, h);
    const std::vector<double> reg(I.size(), lambda_k);

    std::vector<Complex> H(I.size());
    simd::kernels().regularized_divide(I.data(), B.data(), reg.data(), H.data(), H.size());
    const auto centered = fftshift(ifft2_real(H, w, h), w, h);

    const std::size_t r = k / 2;
    const std::size_t x0 = w / 2 - r, y0 = h / 2 - r;
    std::vector<double> weights(k * k);
    for (std::size_t y = 0; y < k; ++y)
        std::copy_n(centered.data() + (y0 + y) * w + x0, k, weights.data() + y * k);
    return Kernel(k, std::move(weights)).normalized();
}

KernelMap estimate_kernel_map(const Image& sharp, const Image& blurry, std::size_t patch,
                              std::size_t stride, std::size_t k, double lambda_k)
{
    if (sharp.width() != blurry.width() || sharp.height() != blurry.height())
        throw DimensionError("sharp and blurry images differ in size");
    if (k % 2 == 0 || k > patch) throw DimensionError("kernel size must be odd and at most the patch size");
    const Image s = green_channel(sharp);
    const Image b = green_channel(blurry);
    const auto grid = plan_grid(s.width(), s.height(), patch, stride);

    KernelMap map;
    map.patch_size = patch;
    map.stride = stride;
    map.kernel_size = k;
    map.lambda_k = lambda_k;
    map.cols = grid.cols;
    map.rows = grid.rows;
    map.cells.resize(grid.size());

    parallel_for(grid.size(), [&](std::size_t i) {
        const auto o = grid.origins[i];
        const Image sp = s.crop(o.x, o.y, patch, patch);
        const Image bp = b.crop(o.x, o.y, patch, patch);
        KernelCell& cell = map.cells[i];
        cell.origin = o;
        cell.blur = crete_blur(bp);
        cell.degenerate = is_flat(sp);
        cell.kernel = cell.degenerate ? Kernel::delta(k) : estimate_kernel(sp, bp, k, lambda_k);
    });
    return map;
}

std::string kernel_map_to_json(const KernelMap& map)
{
    nlohmann::json j;
    j["version"] = map_format_version;
    j["patch_size"] = map.patch_size;
    j["stride"] = map.stride;
    j["kernel_size"] = map.kernel_size;
    j["lambda_k"] = map.lambda_k;
    j["cols"] = map.cols;
    j["rows"] = map.rows;
    j["source"] = map.source;
    auto& cells = j["cells"] = nlohmann::json::array();
    for (const auto& c : map.cells)
        cells.push_back({{"x", c.origin.x},
                         {"y", c.origin.y},
                         {"blur", c.blur},
                         {"degenerate", c.degenerate},
                         {"kernel", std::vector<double>(c.kernel.weights().begin(),
                                                        c.kernel.weights().end())}});
    return j.dump(1);
}

KernelMap kernel_map_from_json(const std::string& text)
{
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("version").get<int>() != map_format_version)
            throw ConfigError("unsupported kernel map version");
        KernelMap map;
        map.patch_size = j.at("patch_size").get<std::size_t>();
        map.stride = j.at("stride").get<std::size_t>();
        map.kernel_size = j.at("kernel_size").get<std::size_t>();
        map.lambda_k = j.at("lambda_k").get<double>();
        map.cols = j.at("cols").get<std::size_t>();
        map.rows = j.at("rows").get<std::size_t>();
        map.source = j.value("source", std::string{});
        for (const auto& c : j.at("cells")) {
            KernelCell cell;
            cell.origin = {c.at("x").get<std::size_t>(), c.at("y").get<std::size_t>()};
            cell.blur = c.at("blur").get<double>();
            cell.degenerate = c.value("degenerate", false);
            cell.kernel = Kernel(map.kernel_size, c.at("kernel").get<std::vector<double>>());
            map.cells.push_back(std::move(cell));
        }
        if (map.cells.size() != map.cols * map.rows)
            throw ConfigError("kernel map cell count does not match its grid");
        return map;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed kernel map JSON: ") + ex.what());
    } catch (const DomainError& ex) {
        throw ConfigError(std::string("invalid kernel map: ") + ex.what());
    }
}

void save_kernel_map(const std::filesystem::path& path, const KernelMap& map)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot create " + path.string());
    out << kernel_map_to_json(map) << '\n';
    if (!out) throw IoError("failed to write " + path.string());
}

KernelMap load_kernel_map(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open kernel map " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return kernel_map_from_json(ss.str());
}

Image kernel_montage(const KernelMap& map, std::size_t tiles_per_row)
{
    if (tiles_per_row == 0) throw DomainError("tiles_per_row must be positive");
    std::vector<const KernelCell*> cells;
    for (const auto& c : map.cells)
        if (!c.degenerate) cells.push_back(&c);
    std::stable_sort(cells.begin(), cells.end(),
                     [](const KernelCell* a, const KernelCell* b) { return a->blur < b->blur; });
    if (cells.empty()) return Image(1, 1, 1);

    const std::size_t k = map.kernel_size;
    const std::size_t cols = std::min(tiles_per_row, cells.size());
    const std::size_t rows = (cells.size() + cols - 1) / cols;
    Image out(cols * (k + 1) + 1, rows * (k + 1) + 1, 1);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto w = cells[i]->kernel.weights();
        const double peak = *std::max_element(w.begin(), w.end());
        const std::size_t ox = 1 + (i % cols) * (k + 1), oy = 1 + (i / cols) * (k + 1);
        for (std::size_t y = 0; y < k; ++y)
            for (std::size_t x = 0; x < k; ++x)
                out.at(ox + x, oy + y) = peak > 0.0 ? std::clamp(w[y * k + x] / peak, 0.0, 1.0) : 0.0;
    }
    return out;
}

} // namespace edof
