#include "edof/cli.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "edof/blur_metric.hpp"
#include "edof/config.hpp"
#include "edof/errors.hpp"
#include "edof/forward_model.hpp"
#include "edof/io.hpp"
#include "edof/kernel_estimation.hpp"
#include "edof/parallel.hpp"
#include "edof/psf_models.hpp"
#include "edof/restoration.hpp"
#include "edof/stack_fusion.hpp"

namespace edof::cli {
namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A flag whose value only overrides the config when it was given.
template <typename T>
struct Opt {
    T value{};
    CLI::Option* option = nullptr;
    bool given() const { return option != nullptr && option->count() > 0; }
    void apply(T& target) const
    {
        if (given()) target = value;
    }
};

struct Common {
    std::string config_path;
    CLI::Option* config_option = nullptr;
    Opt<std::size_t> patch, stride, kernel_size, bins;
    Opt<double> lambda_w, lambda_k, sigma_scale, max_blur;
    Opt<std::uint64_t> seed;
    Opt<unsigned> threads;

    Config resolve() const
    {
        try {
            return resolve_or_throw();
        } catch (const ConfigError& e) {
            throw UsageError(std::string("configuration error: ") + e.what());
        }
    }

    Config resolve_or_throw() const
    {
        Config cfg = config_option && config_option->count() > 0 ? load_config(config_path) : Config{};
        patch.apply(cfg.patch_size);
        stride.apply(cfg.stride);
        kernel_size.apply(cfg.kernel_size);
        bins.apply(cfg.lut_bins);
        lambda_w.apply(cfg.lambda_w);
        lambda_k.apply(cfg.lambda_k);
        sigma_scale.apply(cfg.sigma_scale);
        max_blur.apply(cfg.max_blur);
        seed.apply(cfg.seed);
        threads.apply(cfg.threads);
        cfg.validate();
        set_thread_count(cfg.threads);
        return cfg;
    }
};

void add_common(CLI::App* sub, Common& c)
{
    c.config_option = sub->add_option("--config", c.config_path, "key = value settings file; flags override it");
    c.threads.option = sub->add_option("--threads", c.threads.value, "Worker threads (0 = all cores)");
}

void add_grid(CLI::App* sub, Common& c)
{
    c.patch.option = sub->add_option("--patch", c.patch.value, "Patch size in pixels (default 64)");
    c.stride.option = sub->add_option("--stride", c.stride.value, "Patch stride in pixels (default 32)");
}

std::string fmt(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::ofstream open_text(const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot create " + path);
    return out;
}

void write_blur_png(const std::filesystem::path& path, const BlurMap& map)
{
    save_image(path, map.values, 16);
}

// ---- subcommands -------------------------------------------------------------

struct DeblurArgs {
    Common common;
    std::string method = "gaussian";
    std::string lut_path;
    CLI::Option* lut_option = nullptr;
    std::string emit_dir;
    std::string in, out;
};

int run_deblur(const DeblurArgs& a)
{
    if (a.method == "lut" && a.lut_option->count() == 0)
        throw UsageError("deblur --method lut requires --lut PATH");
    const Config cfg = a.common.resolve();

    std::optional<KernelLut> lut;
    if (a.method == "lut") lut = load_lut(a.lut_path);
    const LoadedImage input = load_image(a.in);

    DeblurParams p;
    p.method = a.method == "lut" ? DeblurMethod::lut : DeblurMethod::gaussian;
    p.patch = cfg.patch_size;
    p.stride = cfg.stride;
    p.lambda_w = cfg.lambda_w;
    p.sigma_scale = cfg.sigma_scale;
    p.max_blur = cfg.max_blur;
    p.lut = lut ? &*lut : nullptr;

    const Image restored = deblur_image(input.image, p);
    save_image(a.out, restored, input.bit_depth);

    if (!a.emit_dir.empty()) {
        std::filesystem::create_directories(a.emit_dir);
        const auto before = blur_map(input.image, cfg.patch_size, cfg.stride);
        const auto after = blur_map(restored, cfg.patch_size, cfg.stride);
        write_blur_png(std::filesystem::path(a.emit_dir) / "blurmap_before.png", before);
        write_blur_png(std::filesystem::path(a.emit_dir) / "blurmap_after.png", after);
        std::cout << "mean blur before " << fmt(before.values.mean()) << ", after "
                  << fmt(after.values.mean()) << '\n';
    }
    return 0;
}

struct BlurMapArgs {
    Common common;
    std::string csv, in, out;
};

int run_blur_map(const BlurMapArgs& a)
{
    const Config cfg = a.common.resolve();
    const LoadedImage input = load_image(a.in);
    const BlurMap map = blur_map(input.image, cfg.patch_size, cfg.stride);
    write_blur_png(a.out, map);
    if (!a.csv.empty()) {
        auto out = open_text(a.csv);
        out << "x,y,blur\n";
        for (std::size_t i = 0; i < map.grid.size(); ++i)
            out << map.grid.origins[i].x << ',' << map.grid.origins[i].y << ','
                << fmt(map.patch_scores[i]) << '\n';
    }
    return 0;
}

struct EstimateArgs {
    Common common;
    std::string sharp, blurry, out, montage;
};

int run_estimate(const EstimateArgs& a)
{
    const Config cfg = a.common.resolve();
    const Image sharp = load_image(a.sharp).image;
    const Image blurry = load_image(a.blurry).image;
    KernelMap map = estimate_kernel_map(sharp, blurry, cfg.patch_size, cfg.stride, cfg.kernel_size,
                                        cfg.lambda_k);
    map.source = std::filesystem::path(a.sharp).filename().string() + ":" +
                 std::filesystem::path(a.blurry).filename().string();
    save_kernel_map(a.out, map);
    if (!a.montage.empty()) save_image(a.montage, kernel_montage(map), 8);
    return 0;
}

struct BuildLutArgs {
    Common common;
    std::string out;
    std::vector<std::string> maps;
};

int run_build_lut(const BuildLutArgs& a)
{
    const Config cfg = a.common.resolve();
    std::vector<KernelMap> maps;
    for (const auto& path : a.maps) maps.push_back(load_kernel_map(path));
    const KernelLut lut = lut_build(maps, cfg.lut_bins);
    save_lut(a.out, lut);
    std::cout << lut.entries().size() << " populated bins of " << lut.bin_count() << '\n';
    return 0;
}

struct FuseArgs {
    Common common;
    std::string out, selection;
    long ref_index = -1;
    std::vector<std::string> images;
};

int run_fuse(const FuseArgs& a)
{
    const Config cfg = a.common.resolve();
    if (a.ref_index >= static_cast<long>(a.images.size()))
        throw UsageError("--ref-index outside the stack");
    std::vector<Image> stack;
    int depth = 8;
    for (const auto& path : a.images) {
        auto loaded = load_image(path);
        depth = std::max(depth, loaded.bit_depth);
        stack.push_back(std::move(loaded.image));
    }
    const std::size_t ref = a.ref_index < 0 ? stack.size() / 2 : static_cast<std::size_t>(a.ref_index);
    const auto registered = register_stack(stack, ref);
    for (std::size_t i = 0; i < a.images.size(); ++i) {
        const auto& t = registered.translations[i];
        std::cout << a.images[i] << ": shift (" << t.dx << ", " << t.dy << "), confidence "
                  << fmt(t.confidence) << '\n';
    }
    const auto fused = fuse_stack(registered.images, cfg.patch_size, cfg.stride);
    save_image(a.out, fused.fused, depth);
    if (!a.selection.empty()) {
        auto out = open_text(a.selection);
        out << "x,y,index\n";
        for (std::size_t i = 0; i < fused.grid.size(); ++i)
            out << fused.grid.origins[i].x << ',' << fused.grid.origins[i].y << ','
                << fused.selection[i] << '\n';
    }
    return 0;
}

struct SynthArgs {
    Common common;
    std::string input, texture, sharp_out, sidecar, out;
    std::string profile = "ramp";
    double sigma = 2.0, sigma_min = 0.0, sigma_max = 8.0, noise = 0.0, smoothing = 1.0;
    int bit_depth = 16;
};

int run_synth(const SynthArgs& a)
{
    const Config cfg = a.common.resolve();
    if (a.input.empty() == a.texture.empty())
        throw UsageError("synth needs exactly one of --input PATH or --texture WxH");

    Image sharp;
    if (!a.input.empty()) {
        sharp = load_image(a.input).image;
    } else {
        std::size_t w = 0, h = 0;
        char x = 0;
        std::istringstream ss(a.texture);
        if (!(ss >> w >> x >> h) || x != 'x' || w == 0 || h == 0 || !ss.eof())
            throw UsageError("--texture expects WxH, e.g. 512x512");
        sharp = random_texture(w, h, cfg.seed, a.smoothing);
    }
    if (!a.sharp_out.empty()) save_image(a.sharp_out, sharp, a.bit_depth);

    const DepthProfile profile = a.profile == "constant"
                                     ? DepthProfile::constant(a.sigma)
                                     : DepthProfile::horizontal_ramp(a.sigma_min, a.sigma_max, sharp.width());
    Image blurred = synth_depth_blur(sharp, profile, cfg.patch_size, cfg.stride);
    // Noise draws from a stream separate from the texture's.
    blurred = add_noise(blurred, a.noise, cfg.seed + 1);
    save_image(a.out, blurred, a.bit_depth);

    if (!a.sidecar.empty()) {
        auto out = open_text(a.sidecar);
        out << "x,y,sigma\n";
        for (const auto& s : patch_sigmas(sharp.width(), sharp.height(), profile, cfg.patch_size, cfg.stride))
            out << s.x << ',' << s.y << ',' << fmt(s.sigma) << '\n';
    }
    return 0;
}

struct MetricsArgs {
    Common common;
    std::string a, b;
};

int run_metrics(const MetricsArgs& m)
{
    const Config cfg = m.common.resolve();
    const Image a = load_image(m.a).image;
    const Image b = load_image(m.b).image;
    std::cout << "mse " << fmt(mse(a, b)) << '\n';
    std::cout << "psnr " << fmt(psnr(a, b)) << '\n';
    std::cout << "mean_blur_a " << fmt(blur_map(a, cfg.patch_size, cfg.stride).values.mean()) << '\n';
    std::cout << "mean_blur_b " << fmt(blur_map(b, cfg.patch_size, cfg.stride).values.mean()) << '\n';
    return 0;
}

} // namespace

int dispatch(int argc, const char* const* argv)
{
    CLI::App app{"Extended depth of field: space-variant deblurring of defocused images", "edof"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    std::function<int()> action;

    DeblurArgs deblur;
    auto* sd = app.add_subcommand("deblur", "Restore a spatially varying defocused image");
    sd->add_option("--method", deblur.method, "Kernel model: gaussian or lut")
        ->check(CLI::IsMember({"gaussian", "lut"}))
        ->capture_default_str();
    deblur.lut_option = sd->add_option("--lut", deblur.lut_path, "Kernel LUT JSON (required with --method lut)");
    add_grid(sd, deblur.common);
    deblur.common.lambda_w.option = sd->add_option("--lambda", deblur.common.lambda_w.value, "Wiener regularization weight (default 0.1)");
    deblur.common.sigma_scale.option = sd->add_option("--sigma-scale", deblur.common.sigma_scale.value, "sigma = scale * blur (default 50)");
    deblur.common.max_blur.option = sd->add_option("--max-blur", deblur.common.max_blur.value, "Leave patches blurrier than this untouched (default 1.0)");
    sd->add_option("--emit-blurmaps", deblur.emit_dir, "Write blur maps before/after restoration into DIR");
    add_common(sd, deblur.common);
    sd->add_option("input", deblur.in, "Input image (PNG/TIFF)")->required();
    sd->add_option("output", deblur.out, "Restored image")->required();
    sd->callback([&] { action = [&] { return run_deblur(deblur); }; });

    BlurMapArgs bm;
    auto* sb = app.add_subcommand("blur-map", "Per-pixel blur level as a 16-bit PNG");
    add_grid(sb, bm.common);
    sb->add_option("--csv", bm.csv, "Also write per-patch scores (x,y,blur)");
    add_common(sb, bm.common);
    sb->add_option("input", bm.in, "Input image")->required();
    sb->add_option("output", bm.out, "Blur map PNG")->required();
    sb->callback([&] { action = [&] { return run_blur_map(bm); }; });

    EstimateArgs est;
    auto* se = app.add_subcommand("estimate-kernels", "Ground-truth kernels from a registered sharp/blurry pair");
    se->add_option("--out", est.out, "Kernel map JSON")->required();
    se->add_option("--montage", est.montage, "Kernel montage PNG, ascending blur");
    add_grid(se, est.common);
    est.common.kernel_size.option = se->add_option("--kernel-size", est.common.kernel_size.value, "Odd kernel size (default 15)");
    est.common.lambda_k.option = se->add_option("--lambda-k", est.common.lambda_k.value, "Kernel ridge weight (default 1e-3)");
    add_common(se, est.common);
    se->add_option("sharp", est.sharp, "Sharp reference image")->required();
    se->add_option("blurry", est.blurry, "Blurry image")->required();
    se->callback([&] { action = [&] { return run_estimate(est); }; });

    BuildLutArgs bl;
    auto* sl = app.add_subcommand("build-lut", "Blur-binned kernel lookup table from kernel maps");
    sl->add_option("--out", bl.out, "LUT JSON")->required();
    bl.common.bins.option = sl->add_option("--bins", bl.common.bins.value, "Number of blur bins (default 100)");
    add_common(sl, bl.common);
    sl->add_option("maps", bl.maps, "Kernel map JSON files")->required();
    sl->callback([&] { action = [&] { return run_build_lut(bl); }; });

    FuseArgs fu;
    auto* sf = app.add_subcommand("fuse-stack", "Register a focal stack and fuse its sharpest patches");
    sf->add_option("--out", fu.out, "Fused image")->required();
    sf->add_option("--ref-index", fu.ref_index, "Registration reference frame (default: middle)");
    sf->add_option("--emit-selection", fu.selection, "Write the winning frame per cell (x,y,index)");
    add_grid(sf, fu.common);
    add_common(sf, fu.common);
    sf->add_option("images", fu.images, "Stack members")->required();
    sf->callback([&] { action = [&] { return run_fuse(fu); }; });

    SynthArgs sy;
    auto* ss = app.add_subcommand("synth", "Synthetic depth-varying Gaussian blur");
    ss->add_option("--input", sy.input, "Sharp source image");
    ss->add_option("--texture", sy.texture, "Generate a random WxH texture instead of --input");
    ss->add_option("--smoothing", sy.smoothing, "Gaussian sigma of the generated texture")->capture_default_str();
    ss->add_option("--sharp-out", sy.sharp_out, "Also save the sharp source");
    ss->add_option("--profile", sy.profile, "ramp (left to right) or constant")
        ->check(CLI::IsMember({"ramp", "constant"}))
        ->capture_default_str();
    ss->add_option("--sigma", sy.sigma, "sigma of the constant profile")->capture_default_str();
    ss->add_option("--sigma-min", sy.sigma_min, "Ramp sigma at the left edge")->capture_default_str();
    ss->add_option("--sigma-max", sy.sigma_max, "Ramp sigma at the right edge")->capture_default_str();
    ss->add_option("--noise", sy.noise, "Gaussian noise sigma")->capture_default_str();
    sy.common.seed.option = ss->add_option("--seed", sy.common.seed.value, "Random seed (default 0)");
    ss->add_option("--bit-depth", sy.bit_depth, "Output bit depth")->check(CLI::IsMember({8, 16}))->capture_default_str();
    ss->add_option("--sidecar", sy.sidecar, "Per-patch true sigma CSV (x,y,sigma)");
    add_grid(ss, sy.common);
    add_common(ss, sy.common);
    ss->add_option("output", sy.out, "Degraded image")->required();
    ss->callback([&] { action = [&] { return run_synth(sy); }; });

    MetricsArgs me;
    auto* sm = app.add_subcommand("metrics", "MSE, PSNR and mean blur of two images");
    add_grid(sm, me.common);
    add_common(sm, me.common);
    sm->add_option("a", me.a, "First image")->required();
    sm->add_option("b", me.b, "Second image")->required();
    sm->callback([&] { action = [&] { return run_metrics(me); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        return action ? action() : 2;
    } catch (const UsageError& e) {
        std::cerr << "edof: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "edof: " << e.what() << '\n';
        return 1;
    }
}

} // namespace edof::cli
