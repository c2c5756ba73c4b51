#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

namespace edof {

/// Run settings shared by the CLI subcommands. Defaults follow the library.
struct Config {
    std::size_t patch_size = 64;
    std::size_t stride = 32;
    double lambda_w = 0.1;
    double lambda_k = 1e-3;
    double sigma_scale = 50.0;
    std::size_t kernel_size = 15;
    std::size_t lut_bins = 100;
    double max_blur = 1.0;
    std::uint64_t seed = 0;
    unsigned threads = 0; // 0 = all cores

    // Throws ConfigError naming the first invalid field.
    void validate() const;
};

/// Applies `key = value` lines onto `cfg`. Blank lines and `#` comments are
/// ignored; values may be quoted. Unknown keys and unparsable values throw
/// ConfigError with the line number.
void apply_config_text(Config& cfg, const std::string& text);
Config load_config(const std::filesystem::path& path);

} // namespace edof
