#include "edof/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "edof/errors.hpp"

namespace edof {
namespace {

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        s = s.substr(1, s.size() - 2);
    return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, std::size_t line)
{
    T out{};
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError("line " + std::to_string(line) + ": bad value for " + key + ": '" + value + "'");
    return out;
}

} // namespace

void Config::validate() const
{
    if (patch_size < 3) throw ConfigError("patch_size must be at least 3");
    if (stride < 1 || stride > patch_size) throw ConfigError("stride must lie in [1, patch_size]");
    if (!(lambda_w >= 0.0) || !std::isfinite(lambda_w)) throw ConfigError("lambda_w must be >= 0");
    if (!(lambda_k > 0.0) || !std::isfinite(lambda_k)) throw ConfigError("lambda_k must be > 0");
    if (!(sigma_scale >= 0.0) || !std::isfinite(sigma_scale)) throw ConfigError("sigma_scale must be >= 0");
    if (kernel_size % 2 == 0 || kernel_size > 127 || kernel_size > patch_size)
        throw ConfigError("kernel_size must be odd, at most 127 and at most patch_size");
    if (lut_bins < 1) throw ConfigError("lut_bins must be positive");
    if (!(max_blur >= 0.0)) throw ConfigError("max_blur must be >= 0");
}

void apply_config_text(Config& cfg, const std::string& text)
{
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        if (trim(raw).empty()) continue;
        const auto eq = raw.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(raw.substr(0, eq));
        const std::string value = trim(raw.substr(eq + 1));

        if (key == "patch_size") cfg.patch_size = parse_number<std::size_t>(key, value, line);
        else if (key == "stride") cfg.stride = parse_number<std::size_t>(key, value, line);
        else if (key == "lambda_w") cfg.lambda_w = parse_number<double>(key, value, line);
        else if (key == "lambda_k") cfg.lambda_k = parse_number<double>(key, value, line);
        else if (key == "sigma_scale") cfg.sigma_scale = parse_number<double>(key, value, line);
        else if (key == "kernel_size") cfg.kernel_size = parse_number<std::size_t>(key, value, line);
        else if (key == "lut_bins") cfg.lut_bins = parse_number<std::size_t>(key, value, line);
        else if (key == "max_blur") cfg.max_blur = parse_number<double>(key, value, line);
        else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value, line);
        else if (key == "threads") cfg.threads = parse_number<unsigned>(key, value, line);
        else throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
}

Config load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    Config cfg;
    apply_config_text(cfg, ss.str());
    return cfg;
}

} // namespace edof
