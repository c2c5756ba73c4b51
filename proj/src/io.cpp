#include "edof/io.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "edof/errors.hpp"

namespace edof {
namespace {

enum class Format { png, tiff };

Format format_for(const std::filesystem::path& path)
{
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".png") return Format::png;
    if (ext == ".tif" || ext == ".tiff") return Format::tiff;
    throw IoError("unsupported image extension '" + ext + "' (expected .png, .tif or .tiff)");
}

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Raw interleaved samples as read from disk, before normalization.
struct RawPixels {
    std::size_t width = 0, height = 0, channels = 0;
    int depth = 8;
    std::vector<std::uint16_t> samples;
};

Image normalize(const RawPixels& raw)
{
    const double scale = raw.depth == 16 ? 65535.0 : 255.0;
    std::vector<double> data(raw.width * raw.height * raw.channels);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = raw.samples[i] / scale;
    return Image(raw.width, raw.height, raw.channels, std::move(data));
}

std::vector<std::uint16_t> quantize(const Image& img, int depth)
{
    const double scale = depth == 16 ? 65535.0 : 255.0;
    std::vector<std::uint16_t> out(img.data().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = std::isfinite(img.data()[i]) ? std::clamp(img.data()[i], 0.0, 1.0) : 0.0;
        out[i] = static_cast<std::uint16_t>(std::lround(v * scale));
    }
    return out;
}

// ---- PNG -------------------------------------------------------------------

bool read_png_raw(std::FILE* fp, RawPixels& raw, std::vector<png_byte>& buffer, std::string& err)
{
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) {
        err = "libpng initialization failed";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        err = "malformed PNG";
        return false;
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_strip_alpha(png);
    if (depth == 16) png_set_swap(png); // host little-endian 16-bit samples
    png_read_update_info(png, info);

    raw.width = png_get_image_width(png, info);
    raw.height = png_get_image_height(png, info);
    raw.channels = png_get_channels(png, info);
    depth = png_get_bit_depth(png, info);
    raw.depth = depth == 16 ? 16 : 8;

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * raw.height);
    std::vector<png_bytep> rows(raw.height);
    for (std::size_t y = 0; y < raw.height; ++y) rows[y] = buffer.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

RawPixels read_png(const std::filesystem::path& path)
{
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path.string());
    png_byte sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw IoError(path.string() + " is not a PNG file");
    std::rewind(fp.get());

    RawPixels raw;
    std::vector<png_byte> buffer;
    std::string err;
    if (!read_png_raw(fp.get(), raw, buffer, err)) throw IoError(path.string() + ": " + err);
    if (raw.channels != 1 && raw.channels != 3)
        throw IoError(path.string() + ": unsupported channel count");

    raw.samples.resize(raw.width * raw.height * raw.channels);
    if (raw.depth == 16) {
        for (std::size_t i = 0; i < raw.samples.size(); ++i)
            raw.samples[i] = static_cast<std::uint16_t>(buffer[2 * i] | (buffer[2 * i + 1] << 8));
    } else {
        std::copy(buffer.begin(), buffer.begin() + static_cast<long>(raw.samples.size()),
                  raw.samples.begin());
    }
    return raw;
}

bool write_png_raw(std::FILE* fp, const RawPixels& raw, std::vector<png_byte>& buffer)
{
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(raw.width),
                 static_cast<png_uint_32>(raw.height), raw.depth,
                 raw.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t rowbytes = raw.width * raw.channels * (raw.depth == 16 ? 2 : 1);
    for (std::size_t y = 0; y < raw.height; ++y) png_write_row(png, buffer.data() + y * rowbytes);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

void write_png(const std::filesystem::path& path, const RawPixels& raw)
{
    std::vector<png_byte> buffer;
    if (raw.depth == 16) {
        buffer.resize(raw.samples.size() * 2);
        for (std::size_t i = 0; i < raw.samples.size(); ++i) {
            buffer[2 * i] = static_cast<png_byte>(raw.samples[i] >> 8); // PNG is big-endian
            buffer[2 * i + 1] = static_cast<png_byte>(raw.samples[i] & 0xff);
        }
    } else {
        buffer.assign(raw.samples.begin(), raw.samples.end());
    }
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot create " + path.string());
    if (!write_png_raw(fp.get(), raw, buffer)) throw IoError("failed to encode " + path.string());
    if (std::fflush(fp.get()) != 0) throw IoError("failed to write " + path.string());
}

// ---- TIFF ------------------------------------------------------------------

struct TiffCloser {
    void operator()(TIFF* t) const noexcept { TIFFClose(t); }
};

RawPixels read_tiff(const std::filesystem::path& path)
{
    TIFFSetWarningHandler(nullptr);
    TIFFSetErrorHandler(nullptr);
    std::unique_ptr<TIFF, TiffCloser> tif(TIFFOpen(path.c_str(), "r"));
    if (!tif) throw IoError("cannot open TIFF " + path.string());

    std::uint32_t w = 0, h = 0;
    std::uint16_t spp = 1, bps = 8, planar = PLANARCONFIG_CONTIG, fmt = SAMPLEFORMAT_UINT;
    TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &w);
    TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &h);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bps);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &fmt);
    if (bps != 8 && bps != 16) throw IoError(path.string() + ": only 8/16-bit TIFF is supported");
    if (fmt != SAMPLEFORMAT_UINT) throw IoError(path.string() + ": unsigned samples required");
    if (planar != PLANARCONFIG_CONTIG) throw IoError(path.string() + ": planar TIFF unsupported");
    if (spp < 1 || spp > 4) throw IoError(path.string() + ": unsupported channel count");

    RawPixels raw;
    raw.width = w;
    raw.height = h;
    raw.depth = bps;
    raw.channels = spp >= 3 ? 3 : 1; // drops alpha (spp 2 or 4)
    raw.samples.resize(raw.width * raw.height * raw.channels);

    std::vector<std::uint8_t> line(static_cast<std::size_t>(TIFFScanlineSize(tif.get())));
    for (std::uint32_t y = 0; y < h; ++y) {
        if (TIFFReadScanline(tif.get(), line.data(), y, 0) < 0)
            throw IoError(path.string() + ": failed to read scanline");
        for (std::uint32_t x = 0; x < w; ++x)
            for (std::size_t c = 0; c < raw.channels; ++c) {
                const std::size_t s = static_cast<std::size_t>(x) * spp + c;
                std::uint16_t v;
                if (bps == 16) {
                    std::memcpy(&v, line.data() + 2 * s, 2);
                } else {
                    v = line[s];
                }
                raw.samples[(static_cast<std::size_t>(y) * w + x) * raw.channels + c] = v;
            }
    }
    return raw;
}

void write_tiff(const std::filesystem::path& path, const RawPixels& raw)
{
    TIFFSetWarningHandler(nullptr);
    TIFFSetErrorHandler(nullptr);
    std::unique_ptr<TIFF, TiffCloser> tif(TIFFOpen(path.c_str(), "w"));
    if (!tif) throw IoError("cannot create " + path.string());
    TIFFSetField(tif.get(), TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(raw.width));
    TIFFSetField(tif.get(), TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(raw.height));
    TIFFSetField(tif.get(), TIFFTAG_SAMPLESPERPIXEL, static_cast<std::uint16_t>(raw.channels));
    TIFFSetField(tif.get(), TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(raw.depth));
    TIFFSetField(tif.get(), TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_UINT);
    TIFFSetField(tif.get(), TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
    TIFFSetField(tif.get(), TIFFTAG_PHOTOMETRIC,
                 raw.channels == 3 ? PHOTOMETRIC_RGB : PHOTOMETRIC_MINISBLACK);
    TIFFSetField(tif.get(), TIFFTAG_COMPRESSION, COMPRESSION_NONE);
    TIFFSetField(tif.get(), TIFFTAG_ROWSPERSTRIP, static_cast<std::uint32_t>(1));

    const std::size_t per_row = raw.width * raw.channels;
    std::vector<std::uint8_t> line(per_row * (raw.depth == 16 ? 2 : 1));
    for (std::size_t y = 0; y < raw.height; ++y) {
        for (std::size_t i = 0; i < per_row; ++i) {
            const std::uint16_t v = raw.samples[y * per_row + i];
            if (raw.depth == 16)
                std::memcpy(line.data() + 2 * i, &v, 2);
            else
                line[i] = static_cast<std::uint8_t>(v);
        }
        if (TIFFWriteScanline(tif.get(), line.data(), static_cast<std::uint32_t>(y), 0) < 0)
            throw IoError("failed to write " + path.string());
    }
}

} // namespace

LoadedImage load_image(const std::filesystem::path& path)
{
    const Format fmt = format_for(path);
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
    RawPixels raw = fmt == Format::png ? read_png(path) : read_tiff(path);
    if (raw.width == 0 || raw.height == 0) throw IoError(path.string() + " is empty");
    return {normalize(raw), raw.depth};
}

void save_image(const std::filesystem::path& path, const Image& img, int bit_depth)
{
    if (bit_depth != 8 && bit_depth != 16) throw IoError("bit depth must be 8 or 16");
    if (img.empty()) throw IoError("refusing to write an empty image");
    const Format fmt = format_for(path);
    RawPixels raw;
    raw.width = img.width();
    raw.height = img.height();
    raw.channels = img.channels();
    raw.depth = bit_depth;
    raw.samples = quantize(img, bit_depth);
    if (fmt == Format::png)
        write_png(path, raw);
    else
        write_tiff(path, raw);
}

} // namespace edof
