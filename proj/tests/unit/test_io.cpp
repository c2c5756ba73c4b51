#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <png.h>

#include "edof/errors.hpp"
#include "edof/io.hpp"
#include "helpers.hpp"

using namespace edof;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("edof_io_" + std::to_string(::getpid()))) { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
};

void check_quantized(const Image& a, const Image& b, double scale)
{
    REQUIRE(a.same_shape(b));
    for (std::size_t i = 0; i < a.data().size(); ++i)
        CHECK(b.data()[i] == doctest::Approx(std::round(a.data()[i] * scale) / scale).epsilon(1e-12));
}

} // namespace

TEST_CASE("PNG and TIFF round trips")
{
    TempDir dir;
    for (const char* ext : {".png", ".tif", ".tiff"})
        for (std::size_t channels : {1u, 3u})
            for (int depth : {8, 16}) {
                CAPTURE(ext);
                CAPTURE(channels);
                CAPTURE(depth);
                const Image img = testutil::random_image(37, 23, channels * depth, channels);
                const fs::path p = dir.path / (std::string("img") + ext);
                save_image(p, img, depth);
                const LoadedImage back = load_image(p);
                CHECK(back.bit_depth == depth);
                check_quantized(img, back.image, depth == 16 ? 65535.0 : 255.0);
            }
}

TEST_CASE("saving clamps to the unit range")
{
    TempDir dir;
    Image img(2, 1, 1, std::vector<double>{-0.5, 1.5});
    save_image(dir.path / "c.png", img, 8);
    const Image back = load_image(dir.path / "c.png").image;
    CHECK(back.data()[0] == 0.0);
    CHECK(back.data()[1] == 1.0);
}

TEST_CASE("alpha is dropped on load")
{
    TempDir dir;
    const fs::path p = dir.path / "rgba.png";
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = 2;
    image.height = 1;
    image.format = PNG_FORMAT_RGBA;
    const unsigned char px[8] = {255, 0, 0, 10, 0, 51, 255, 200};
    REQUIRE(png_image_write_to_file(&image, p.c_str(), 0, px, 0, nullptr));
    const LoadedImage back = load_image(p);
    CHECK(back.image.channels() == 3);
    CHECK(back.image.at(0, 0, 0) == 1.0);
    CHECK(back.image.at(1, 0, 1) == doctest::Approx(0.2));
    CHECK(back.image.at(1, 0, 2) == 1.0);
}

TEST_CASE("I/O errors")
{
    TempDir dir;
    CHECK_THROWS_AS(load_image(dir.path / "missing.png"), IoError);
    CHECK_THROWS_AS(save_image(dir.path / "x.bmp", Image(2, 2), 8), IoError);
    CHECK_THROWS_AS(save_image(dir.path / "x.png", Image(2, 2), 12), IoError);
    CHECK_THROWS_AS(save_image(dir.path / "no" / "dir" / "x.png", Image(2, 2), 8), IoError);
    {
        std::ofstream junk(dir.path / "junk.png");
        junk << "not a png";
    }
    CHECK_THROWS_AS(load_image(dir.path / "junk.png"), IoError);
    CHECK(!fs::exists(dir.path / "x.bmp"));
}
