#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "core/errors.hpp"
#include "core/image_io.hpp"

using namespace lrcset;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lrcset_image_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

// 2x2 RGB PNG: (255,0,0) (0,255,0) / (0,0,255) (255,255,255)
const std::vector<std::uint8_t> kRgbPng = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44,
    0x52, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x02, 0x08, 0x02, 0x00, 0x00, 0x00, 0xfd,
    0xd4, 0x9a, 0x73, 0x00, 0x00, 0x00, 0x12, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0xf8,
    0xcf, 0xc0, 0xc0, 0x00, 0xc2, 0x0c, 0xff, 0x81, 0x00, 0x00, 0x1f, 0xee, 0x05, 0xfb, 0x0b,
    0xd9, 0x68, 0x8b, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};

// 2x1 grayscale PNG, values 7 then 200.
const std::vector<std::uint8_t> kGrayPng = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44,
    0x52, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x01, 0x08, 0x00, 0x00, 0x00, 0x00, 0xd1,
    0x49, 0x20, 0x56, 0x00, 0x00, 0x00, 0x0b, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60,
    0x3f, 0x01, 0x00, 0x00, 0xd9, 0x00, 0xd0, 0xd7, 0xa6, 0x22, 0x3c, 0x00, 0x00, 0x00, 0x00,
    0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};

// 2x2 24-bit BMP, bottom-up rows. Top row red/green, bottom row blue/white.
std::vector<std::uint8_t> rgb_bmp() {
  std::vector<std::uint8_t> b;
  auto u16 = [&](std::uint16_t v) {
    b.push_back(v & 0xff);
    b.push_back(v >> 8);
  };
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
  };
  b.push_back('B');
  b.push_back('M');
  u32(14 + 40 + 2 * 8);  // file size: headers + 2 rows of 8 bytes (6 data + 2 pad)
  u16(0);
  u16(0);
  u32(14 + 40);  // pixel data offset
  u32(40);       // info header size
  u32(2);        // width
  u32(2);        // height (positive: bottom-up)
  u16(1);        // planes
  u16(24);       // bpp
  u32(0);        // compression BI_RGB
  u32(2 * 8);    // image size
  u32(2835);
  u32(2835);
  u32(0);
  u32(0);
  // bottom row first: blue (BGR 255,0,0), white; then 2 pad bytes
  const std::uint8_t rows[2][8] = {{255, 0, 0, 255, 255, 255, 0, 0},
                                   {0, 0, 255, 0, 255, 0, 0, 0}};
  for (const auto& row : rows) b.insert(b.end(), row, row + 8);
  return b;
}

}  // namespace

TEST_CASE("PGM round-trips through save and load") {
  Raster img;
  img.width = 3;
  img.height = 2;
  img.channels = 1;
  img.data = {0, 127, 255, 10, 20, 30};
  const fs::path path = temp_file("roundtrip.pgm");
  save_pgm(img, path.string());
  const Raster back = load_image(path.string());
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.channels == 1);
  CHECK(back.data == img.data);
}

TEST_CASE("PGM loader handles comments and 16-bit data") {
  const fs::path path = temp_file("wide.pgm");
  std::ofstream out(path, std::ios::binary);
  out << "P5\n# a comment\n2 1\n65535\n";
  const std::uint8_t bytes[] = {0xff, 0xff, 0x00, 0x00};  // big-endian 65535, 0
  out.write(reinterpret_cast<const char*>(bytes), 4);
  out.close();
  const Raster img = load_image(path.string());
  CHECK(img.data[0] == doctest::Approx(255.0));
  CHECK(img.data[1] == doctest::Approx(0.0));
}

TEST_CASE("PNG loader decodes RGB and grayscale") {
  const fs::path rgb = temp_file("rgb.png");
  write_bytes(rgb, kRgbPng);
  const Raster img = load_image(rgb.string());
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.channels == 3);
  CHECK(img.at(0, 0, 0) == 255.0);
  CHECK(img.at(0, 1, 1) == 255.0);
  CHECK(img.at(1, 0, 2) == 255.0);
  CHECK(img.at(1, 1, 0) == 255.0);

  const fs::path gray = temp_file("gray.png");
  write_bytes(gray, kGrayPng);
  const Raster g = load_image(gray.string());
  CHECK(g.channels == 1);
  CHECK(g.at(0, 0) == 7.0);
  CHECK(g.at(0, 1) == 200.0);
}

TEST_CASE("BMP loader decodes 24-bit bottom-up files") {
  const fs::path path = temp_file("rgb.bmp");
  write_bytes(path, rgb_bmp());
  const Raster img = load_image(path.string());
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.channels == 3);
  CHECK(img.at(0, 0, 0) == 255.0);  // red top-left
  CHECK(img.at(0, 1, 1) == 255.0);  // green top-right
  CHECK(img.at(1, 0, 2) == 255.0);  // blue bottom-left
  CHECK(img.at(1, 1, 0) == 255.0);  // white bottom-right
}

TEST_CASE("load_image rejects unknown formats") {
  const fs::path path = temp_file("not_an_image.txt");
  write_bytes(path, {'h', 'e', 'l', 'l', 'o'});
  CHECK_THROWS_AS(load_image(path.string()), IoError);
  CHECK_FALSE(sniff_image(path.string()));
  CHECK_THROWS_AS(load_image("/nonexistent/file.png"), IoError);
}

TEST_CASE("sniff_image recognizes the supported magics") {
  const fs::path png = temp_file("sniff.png");
  write_bytes(png, kRgbPng);
  CHECK(sniff_image(png.string()));

  const fs::path bmp = temp_file("sniff.bmp");
  write_bytes(bmp, rgb_bmp());
  CHECK(sniff_image(bmp.string()));

  Raster img;
  img.width = 1;
  img.height = 1;
  img.channels = 1;
  img.data = {5};
  const fs::path pgm = temp_file("sniff.pgm");
  save_pgm(img, pgm.string());
  CHECK(sniff_image(pgm.string()));
}

TEST_CASE("truncated PNG fails with an IO error") {
  std::vector<std::uint8_t> cut(kRgbPng.begin(), kRgbPng.begin() + 40);
  const fs::path path = temp_file("broken.png");
  write_bytes(path, cut);
  CHECK_THROWS_AS(load_image(path.string()), IoError);
}
