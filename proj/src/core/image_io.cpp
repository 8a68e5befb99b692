#include "core/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <vector>

#include "core/errors.hpp"

namespace lrcset {

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---- PGM (binary P5) ----

// Skips whitespace and '#' comment lines, then parses a decimal token.
std::size_t pgm_token(const std::vector<std::uint8_t>& buf, std::size_t pos, long& value,
                      const std::string& path) {
  while (pos < buf.size()) {
    if (std::isspace(buf[pos])) {
      ++pos;
    } else if (buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  if (pos >= buf.size() || !std::isdigit(buf[pos]))
    throw IoError("malformed PGM header: " + path);
  value = 0;
  while (pos < buf.size() && std::isdigit(buf[pos])) {
    value = value * 10 + (buf[pos] - '0');
    ++pos;
  }
  return pos;
}

Raster load_pgm(const std::vector<std::uint8_t>& buf, const std::string& path) {
  long width = 0, height = 0, maxval = 0;
  std::size_t pos = 2;  // past "P5"
  pos = pgm_token(buf, pos, width, path);
  pos = pgm_token(buf, pos, height, path);
  pos = pgm_token(buf, pos, maxval, path);
  if (pos >= buf.size() || !std::isspace(buf[pos]))
    throw IoError("malformed PGM header: " + path);
  ++pos;  // single whitespace before the raster data

  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535)
    throw IoError("unsupported PGM geometry in " + path);

  const bool wide = maxval > 255;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (buf.size() - pos < count * (wide ? 2 : 1))
    throw IoError("truncated PGM data: " + path);

  Raster img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.channels = 1;
  img.data.resize(count);
  const double scale = 255.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned v = wide ? (static_cast<unsigned>(buf[pos + 2 * i]) << 8) | buf[pos + 2 * i + 1]
                            : buf[pos + i];
    img.data[i] = v * scale;
  }
  return img;
}

// ---- BMP (uncompressed, 8/24/32 bpp) ----

std::uint32_t le32(const std::vector<std::uint8_t>& b, std::size_t o) {
  return b[o] | (b[o + 1] << 8) | (b[o + 2] << 16) | (static_cast<std::uint32_t>(b[o + 3]) << 24);
}
std::uint16_t le16(const std::vector<std::uint8_t>& b, std::size_t o) {
  return static_cast<std::uint16_t>(b[o] | (b[o + 1] << 8));
}

Raster load_bmp(const std::vector<std::uint8_t>& buf, const std::string& path) {
  if (buf.size() < 54) throw IoError("truncated BMP header: " + path);
  const std::uint32_t data_offset = le32(buf, 10);
  const std::uint32_t header_size = le32(buf, 14);
  if (header_size < 40) throw IoError("unsupported BMP header in " + path);
  const std::int32_t width = static_cast<std::int32_t>(le32(buf, 18));
  const std::int32_t raw_height = static_cast<std::int32_t>(le32(buf, 22));
  const std::uint16_t bpp = le16(buf, 28);
  const std::uint32_t compression = le32(buf, 30);
  if (compression != 0)
    throw IoError("unsupported BMP compression " + std::to_string(compression) + " in " + path);
  if (bpp != 8 && bpp != 24 && bpp != 32)
    throw IoError("unsupported BMP bit depth " + std::to_string(bpp) + " in " + path);

  const bool bottom_up = raw_height > 0;
  const std::int32_t height = bottom_up ? raw_height : -raw_height;
  if (width < 1 || height < 1) throw IoError("unsupported BMP geometry in " + path);

  // 8-bit files carry a BGRA palette right after the info header.
  std::uint32_t palette_count = le32(buf, 46);
  if (bpp == 8 && palette_count == 0) palette_count = 256;
  const std::size_t palette_at = 14 + header_size;
  if (bpp == 8 && buf.size() < palette_at + palette_count * 4)
    throw IoError("truncated BMP palette: " + path);

  const std::size_t stride = ((static_cast<std::size_t>(width) * bpp + 31) / 32) * 4;
  if (buf.size() < data_offset + stride * static_cast<std::size_t>(height))
    throw IoError("truncated BMP data: " + path);

  Raster img;
  img.width = width;
  img.height = height;
  img.channels = 3;
  img.data.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::int32_t r = 0; r < height; ++r) {
    const std::int32_t src_row = bottom_up ? height - 1 - r : r;
    const std::size_t row_at = data_offset + stride * static_cast<std::size_t>(src_row);
    for (std::int32_t c = 0; c < width; ++c) {
      std::uint8_t red, green, blue;
      if (bpp == 8) {
        const std::uint8_t index = buf[row_at + static_cast<std::size_t>(c)];
        if (index >= palette_count) throw IoError("BMP palette index out of range in " + path);
        const std::size_t e = palette_at + static_cast<std::size_t>(index) * 4;
        blue = buf[e];
        green = buf[e + 1];
        red = buf[e + 2];
      } else {
        const std::size_t p = row_at + static_cast<std::size_t>(c) * (bpp / 8);
        blue = buf[p];
        green = buf[p + 1];
        red = buf[p + 2];
      }
      img.at(r, c, 0) = red;
      img.at(r, c, 1) = green;
      img.at(r, c, 2) = blue;
    }
  }
  return img;
}

// ---- PNG via libpng ----

Raster load_png(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw IoError("cannot open file: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw IoError("libpng initialization failed for " + path);
  }

  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw IoError("failed to decode PNG: " + path);
  }

  png_init_io(png, fp);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
    png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  pixels.resize(row_bytes * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = pixels.data() + r * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);

  if (channels != 1 && channels != 3)
    throw IoError("unsupported PNG channel count " + std::to_string(channels) + " in " + path);

  Raster img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.channels = channels;
  img.data.assign(pixels.begin(), pixels.begin() + static_cast<std::ptrdiff_t>(
                                                       static_cast<std::size_t>(width) * height *
                                                       static_cast<std::size_t>(channels)));
  return img;
}

bool has_magic(const std::vector<std::uint8_t>& buf) {
  if (buf.size() >= 8 && buf[0] == 0x89 && buf[1] == 'P' && buf[2] == 'N' && buf[3] == 'G')
    return true;
  if (buf.size() >= 2 && buf[0] == 'P' && buf[1] == '5') return true;
  if (buf.size() >= 2 && buf[0] == 'B' && buf[1] == 'M') return true;
  return false;
}

}  // namespace

Raster load_image(const std::string& path) {
  const auto buf = read_file(path);
  if (buf.size() >= 8 && buf[0] == 0x89 && buf[1] == 'P' && buf[2] == 'N' && buf[3] == 'G')
    return load_png(path);
  if (buf.size() >= 2 && buf[0] == 'P' && buf[1] == '5') return load_pgm(buf, path);
  if (buf.size() >= 2 && buf[0] == 'B' && buf[1] == 'M') return load_bmp(buf, path);
  throw IoError("unsupported image format: " + path);
}

void save_pgm(const Raster& img, const std::string& path) {
  if (img.channels != 1) throw InvalidInput("save_pgm: expected a single-channel raster");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<std::uint8_t> bytes(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i)
    bytes[i] = static_cast<std::uint8_t>(std::lround(std::clamp(img.data[i], 0.0, 255.0)));
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path);
}

bool sniff_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::vector<std::uint8_t> head(8, 0);
  in.read(reinterpret_cast<char*>(head.data()), 8);
  head.resize(static_cast<std::size_t>(std::max<std::streamsize>(in.gcount(), 0)));
  return has_magic(head);
}

}  // namespace lrcset
