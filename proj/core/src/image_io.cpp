#include "salobj/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "salobj/error.hpp"

namespace salobj {

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::string& header, const std::uint8_t* data,
                 std::size_t n) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) throw IoError("write failed for " + path.string());
}

// Netpbm header reader: magic, then width, height, maxval separated by
// whitespace with optional '#' comments, then exactly one whitespace byte.
struct PnmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t data_offset = 0;
};

PnmHeader parse_pnm(const std::vector<std::uint8_t>& bytes, char kind, const std::filesystem::path& path) {
  const auto fail = [&](const std::string& why) { return FormatError(path.string() + ": " + why); };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != static_cast<std::uint8_t>(kind)) {
    throw fail(std::string("malformed header, expected P") + kind);
  }
  std::size_t pos = 2;
  const auto read_int = [&]() {
    for (;;) {
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw fail("malformed header");
    long value = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos++] - '0');
      if (value > (1 << 24)) throw fail("header value out of range");
    }
    return static_cast<int>(value);
  };
  PnmHeader h;
  h.width = read_int();
  h.height = read_int();
  h.maxval = read_int();
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw fail("malformed header");
  h.data_offset = pos + 1;
  if (h.width < 1 || h.height < 1) throw fail("non-positive dimensions");
  if (h.maxval < 1 || h.maxval > 65535) throw fail("maxval out of range");
  return h;
}

RgbImage decode_ppm(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  const PnmHeader h = parse_pnm(bytes, '6', path);
  const int bps = h.maxval > 255 ? 2 : 1;
  const std::size_t need = static_cast<std::size_t>(h.width) * h.height * 3 * bps;
  if (bytes.size() - h.data_offset < need) throw FormatError(path.string() + ": truncated pixel data");
  RgbImage img(h.width, h.height);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const std::size_t at = h.data_offset + i * bps;
    const unsigned v = bps == 2 ? (bytes[at] << 8) | bytes[at + 1] : bytes[at];
    img.data[i] = static_cast<std::uint8_t>(h.maxval == 255 ? v : (v * 255 + h.maxval / 2) / h.maxval);
  }
  return img;
}

struct PngMemoryReader {
  const std::vector<std::uint8_t>* bytes;
  std::size_t pos;
};

void png_read_callback(png_structp png, png_bytep out, png_size_t n) {
  auto* reader = static_cast<PngMemoryReader*>(png_get_io_ptr(png));
  if (reader->pos + n > reader->bytes->size()) png_error(png, "unexpected end of PNG data");
  std::copy_n(reader->bytes->data() + reader->pos, n, out);
  reader->pos += n;
}

void png_error_callback(png_structp png, png_const_charp msg) {
  auto* message = static_cast<std::string*>(png_get_error_ptr(png));
  *message = msg;
  png_longjmp(png, 1);
}

void png_warning_callback(png_structp, png_const_charp) {}

RgbImage decode_png(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_error_callback, png_warning_callback);
  if (!png) throw Error("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("libpng initialization failed");
  }
  PngMemoryReader reader{&bytes, 0};
  RgbImage img;
  volatile bool unsupported = false;
  std::vector<png_bytep> rows;
  // No C++ objects with non-trivial destructors may be created between
  // setjmp and a potential longjmp.
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": " + message);
  }
  png_set_read_fn(png, &reader, png_read_callback);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) {
    unsupported = true;
  } else {
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    img = RgbImage(static_cast<int>(png_get_image_width(png, info)), static_cast<int>(png_get_image_height(png, info)));
    rows.resize(static_cast<std::size_t>(img.height));
    for (int y = 0; y < img.height; ++y) rows[static_cast<std::size_t>(y)] = img.data.data() + static_cast<std::size_t>(y) * img.width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (unsupported) throw FormatError(path.string() + ": unsupported PNG color type (palette)");
  return img;
}

struct GrayRaster {
  int width;
  int height;
  int maxval;
  std::vector<unsigned> samples;
};

GrayRaster read_pgm(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  const PnmHeader h = parse_pnm(bytes, '5', path);
  const int bps = h.maxval > 255 ? 2 : 1;
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  if (bytes.size() - h.data_offset < n * bps) throw FormatError(path.string() + ": truncated pixel data");
  GrayRaster r{h.width, h.height, h.maxval, std::vector<unsigned>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t at = h.data_offset + i * bps;
    r.samples[i] = bps == 2 ? (bytes[at] << 8) | bytes[at + 1] : bytes[at];
  }
  return r;
}

} // namespace

RgbImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  static constexpr std::array<std::uint8_t, 8> png_magic{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= png_magic.size() && std::equal(png_magic.begin(), png_magic.end(), bytes.begin())) {
    return decode_png(bytes, path);
  }
  return decode_ppm(bytes, path);
}

void save_ppm(const RgbImage& img, const std::filesystem::path& path) {
  const std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  write_bytes(path, header, img.data.data(), img.data.size());
}

BinaryMask load_mask(const std::filesystem::path& path) {
  const GrayRaster r = read_pgm(path);
  BinaryMask mask(r.width, r.height);
  // 0..255 masks: any value >= 128 is foreground.
  const unsigned cut = (static_cast<unsigned>(r.maxval) + 1) / 2;
  for (std::size_t i = 0; i < r.samples.size(); ++i) mask.data[i] = r.samples[i] >= cut ? 1 : 0;
  return mask;
}

GrayMap load_map(const std::filesystem::path& path) {
  const GrayRaster r = read_pgm(path);
  GrayMap map(r.width, r.height);
  for (std::size_t i = 0; i < r.samples.size(); ++i) map.data[i] = static_cast<double>(r.samples[i]) / r.maxval;
  return map;
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> px(mask.size());
  std::transform(mask.data.begin(), mask.data.end(), px.begin(), [](std::uint8_t v) { return v ? 255 : 0; });
  const std::string header = "P5\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) + "\n255\n";
  write_bytes(path, header, px.data(), px.size());
}

void save_map(const GrayMap& map, const std::filesystem::path& path) {
  std::vector<std::uint8_t> px(map.size());
  std::transform(map.data.begin(), map.data.end(), px.begin(), [](double v) {
    return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
  });
  const std::string header = "P5\n" + std::to_string(map.width) + " " + std::to_string(map.height) + "\n255\n";
  write_bytes(path, header, px.data(), px.size());
}

} // namespace salobj
