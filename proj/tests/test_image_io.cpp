#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "png_fixtures.hpp"
#include "salobj/error.hpp"
#include "salobj/image_io.hpp"
#include "test_support.hpp"

using namespace salobj;

namespace {

RgbImage load_bytes(const test::TempDir& dir, const std::string& name, std::span<const std::uint8_t> bytes) {
  const auto path = dir / name;
  test::write_file(path, bytes);
  return load_image(path);
}

} // namespace

TEST_CASE("ppm decode") {
  test::TempDir dir("ppm");
  std::string bytes = "P6\n# comment line\n2 2\n255\n";
  for (int i = 0; i < 4; ++i) bytes += std::string("\xff\x00\x00", 3);
  test::write_text(dir / "red.ppm", bytes);
  const RgbImage img = load_image(dir / "red.ppm");
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) CHECK(img.rgb(x, y) == std::array<std::uint8_t, 3>{255, 0, 0});
  }
}

TEST_CASE("ppm round trip") {
  test::TempDir dir("ppm_rt");
  Rng rng(1);
  RgbImage img(7, 5);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.below(256));
  save_ppm(img, dir / "a.ppm");
  CHECK(load_image(dir / "a.ppm") == img);
}

TEST_CASE("malformed files") {
  test::TempDir dir("bad");
  test::write_text(dir / "empty.ppm", "");
  CHECK_THROWS_AS(load_image(dir / "empty.ppm"), FormatError);
  test::write_text(dir / "short.ppm", "P6\n4 4\n255\nabc");
  CHECK_THROWS_AS(load_image(dir / "short.ppm"), Error);
  test::write_text(dir / "p3.ppm", "P3\n1 1\n255\n1 2 3\n");
  CHECK_THROWS_AS(load_image(dir / "p3.ppm"), FormatError);
  CHECK_THROWS_AS(load_image(dir / "missing.ppm"), IoError);
}

TEST_CASE("png decode") {
  test::TempDir dir("png");
  SUBCASE("8-bit rgb") {
    const auto img = load_bytes(dir, "rgb.png", test::kRgb1x1);
    CHECK(img.width == 1);
    CHECK(img.height == 1);
    CHECK(img.data == std::vector<std::uint8_t>{10, 20, 30});
  }
  SUBCASE("16-bit rgb keeps the high byte") {
    const auto img = load_bytes(dir, "rgb16.png", test::kRgb16_2x1);
    CHECK(img.data == std::vector<std::uint8_t>{3, 156, 255, 1, 2, 255});
  }
  SUBCASE("gray is replicated") {
    const auto img = load_bytes(dir, "gray.png", test::kGray2x2);
    CHECK(img.rgb(0, 0) == std::array<std::uint8_t, 3>{0, 0, 0});
    CHECK(img.rgb(1, 0) == std::array<std::uint8_t, 3>{64, 64, 64});
    CHECK(img.rgb(0, 1) == std::array<std::uint8_t, 3>{128, 128, 128});
    CHECK(img.rgb(1, 1) == std::array<std::uint8_t, 3>{255, 255, 255});
  }
  SUBCASE("alpha is dropped") {
    const auto img = load_bytes(dir, "rgba.png", test::kRgba1x1);
    CHECK(img.data == std::vector<std::uint8_t>{200, 100, 50});
  }
  SUBCASE("palette is rejected") {
    CHECK_THROWS_AS(load_bytes(dir, "pal.png", test::kPalette1x1), FormatError);
  }
  SUBCASE("truncated stream") {
    std::vector<std::uint8_t> cut(test::kRgb1x1.begin(), test::kRgb1x1.begin() + 40);
    CHECK_THROWS_AS(load_bytes(dir, "cut.png", cut), FormatError);
  }
}

TEST_CASE("pgm masks and maps") {
  test::TempDir dir("pgm");
  test::write_text(dir / "m.pgm", std::string("P5\n4 1\n255\n") + std::string("\x00\x7f\x80\xff", 4));
  const auto mask = load_mask(dir / "m.pgm");
  CHECK(mask.data == std::vector<std::uint8_t>{0, 0, 1, 1});
  const auto map = load_map(dir / "m.pgm");
  CHECK(map.data[1] == doctest::Approx(127.0 / 255.0));

  GrayMap g(3, 1);
  g.data = {0.0, 0.5, 1.2};
  save_map(g, dir / "g.pgm");
  const auto back = load_map(dir / "g.pgm");
  CHECK(back.data[0] == 0.0);
  CHECK(back.data[1] == doctest::Approx(128.0 / 255.0));
  CHECK(back.data[2] == 1.0);

  const auto rect = test::rect_mask(9, 6, 2, 1, 3, 4);
  save_mask(rect, dir / "r.pgm");
  CHECK(load_mask(dir / "r.pgm") == rect);
}
