#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "arcade/image/image_io.hpp"

using namespace arcade;
using namespace arcade::image;

namespace {

Frame noise(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
  for (auto& v : rgb) v = static_cast<std::uint8_t>(rng());
  return Frame(w, h, std::move(rgb));
}

std::vector<std::uint8_t> bytes(std::string_view s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(Frame, RejectsBadShapes) {
  EXPECT_THROW(Frame(0, 4, {}), std::invalid_argument);
  EXPECT_THROW(Frame(2, 2, std::vector<std::uint8_t>(11)), std::invalid_argument);
  Frame f(2, 1, {1, 2, 3, 4, 5, 6}, 77);
  EXPECT_EQ(f.at(1, 0), (Rgb{4, 5, 6}));
  EXPECT_EQ(f.captured_at_ms(), 77);
  EXPECT_TRUE(f.same_pixels(f.with_timestamp(3)));
  EXPECT_NE(f, f.with_timestamp(3));
}

TEST(Canvas, PrimitivesClipAndCover) {
  Canvas c(20, 10, {255, 255, 255});
  c.fill_rect(-5, -5, 3, 2, {1, 1, 1});
  EXPECT_EQ(c.get(2, 1), (Rgb{1, 1, 1}));
  EXPECT_EQ(c.get(3, 1), (Rgb{255, 255, 255}));
  c.fill_circle(10, 5, 2, {0, 255, 0});
  EXPECT_EQ(c.get(12, 5), (Rgb{0, 255, 0}));
  EXPECT_EQ(c.get(12, 7), (Rgb{255, 255, 255}));  // 2^2 + 2^2 > 2^2
  c.draw_line(0, 9, 19, 9, 1, {0, 0, 0});
  for (int x = 0; x < 20; ++x) EXPECT_EQ(c.get(x, 9), (Rgb{0, 0, 0}));
  EXPECT_EQ(c.to_frame(5).captured_at_ms(), 5);
}

TEST(Png, LosslessRoundTrip) {
  auto f = noise(37, 23, 1);
  auto back = decode_png(encode_png(f));
  EXPECT_TRUE(back.same_pixels(f));
  EXPECT_EQ(back.width(), 37);
}

TEST(Png, GarbageThrows) {
  EXPECT_THROW(decode_png(bytes("not a png at all")), ImageError);
  auto png = encode_png(noise(8, 8, 2));
  png.resize(png.size() / 2);
  EXPECT_THROW(decode_png(png), ImageError);
}

TEST(Ppm, AsciiAndBinary) {
  auto f = decode_ppm(bytes("P3\n# comment\n2 1\n255\n1 2 3  4 5 6\n"));
  EXPECT_EQ(f.at(0, 0), (Rgb{1, 2, 3}));
  EXPECT_EQ(f.at(1, 0), (Rgb{4, 5, 6}));
  auto g = noise(5, 4, 3);
  EXPECT_TRUE(decode_ppm(encode_ppm(g)).same_pixels(g));
  EXPECT_THROW(decode_ppm(bytes("P3\n2 1\n65535\n1 2 3 4 5 6\n")), ImageError);
  EXPECT_THROW(decode_ppm(bytes("P3\n2 1\n255\n1 2 3\n")), ImageError);
}

TEST(ImageFiles, LoadDetectsFormat) {
  auto dir = std::filesystem::temp_directory_path() / "arcade_image_test";
  std::filesystem::create_directories(dir);
  auto f = noise(12, 9, 4);
  save_png(f, dir / "a.png");
  EXPECT_TRUE(load_image(dir / "a.png").same_pixels(f));
  EXPECT_THROW(load_image(dir / "missing.png"), ImageError);
  std::filesystem::remove_all(dir);
}

TEST(Base64, KnownVectors) {
  EXPECT_EQ(base64_encode(bytes("")), "");
  EXPECT_EQ(base64_encode(bytes("f")), "Zg==");
  EXPECT_EQ(base64_encode(bytes("fo")), "Zm8=");
  EXPECT_EQ(base64_encode(bytes("foobar")), "Zm9vYmFy");
  EXPECT_EQ(base64_decode("Zg=="), bytes("f"));
  EXPECT_EQ(base64_decode("Zm8="), bytes("fo"));
  EXPECT_EQ(base64_decode("Zm9vYmFy"), bytes("foobar"));
  EXPECT_THROW(base64_decode("Zm9"), ImageError);
  EXPECT_THROW(base64_decode("Z!=="), ImageError);
  std::mt19937 rng(9);
  for (int n = 0; n < 40; ++n) {
    std::vector<std::uint8_t> v(static_cast<std::size_t>(n));
    for (auto& b : v) b = static_cast<std::uint8_t>(rng());
    EXPECT_EQ(base64_decode(base64_encode(v)), v);
  }
}
