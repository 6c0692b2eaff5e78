#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace arcade {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Immutable RGB raster of the game screen. Copies share the pixel buffer, so a Frame can be
/// handed to other threads freely.
class Frame {
 public:
  /// Throws std::invalid_argument unless width, height > 0 and rgb.size() == width*height*3.
  Frame(int width, int height, std::vector<std::uint8_t> rgb, std::int64_t captured_at_ms = 0);

  static Frame filled(int width, int height, Rgb color, std::int64_t captured_at_ms = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::int64_t captured_at_ms() const noexcept { return captured_at_ms_; }
  std::span<const std::uint8_t> pixels() const noexcept { return *pixels_; }

  Rgb at(int x, int y) const;

  Frame with_timestamp(std::int64_t captured_at_ms) const;

  bool same_pixels(const Frame& other) const;
  bool operator==(const Frame& other) const {
    return captured_at_ms_ == other.captured_at_ms_ && same_pixels(other);
  }

 private:
  int width_;
  int height_;
  std::int64_t captured_at_ms_;
  std::shared_ptr<const std::vector<std::uint8_t>> pixels_;
};

/// Mutable drawing surface used by the built-in games to produce frames.
class Canvas {
 public:
  Canvas(int width, int height, Rgb background = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  void set(int x, int y, Rgb color);
  Rgb get(int x, int y) const;

  /// Half-open rectangle [x0, x1) x [y0, y1), clipped to the canvas.
  void fill_rect(int x0, int y0, int x1, int y1, Rgb color);
  /// Every pixel whose centre lies within `radius` of (cx, cy).
  void fill_circle(int cx, int cy, int radius, Rgb color);
  /// Segment drawn with a square brush of side `thickness`.
  void draw_line(int x0, int y0, int x1, int y1, int thickness, Rgb color);

  Frame to_frame(std::int64_t captured_at_ms = 0) const;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> rgb_;
};

}  // namespace arcade
