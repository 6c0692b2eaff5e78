#include "arcade/image/frame.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace arcade {
namespace {

long floor_div(long a, long b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0)) ? 1 : 0); }

// round(delta * s / steps) in integers, so rendering is identical across platforms.
int lerp_step(int delta, int s, int steps) {
  if (steps == 0) return 0;
  return static_cast<int>(floor_div(2L * delta * s + steps, 2L * steps));
}

}  // namespace

Frame::Frame(int width, int height, std::vector<std::uint8_t> rgb, std::int64_t captured_at_ms)
    : width_(width), height_(height), captured_at_ms_(captured_at_ms) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("frame dimensions must be positive");
  if (rgb.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
    throw std::invalid_argument("frame buffer holds " + std::to_string(rgb.size()) +
                                " bytes, expected " + std::to_string(std::size_t(width) * height * 3));
  }
  pixels_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(rgb));
}

Frame Frame::filled(int width, int height, Rgb color, std::int64_t captured_at_ms) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("frame dimensions must be positive");
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < rgb.size(); i += 3) {
    rgb[i] = color.r;
    rgb[i + 1] = color.g;
    rgb[i + 2] = color.b;
  }
  return Frame(width, height, std::move(rgb), captured_at_ms);
}

Rgb Frame::at(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  const auto& p = *pixels_;
  return {p[i], p[i + 1], p[i + 2]};
}

Frame Frame::with_timestamp(std::int64_t captured_at_ms) const {
  Frame copy = *this;
  copy.captured_at_ms_ = captured_at_ms;
  return copy;
}

bool Frame::same_pixels(const Frame& other) const {
  return width_ == other.width_ && height_ == other.height_ &&
         (pixels_ == other.pixels_ || *pixels_ == *other.pixels_);
}

Canvas::Canvas(int width, int height, Rgb background) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("canvas dimensions must be positive");
  rgb_.resize(static_cast<std::size_t>(width) * height * 3);
  fill_rect(0, 0, width, height, background);
}

void Canvas::set(int x, int y, Rgb color) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  rgb_[i] = color.r;
  rgb_[i + 1] = color.g;
  rgb_[i + 2] = color.b;
}

Rgb Canvas::get(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {rgb_[i], rgb_[i + 1], rgb_[i + 2]};
}

void Canvas::fill_rect(int x0, int y0, int x1, int y1, Rgb color) {
  x0 = std::clamp(x0, 0, width_);
  x1 = std::clamp(x1, 0, width_);
  y0 = std::clamp(y0, 0, height_);
  y1 = std::clamp(y1, 0, height_);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) set(x, y, color);
  }
}

void Canvas::fill_circle(int cx, int cy, int radius, Rgb color) {
  const long r2 = static_cast<long>(radius) * radius;
  for (int y = cy - radius; y <= cy + radius; ++y) {
    for (int x = cx - radius; x <= cx + radius; ++x) {
      const long dx = x - cx;
      const long dy = y - cy;
      if (dx * dx + dy * dy <= r2) set(x, y, color);
    }
  }
}

void Canvas::draw_line(int x0, int y0, int x1, int y1, int thickness, Rgb color) {
  const int steps = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
  const int lo = -(thickness / 2);
  const int hi = lo + thickness;
  for (int s = 0; s <= steps; ++s) {
    const int x = x0 + lerp_step(x1 - x0, s, steps);
    const int y = y0 + lerp_step(y1 - y0, s, steps);
    fill_rect(x + lo, y + lo, x + hi, y + hi, color);
  }
}

Frame Canvas::to_frame(std::int64_t captured_at_ms) const {
  return Frame(width_, height_, rgb_, captured_at_ms);
}

}  // namespace arcade
