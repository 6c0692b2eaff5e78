#include "arcade/phash/phash.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <numeric>

namespace arcade::phash {

std::uint8_t luma(Rgb px) {
  const std::uint32_t weighted = 299u * px.r + 587u * px.g + 114u * px.b;
  return static_cast<std::uint8_t>((weighted + 500u) / 1000u);
}

LumaGrid to_grayscale(const Frame& frame) {
  LumaGrid grid{frame.width(), frame.height(), {}};
  grid.values.resize(static_cast<std::size_t>(frame.width()) * frame.height());
  auto px = frame.pixels();
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    grid.values[i] = luma({px[3 * i], px[3 * i + 1], px[3 * i + 2]});
  }
  return grid;
}

std::vector<std::int64_t> box_sums(const LumaGrid& grid, int cols, int rows) {
  // Scaled coordinates: source pixel x spans [x*cols, (x+1)*cols), output cell c spans
  // [c*W, (c+1)*W). Overlaps are integers, so sums are exact.
  const std::int64_t W = grid.width;
  const std::int64_t H = grid.height;
  auto overlap = [](std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) {
    return std::max<std::int64_t>(0, std::min(a1, b1) - std::max(a0, b0));
  };

  // Column weights: for each output column, the source x range and per-x weight.
  std::vector<std::int64_t> col_sums(static_cast<std::size_t>(H) * cols, 0);
  for (int c = 0; c < cols; ++c) {
    const std::int64_t c0 = c * W;
    const std::int64_t c1 = c0 + W;
    const std::int64_t x_first = c0 / cols;
    const std::int64_t x_last = std::min(W - 1, (c1 - 1) / cols);
    for (std::int64_t y = 0; y < H; ++y) {
      std::int64_t acc = 0;
      for (std::int64_t x = x_first; x <= x_last; ++x) {
        acc += grid.values[y * W + x] * overlap(x * cols, (x + 1) * cols, c0, c1);
      }
      col_sums[y * cols + c] = acc;
    }
  }

  std::vector<std::int64_t> sums(static_cast<std::size_t>(rows) * cols, 0);
  for (int r = 0; r < rows; ++r) {
    const std::int64_t r0 = r * H;
    const std::int64_t r1 = r0 + H;
    const std::int64_t y_first = r0 / rows;
    const std::int64_t y_last = std::min(H - 1, (r1 - 1) / rows);
    for (std::int64_t y = y_first; y <= y_last; ++y) {
      const std::int64_t wy = overlap(y * rows, (y + 1) * rows, r0, r1);
      for (int c = 0; c < cols; ++c) sums[r * cols + c] += col_sums[y * cols + c] * wy;
    }
  }
  return sums;
}

PerceptualHash average_hash(const Frame& frame) {
  if (frame.width() < 8 || frame.height() < 8) {
    throw HashError(HashErrc::FrameTooSmall, "average hash needs at least 8x8 pixels");
  }
  const auto sums = box_sums(to_grayscale(frame), 8, 8);
  const std::int64_t total = std::accumulate(sums.begin(), sums.end(), std::int64_t{0});
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < 64; ++i) {
    // cell_i > mean  <=>  64 * sum_i > total
    if (64 * sums[i] > total) bits |= std::uint64_t{1} << (63 - i);
  }
  return {bits, HashAlgorithm::Average};
}

PerceptualHash difference_hash(const Frame& frame) {
  if (frame.width() < 9 || frame.height() < 8) {
    throw HashError(HashErrc::FrameTooSmall, "difference hash needs at least 9x8 pixels");
  }
  const auto sums = box_sums(to_grayscale(frame), 9, 8);
  std::uint64_t bits = 0;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      if (sums[r * 9 + c + 1] > sums[r * 9 + c]) bits |= std::uint64_t{1} << (63 - (r * 8 + c));
    }
  }
  return {bits, HashAlgorithm::Difference};
}

PerceptualHash compute_hash(const Frame& frame, HashAlgorithm algorithm) {
  return algorithm == HashAlgorithm::Average ? average_hash(frame) : difference_hash(frame);
}

int hamming_distance(const PerceptualHash& a, const PerceptualHash& b) {
  if (a.algorithm != b.algorithm) {
    throw HashError(HashErrc::AlgorithmMismatch, "cannot compare " + std::string(algorithm_tag(a.algorithm)) +
                                                     " with " + std::string(algorithm_tag(b.algorithm)));
  }
  return std::popcount(a.bits ^ b.bits);
}

std::string_view algorithm_tag(HashAlgorithm algorithm) {
  return algorithm == HashAlgorithm::Average ? "ahash" : "dhash";
}

HashAlgorithm algorithm_from_tag(std::string_view tag) {
  if (tag == "ahash") return HashAlgorithm::Average;
  if (tag == "dhash") return HashAlgorithm::Difference;
  throw HashError(HashErrc::BadHashText, "unknown hash algorithm '" + std::string(tag) + "'");
}

std::string to_string(const PerceptualHash& hash) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(algorithm_tag(hash.algorithm));
  out += ':';
  for (int shift = 60; shift >= 0; shift -= 4) out += kHex[(hash.bits >> shift) & 0xF];
  return out;
}

PerceptualHash parse_hash(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) throw HashError(HashErrc::BadHashText, "missing algorithm tag");
  const auto algorithm = algorithm_from_tag(text.substr(0, colon));
  auto hex = text.substr(colon + 1);
  if (hex.size() != 16 || !std::all_of(hex.begin(), hex.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
      })) {
    throw HashError(HashErrc::BadHashText, "expected 16 lowercase hex digits in '" + std::string(text) + "'");
  }
  std::uint64_t bits = 0;
  std::from_chars(hex.data(), hex.data() + hex.size(), bits, 16);
  return {bits, algorithm};
}

}  // namespace arcade::phash
