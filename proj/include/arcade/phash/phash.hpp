#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "arcade/image/frame.hpp"

namespace arcade::phash {

enum class HashAlgorithm : std::uint8_t { Average, Difference };

/// 64-bit perceptual hash. Bit 63 (MSB) corresponds to cell 0 in row-major order.
struct PerceptualHash {
  std::uint64_t bits = 0;
  HashAlgorithm algorithm = HashAlgorithm::Difference;

  bool operator==(const PerceptualHash&) const = default;
};

enum class HashErrc { FrameTooSmall, AlgorithmMismatch, BadHashText };

class HashError : public std::runtime_error {
 public:
  HashError(HashErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  HashErrc code() const noexcept { return code_; }

 private:
  HashErrc code_;
};

/// 8-bit luminance raster.
struct LumaGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;  // row-major

  std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// round(0.299 R + 0.587 G + 0.114 B), evaluated exactly in integers with halves rounded up.
std::uint8_t luma(Rgb px);
LumaGrid to_grayscale(const Frame& frame);

/// Exact box-filter downsample of `grid` to cols x rows cells. Every cell shares the common
/// denominator grid.width * grid.height, so the returned integer sums compare exactly as the
/// cell means would.
std::vector<std::int64_t> box_sums(const LumaGrid& grid, int cols, int rows);

/// Grayscale, 8x8 box downsample, bit set iff cell > mean of the 64 cells (strict).
PerceptualHash average_hash(const Frame& frame);
/// Grayscale, 9x8 box downsample, bit (r, c) set iff cell(r, c+1) > cell(r, c) (strict).
PerceptualHash difference_hash(const Frame& frame);
PerceptualHash compute_hash(const Frame& frame, HashAlgorithm algorithm);

/// Popcount of the XOR. Throws HashError(AlgorithmMismatch) for hashes of different kinds.
int hamming_distance(const PerceptualHash& a, const PerceptualHash& b);

std::string_view algorithm_tag(HashAlgorithm algorithm);  // "ahash" | "dhash"
HashAlgorithm algorithm_from_tag(std::string_view tag);

/// "dhash:f0e1d2c3b4a59687" style text form.
std::string to_string(const PerceptualHash& hash);
PerceptualHash parse_hash(std::string_view text);

}  // namespace arcade::phash
