#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcade/image/frame.hpp"

namespace arcade::image {

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lossless PNG (8-bit RGB). Decoding accepts gray, palette and alpha variants and drops alpha.
std::vector<std::uint8_t> encode_png(const Frame& frame);
Frame decode_png(const std::vector<std::uint8_t>& bytes, std::int64_t captured_at_ms = 0);

/// Netpbm P3 (ASCII) or P6 (binary) pixmaps with maxval 255.
Frame decode_ppm(const std::vector<std::uint8_t>& bytes, std::int64_t captured_at_ms = 0);
std::vector<std::uint8_t> encode_ppm(const Frame& frame);

/// Reads a PNG or PPM file, detected by its magic bytes. Throws ImageError.
Frame load_image(const std::filesystem::path& path);
void save_png(const Frame& frame, const std::filesystem::path& path);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace arcade::image
