#include "arcade/image/image_io.hpp"

#include <openssl/evp.h>
#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

namespace arcade::image {
namespace {

struct PngWriteState {
  std::vector<std::uint8_t>* out;
};

void png_write_cb(png_structp png, png_bytep data, png_size_t len) {
  auto* state = static_cast<PngWriteState*>(png_get_io_ptr(png));
  state->out->insert(state->out->end(), data, data + len);
}

void png_flush_cb(png_structp) {}

struct PngReadState {
  const std::vector<std::uint8_t>* in;
  std::size_t pos;
};

void png_read_cb(png_structp png, png_bytep data, png_size_t len) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->pos + len > state->in->size()) png_error(png, "truncated PNG");
  std::memcpy(data, state->in->data() + state->pos, len);
  state->pos += len;
}

// libpng reports errors by longjmp; the helpers below keep only trivially destructible
// locals between setjmp and any libpng call so the jump skips no destructors.
void png_error_cb(png_structp png, png_const_charp msg) {
  auto* err = static_cast<std::string*>(png_get_error_ptr(png));
  if (err) *err = msg;
  longjmp(png_jmpbuf(png), 1);
}

void png_warning_cb(png_structp, png_const_charp) {}

bool encode_png_impl(const Frame* frame, std::vector<std::uint8_t>* out, std::string* err) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, err, png_error_cb, png_warning_cb);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  PngWriteState state{out};
  png_set_write_fn(png, &state, png_write_cb, png_flush_cb);
  png_set_IHDR(png, info, static_cast<png_uint_32>(frame->width()), static_cast<png_uint_32>(frame->height()),
               8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::uint8_t* pixels = frame->pixels().data();
  const std::size_t stride = static_cast<std::size_t>(frame->width()) * 3;
  for (int y = 0; y < frame->height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(pixels + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

struct DecodedPng {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
  std::vector<png_bytep> rows;
};

bool decode_png_impl(const std::vector<std::uint8_t>* bytes, DecodedPng* out, std::string* err) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, err, png_error_cb, png_warning_cb);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  PngReadState state{bytes, 0};
  png_set_read_fn(png, &state, png_read_cb);
  png_set_user_limits(png, 16384, 16384);
  png_read_info(png, info);

  const auto color = png_get_color_type(png, info);
  const auto depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  out->width = static_cast<int>(png_get_image_width(png, info));
  out->height = static_cast<int>(png_get_image_height(png, info));
  const std::size_t stride = png_get_rowbytes(png, info);
  if (stride != static_cast<std::size_t>(out->width) * 3) png_error(png, "unexpected PNG row layout");
  out->rgb.resize(stride * out->height);
  out->rows.resize(out->height);
  for (int y = 0; y < out->height; ++y) out->rows[y] = out->rgb.data() + y * stride;
  png_read_image(png, out->rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Frame& frame) {
  std::vector<std::uint8_t> out;
  std::string err = "PNG encoder failed";
  if (!encode_png_impl(&frame, &out, &err)) throw ImageError(err);
  return out;
}

Frame decode_png(const std::vector<std::uint8_t>& bytes, std::int64_t captured_at_ms) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw ImageError("not a PNG stream");
  DecodedPng decoded;
  std::string err = "PNG decoder failed";
  if (!decode_png_impl(&bytes, &decoded, &err)) throw ImageError(err);
  return Frame(decoded.width, decoded.height, std::move(decoded.rgb), captured_at_ms);
}

Frame decode_ppm(const std::vector<std::uint8_t>& bytes, std::int64_t captured_at_ms) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&]() -> long {
    skip_ws();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw ImageError("malformed PPM header");
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > 1'000'000) throw ImageError("PPM value too large");
    }
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '3' && bytes[1] != '6')) {
    throw ImageError("not a P3/P6 PPM stream");
  }
  const bool binary = bytes[1] == '6';
  pos = 2;
  const long width = read_uint();
  const long height = read_uint();
  const long maxval = read_uint();
  if (width <= 0 || height <= 0 || width > 16384 || height > 16384) throw ImageError("bad PPM dimensions");
  if (maxval != 255) throw ImageError("only maxval 255 PPMs are supported");
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width * height * 3));
  if (binary) {
    ++pos;  // single whitespace byte after maxval
    if (bytes.size() < pos + rgb.size()) throw ImageError("truncated PPM");
    std::memcpy(rgb.data(), bytes.data() + pos, rgb.size());
  } else {
    for (auto& v : rgb) {
      const long s = read_uint();
      if (s > 255) throw ImageError("PPM sample exceeds maxval");
      v = static_cast<std::uint8_t>(s);
    }
  }
  return Frame(static_cast<int>(width), static_cast<int>(height), std::move(rgb), captured_at_ms);
}

std::vector<std::uint8_t> encode_ppm(const Frame& frame) {
  std::string header = "P6\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  auto px = frame.pixels();
  out.insert(out.end(), px.begin(), px.end());
  return out;
}

Frame load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot open image " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P') return decode_ppm(bytes);
  throw ImageError("unrecognized image format: " + path.string());
}

void save_png(const Frame& frame, const std::filesystem::path& path) {
  auto bytes = encode_png(frame);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw ImageError("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw ImageError("invalid base64");
  std::size_t size = static_cast<std::size_t>(n);
  // EVP_DecodeBlock keeps the zero bytes that padding stands for.
  if (!text.empty() && text.back() == '=') --size;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --size;
  out.resize(size);
  return out;
}

}  // namespace arcade::image
