#include "proom/image/png.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>

namespace proom::image {

namespace {

void write_bytes(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), len);
}

void flush_noop(png_structp) {}

struct Reader {
  std::string_view bytes;
  std::size_t pos = 0;
};

void read_bytes(png_structp png, png_bytep data, png_size_t len) {
  auto* in = static_cast<Reader*>(png_get_io_ptr(png));
  if (in->bytes.size() - in->pos < len) png_error(png, "truncated PNG");
  std::memcpy(data, in->bytes.data() + in->pos, len);
  in->pos += len;
}

void on_error(png_structp png, png_const_charp msg) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  *text = msg;
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

}  // namespace

std::string encode_png(const Image& img) {
  if (img.width <= 0 || img.height <= 0) throw ImageError("encode_png: empty image");
  if (img.channels != 1 && img.channels != 3) throw ImageError("encode_png: channels must be 1 or 3");
  if (img.bit_depth != 8 && img.bit_depth != 16) throw ImageError("encode_png: bit depth must be 8 or 16");
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height * img.channels;
  if ((img.bit_depth == 8 ? img.samples8.size() : img.samples16.size()) != count)
    throw ImageError("encode_png: sample count does not match dimensions");

  std::string err;
  std::string out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_error, on_warning);
  if (!png) throw ImageError("encode_png: libpng init failed");
  png_infop info = png_create_info_struct(png);
  // row buffer lives outside the setjmp scope
  std::vector<png_byte> row(static_cast<std::size_t>(img.width) * img.channels * (img.bit_depth / 8));
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ImageError("encode_png: " + err);
  }
  png_set_write_fn(png, &out, write_bytes, flush_noop);
  png_set_IHDR(png, info, img.width, img.height, img.bit_depth,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
  for (int r = 0; r < img.height; ++r) {
    if (img.bit_depth == 8) {
      std::memcpy(row.data(), img.samples8.data() + r * stride, stride);
    } else {
      for (std::size_t i = 0; i < stride; ++i) {
        const std::uint16_t v = img.samples16[r * stride + i];
        row[2 * i] = static_cast<png_byte>(v >> 8);
        row[2 * i + 1] = static_cast<png_byte>(v & 0xff);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Image decode_png(std::string_view bytes) {
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0)
    throw ImageError("decode_png: not a PNG stream");
  std::string err;
  Reader reader{bytes, 0};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, on_error, on_warning);
  if (!png) throw ImageError("decode_png: libpng init failed");
  png_infop info = png_create_info_struct(png);
  Image img;
  std::vector<png_byte> all;
  std::vector<png_bytep> rows;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ImageError("decode_png: " + err);
  }
  png_set_read_fn(png, &reader, read_bytes);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.channels = png_get_channels(png, info);
  img.bit_depth = depth = png_get_bit_depth(png, info);
  if (img.channels != 1 && img.channels != 3) png_error(png, "unsupported channel layout");
  const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  all.resize(rowbytes * img.height);
  rows.resize(static_cast<std::size_t>(img.height));
  for (int r = 0; r < img.height; ++r) rows[r] = all.data() + r * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (depth == 8) {
    img.samples8.resize(stride * img.height);
    for (int r = 0; r < img.height; ++r) std::memcpy(img.samples8.data() + r * stride, rows[r], stride);
  } else {
    img.samples16.resize(stride * img.height);
    for (int r = 0; r < img.height; ++r)
      for (std::size_t i = 0; i < stride; ++i)
        img.samples16[r * stride + i] = static_cast<std::uint16_t>((rows[r][2 * i] << 8) | rows[r][2 * i + 1]);
  }
  return img;
}

}  // namespace proom::image
