#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace proom::image {

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interleaved 8- or 16-bit samples, row-major. 16-bit samples are stored
/// host-endian in `samples16`; 8-bit ones in `samples8`.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 (gray) or 3 (RGB)
  int bit_depth = 8;
  std::vector<std::uint8_t> samples8;
  std::vector<std::uint16_t> samples16;

  bool operator==(const Image&) const = default;
};

/// PNG bytes; no time or text chunks, so equal images give equal bytes.
std::string encode_png(const Image& img);
/// Decodes gray or RGB PNGs (alpha and palette are expanded/stripped).
Image decode_png(std::string_view bytes);

}  // namespace proom::image
