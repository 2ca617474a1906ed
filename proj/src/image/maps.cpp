#include "proom/image/maps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>

namespace proom::image {

using geometry::PanoramaGrid;

namespace {

PanoramaGrid grid_of(const Image& img, int channels, int bit_depth, const char* what) {
  if (img.channels != channels || img.bit_depth != bit_depth)
    throw ImageError(std::string(what) + ": unexpected PNG format");
  PanoramaGrid g{img.width, img.height};
  try {
    g.validate();
  } catch (const geometry::GeometryError& e) {
    throw ImageError(std::string(what) + ": " + e.what());
  }
  return g;
}

Image gray8(const PanoramaGrid& g) {
  Image img;
  img.width = g.width;
  img.height = g.height;
  img.channels = 1;
  img.samples8.resize(g.pixel_count());
  return img;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

constexpr std::string_view kSidecarMagic = "PRDEPTH1";

}  // namespace

std::string encode_layout_png(const geometry::LayoutMap& map) {
  Image img = gray8(map.grid);
  for (std::size_t i = 0; i < map.pixels.size(); ++i) img.samples8[i] = map.pixels[i] ? 255 : 0;
  return encode_png(img);
}

geometry::LayoutMap decode_layout_png(std::string_view bytes) {
  const Image img = decode_png(bytes);
  geometry::LayoutMap map(grid_of(img, 1, 8, "layout"));
  for (std::size_t i = 0; i < map.pixels.size(); ++i) map.pixels[i] = img.samples8[i] ? 1 : 0;
  return map;
}

std::string encode_semantic_png(const geometry::SemanticMap& map) {
  Image img = gray8(map.grid);
  for (std::size_t i = 0; i < map.pixels.size(); ++i) img.samples8[i] = static_cast<std::uint8_t>(map.pixels[i]);
  return encode_png(img);
}

geometry::SemanticMap decode_semantic_png(std::string_view bytes) {
  const Image img = decode_png(bytes);
  geometry::SemanticMap map(grid_of(img, 1, 8, "semantic"));
  for (std::size_t i = 0; i < map.pixels.size(); ++i) {
    if (img.samples8[i] > 4) throw ImageError("semantic: invalid label value");
    map.pixels[i] = static_cast<geometry::SurfaceLabel>(img.samples8[i]);
  }
  return map;
}

std::string encode_depth_png(const geometry::DepthMap& map) {
  Image img;
  img.width = map.width();
  img.height = map.height();
  img.channels = 1;
  img.bit_depth = 16;
  img.samples16.resize(map.pixels.size());
  for (std::size_t i = 0; i < map.pixels.size(); ++i) {
    const double mm = std::round(map.pixels[i] * 1000.0);
    img.samples16[i] = static_cast<std::uint16_t>(std::clamp(mm, 0.0, 65535.0));
  }
  return encode_png(img);
}

geometry::DepthMap decode_depth_png(std::string_view bytes) {
  const Image img = decode_png(bytes);
  geometry::DepthMap map(grid_of(img, 1, 16, "depth"));
  for (std::size_t i = 0; i < map.pixels.size(); ++i) map.pixels[i] = img.samples16[i] / 1000.0;
  return map;
}

std::string encode_texture_png(const geometry::TextureImage& tex) {
  Image img;
  img.width = tex.width();
  img.height = tex.height();
  img.channels = 3;
  img.samples8.resize(3 * tex.pixels.size());
  for (std::size_t i = 0; i < tex.pixels.size(); ++i) {
    img.samples8[3 * i] = tex.pixels[i].r;
    img.samples8[3 * i + 1] = tex.pixels[i].g;
    img.samples8[3 * i + 2] = tex.pixels[i].b;
  }
  return encode_png(img);
}

geometry::TextureImage decode_texture_png(std::string_view bytes) {
  const Image img = decode_png(bytes);
  geometry::TextureImage tex(grid_of(img, 3, 8, "texture"));
  for (std::size_t i = 0; i < tex.pixels.size(); ++i)
    tex.pixels[i] = {img.samples8[3 * i], img.samples8[3 * i + 1], img.samples8[3 * i + 2]};
  return tex;
}

std::string encode_depth_sidecar(const geometry::DepthMap& map) {
  std::string out(kSidecarMagic);
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  out.reserve(out.size() + 8 * map.pixels.size());
  for (double d : map.pixels) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  return out;
}

geometry::DepthMap decode_depth_sidecar(std::string_view bytes) {
  const std::size_t header = kSidecarMagic.size() + 8;
  if (bytes.size() < header || bytes.substr(0, kSidecarMagic.size()) != kSidecarMagic)
    throw ImageError("depth sidecar: bad header");
  PanoramaGrid g{static_cast<int>(get_u32(bytes, 8)), static_cast<int>(get_u32(bytes, 12))};
  try {
    g.validate();
  } catch (const geometry::GeometryError& e) {
    throw ImageError(std::string("depth sidecar: ") + e.what());
  }
  if (bytes.size() != header + 8 * g.pixel_count()) throw ImageError("depth sidecar: size mismatch");
  geometry::DepthMap map(g);
  for (std::size_t i = 0; i < map.pixels.size(); ++i) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[header + 8 * i + k])) << (8 * k);
    map.pixels[i] = std::bit_cast<double>(bits);
  }
  return map;
}

}  // namespace proom::image
