#pragma once

#include <string>
#include <string_view>

#include "proom/geometry/types.hpp"
#include "proom/image/png.hpp"

namespace proom::image {

// Layout: 8-bit gray, boundary 255. Semantic: 8-bit gray holding the label
// value (ceiling 0, wall 1, floor 2, door 3, window 4). Depth: 16-bit gray in
// millimeters, rounded and clamped to 65535. Texture: 8-bit RGB.

std::string encode_layout_png(const geometry::LayoutMap& map);
geometry::LayoutMap decode_layout_png(std::string_view bytes);

std::string encode_semantic_png(const geometry::SemanticMap& map);
geometry::SemanticMap decode_semantic_png(std::string_view bytes);

std::string encode_depth_png(const geometry::DepthMap& map);
/// Millimeter precision only; use the sidecar for exact values.
geometry::DepthMap decode_depth_png(std::string_view bytes);

std::string encode_texture_png(const geometry::TextureImage& img);
geometry::TextureImage decode_texture_png(std::string_view bytes);

/// Lossless depth: "PRDEPTH1", uint32 LE width, uint32 LE height, then W*H
/// IEEE-754 float64 LE values in row-major order.
std::string encode_depth_sidecar(const geometry::DepthMap& map);
geometry::DepthMap decode_depth_sidecar(std::string_view bytes);

}  // namespace proom::image
