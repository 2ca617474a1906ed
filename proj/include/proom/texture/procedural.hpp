#pragma once

#include <cstdint>

#include "proom/geometry/types.hpp"
#include "proom/texture/spec.hpp"

namespace proom::texture {

/// Paints every pixel with the style of its semantic label. Pattern
/// coordinates come from 3D points rebuilt from the depth map: floor and
/// ceiling use plan coordinates aligned with the image seam, walls use arc
/// length along the visible wall boundary (period snapped so the boundary
/// holds a whole number of cells) and height above the floor. Patterns are
/// mirror-symmetric about the seam, so columns 0 and W-1 match. The seed
/// only drives a +-1.5 level noise on patterned surfaces.
geometry::TextureImage gen_texture_procedural(const geometry::SemanticMap& semantic,
                                              const geometry::DepthMap& depth, const TextureSpec& spec,
                                              std::uint64_t seed);

}  // namespace proom::texture
