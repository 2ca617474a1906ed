#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "proom/geometry/types.hpp"

namespace proom::texture {

/// Lowercase CSS named color lookup ("lightblue", "gray", ...).
std::optional<geometry::Rgb8> named_color(std::string_view name);
/// First CSS name with exactly this value (alphabetical), else "#rrggbb".
std::string color_name(const geometry::Rgb8& rgb);

}  // namespace proom::texture
