#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proom/geometry/types.hpp"

namespace proom::texture {

enum class Pattern { solid, stripes, planks, tiles, speckle };

const char* pattern_name(Pattern p);
std::optional<Pattern> pattern_from_name(std::string_view name);
/// Default feature size in meters (stripe period, plank width, tile size, ...).
double default_scale(Pattern p);

struct SurfaceStyle {
  geometry::Rgb8 base;
  Pattern pattern = Pattern::solid;
  double scale = 1.0;  // meters
  geometry::Rgb8 secondary;

  bool operator==(const SurfaceStyle&) const = default;
};

/// Secondary color used when none is given: the base darkened by 15%.
geometry::Rgb8 shade(const geometry::Rgb8& base);
SurfaceStyle make_style(const geometry::Rgb8& base, Pattern pattern);

struct TextureSpec {
  SurfaceStyle floor;
  SurfaceStyle walls;
  SurfaceStyle ceiling;
  SurfaceStyle door;
  SurfaceStyle window;
  std::string text;                // every instruction folded into this spec, verbatim
  std::vector<std::string> unparsed;  // clauses that named no surface
  std::vector<std::string> notes;     // e.g. unknown color words

  /// Floor brown planks, walls light gray, ceiling white, door sienna
  /// planks, window light steel blue; all scales at their pattern default.
  static TextureSpec defaults();
  bool operator==(const TextureSpec&) const = default;
};

/// Keyword extraction over the defaults.
TextureSpec parse_texture_spec(std::string_view text);
/// Applies `text` on top of `base`: only mentioned surfaces change, and only
/// the attributes the text names.
TextureSpec parse_texture_spec(std::string_view text, const TextureSpec& base);

/// Stable one-line-per-surface description, e.g.
/// "floor: planks brown/#8c2424 0.2m".
std::string describe_spec(const TextureSpec& spec);

const SurfaceStyle& style_for(const TextureSpec& spec, geometry::SurfaceLabel label);

}  // namespace proom::texture
