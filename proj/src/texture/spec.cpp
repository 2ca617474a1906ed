#include "proom/texture/spec.hpp"

#include <array>
#include <cctype>
#include <cmath>

#include "proom/texture/colors.hpp"
#include "proom/util/text.hpp"

namespace proom::texture {

using geometry::Rgb8;
using geometry::SurfaceLabel;

namespace {

constexpr std::array<std::pair<Pattern, const char*>, 5> kPatternNames{{
    {Pattern::solid, "solid"},
    {Pattern::stripes, "stripes"},
    {Pattern::planks, "planks"},
    {Pattern::tiles, "tiles"},
    {Pattern::speckle, "speckle"},
}};

struct PatternWord {
  const char* word;
  Pattern pattern;
  int priority;
  const char* implied_color;  // may be null
};

// Material words outrank plain pattern words: "wood with brown stripes" is planks.
constexpr PatternWord kPatternWords[] = {
    {"wood", Pattern::planks, 4, "brown"},       {"wooden", Pattern::planks, 4, "brown"},
    {"hardwood", Pattern::planks, 4, "brown"},   {"parquet", Pattern::planks, 4, "brown"},
    {"oak", Pattern::planks, 4, "burlywood"},    {"timber", Pattern::planks, 4, "brown"},
    {"laminate", Pattern::planks, 4, nullptr},   {"plank", Pattern::planks, 4, nullptr},
    {"planks", Pattern::planks, 4, nullptr},     {"tile", Pattern::tiles, 3, nullptr},
    {"tiles", Pattern::tiles, 3, nullptr},       {"tiled", Pattern::tiles, 3, nullptr},
    {"ceramic", Pattern::tiles, 3, nullptr},     {"checkered", Pattern::tiles, 3, nullptr},
    {"marble", Pattern::speckle, 2, "whitesmoke"}, {"granite", Pattern::speckle, 2, "gray"},
    {"terrazzo", Pattern::speckle, 2, nullptr},  {"speckle", Pattern::speckle, 2, nullptr},
    {"speckled", Pattern::speckle, 2, nullptr},  {"carpet", Pattern::speckle, 2, nullptr},
    {"carpeted", Pattern::speckle, 2, nullptr},  {"stone", Pattern::speckle, 2, "gray"},
    {"stripe", Pattern::stripes, 1, nullptr},    {"stripes", Pattern::stripes, 1, nullptr},
    {"striped", Pattern::stripes, 1, nullptr},   {"solid", Pattern::solid, 0, nullptr},
    {"plain", Pattern::solid, 0, nullptr},       {"painted", Pattern::solid, 0, nullptr},
    {"paint", Pattern::solid, 0, nullptr},       {"matte", Pattern::solid, 0, nullptr},
};

enum class Surface { floor, walls, ceiling, door, window };

std::optional<Surface> surface_word(const std::string& w) {
  if (w == "floor" || w == "floors" || w == "flooring") return Surface::floor;
  if (w == "wall" || w == "walls") return Surface::walls;
  if (w == "ceiling" || w == "ceilings") return Surface::ceiling;
  if (w == "door" || w == "doors") return Surface::door;
  if (w == "window" || w == "windows") return Surface::window;
  return std::nullopt;
}

bool is_connector(const std::string& w) {
  return w == "and" || w == "with" || w == "while" || w == "but" || w == "plus";
}

Rgb8 mix(const Rgb8& a, const Rgb8& b, double t) {
  auto f = [t](std::uint8_t x, std::uint8_t y) {
    return static_cast<std::uint8_t>(std::lround(x + (y - x) * t));
  };
  return {f(a.r, b.r), f(a.g, b.g), f(a.b, b.b)};
}

// Splits into clauses at , ; ! ? newlines and at periods that are not decimal points.
std::vector<std::string> split_clauses(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool decimal = c == '.' && i > 0 && i + 1 < text.size() &&
                         std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
                         std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if ((c == ',' || c == ';' || c == '!' || c == '?' || c == '\n' || c == '.') && !decimal) {
      if (!util::trim(cur).empty()) out.emplace_back(util::trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!util::trim(cur).empty()) out.emplace_back(util::trim(cur));
  return out;
}

struct Word {
  std::string text;   // lowercase
  std::size_t begin;  // offset into the clause
  std::size_t end;
};

std::vector<Word> words_of(const std::string& clause) {
  std::vector<Word> out;
  std::size_t i = 0;
  while (i < clause.size()) {
    const unsigned char c = static_cast<unsigned char>(clause[i]);
    if (!std::isalnum(c) && c != '.' && c != '#') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < clause.size() && (std::isalnum(static_cast<unsigned char>(clause[j])) || clause[j] == '.' ||
                                 clause[j] == '#'))
      ++j;
    out.push_back({util::to_lower(clause.substr(i, j - i)), i, j});
    i = j;
  }
  return out;
}

struct ClauseInfo {
  std::vector<Surface> surfaces;
  std::optional<Pattern> pattern;
  const char* implied_color = nullptr;
  std::vector<Rgb8> colors;
  std::optional<double> scale;
  std::vector<std::string> notes;

  bool has_attributes() const { return pattern || !colors.empty() || scale; }
};

std::optional<Rgb8> hex_color(const std::string& t) {
  if (t.size() != 7 || t[0] != '#') return std::nullopt;
  unsigned v[3];
  for (int k = 0; k < 3; ++k) {
    const auto part = t.substr(1 + 2 * k, 2);
    if (!std::isxdigit(static_cast<unsigned char>(part[0])) || !std::isxdigit(static_cast<unsigned char>(part[1])))
      return std::nullopt;
    v[k] = static_cast<unsigned>(std::stoul(part, nullptr, 16));
  }
  return Rgb8{static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1]), static_cast<std::uint8_t>(v[2])};
}

std::optional<double> unit_scale(const std::string& unit) {
  if (unit == "m" || unit == "meter" || unit == "meters" || unit == "metre" || unit == "metres") return 1.0;
  if (unit == "cm" || unit == "centimeter" || unit == "centimeters" || unit == "centimetres") return 0.01;
  if (unit == "mm" || unit == "millimeter" || unit == "millimeters") return 0.001;
  return std::nullopt;
}

// "0.3m", "30 cm"
std::optional<double> measure_at(const std::vector<Word>& w, std::size_t& i) {
  const std::string& t = w[i].text;
  std::size_t k = 0;
  while (k < t.size() && (std::isdigit(static_cast<unsigned char>(t[k])) || t[k] == '.')) ++k;
  if (k == 0) return std::nullopt;
  double value = 0;
  if (!util::parse_number(t.substr(0, k), value)) return std::nullopt;
  std::string unit = t.substr(k);
  std::size_t used = i;
  if (unit.empty() && i + 1 < w.size()) {
    unit = w[i + 1].text;
    used = i + 1;
  }
  const auto factor = unit_scale(unit);
  if (!factor || value <= 0) return std::nullopt;
  i = used;
  return value * *factor;
}

ClauseInfo analyse(const std::vector<Word>& w) {
  ClauseInfo info;
  bool dimension_phrase = false;
  for (const auto& x : w)
    if (x.text == "by" || x.text == "x") dimension_phrase = true;
  int best_priority = -1;
  bool color_known_here = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::string& t = w[i].text;
    if (auto s = surface_word(t)) {
      info.surfaces.push_back(*s);
      continue;
    }
    bool matched = false;
    for (const auto& pw : kPatternWords) {
      if (t == pw.word) {
        if (pw.priority > best_priority) {
          best_priority = pw.priority;
          info.pattern = pw.pattern;
          info.implied_color = pw.implied_color;
        }
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (auto hex = hex_color(t)) {
      info.colors.push_back(*hex);
      color_known_here = true;
      continue;
    }
    // longest CSS name over up to three words, then light/dark modifiers
    bool found = false;
    for (std::size_t len = 3; len >= 1 && !found; --len) {
      if (i + len > w.size()) continue;
      std::string joined;
      for (std::size_t k = 0; k < len; ++k) joined += w[i + k].text;
      if (auto rgb = named_color(joined)) {
        info.colors.push_back(*rgb);
        i += len - 1;
        found = true;
      } else if (len == 2 && (w[i].text == "light" || w[i].text == "dark" || w[i].text == "pale")) {
        if (auto base = named_color(w[i + 1].text)) {
          const bool light = w[i].text != "dark";
          info.colors.push_back(mix(*base, light ? Rgb8{255, 255, 255} : Rgb8{0, 0, 0}, 0.35));
          i += 1;
          found = true;
        }
      }
    }
    if (found) {
      color_known_here = true;
      continue;
    }
    if (!dimension_phrase) {
      std::size_t j = i;
      if (auto m = measure_at(w, j)) {
        info.scale = *m;
        i = j;
        continue;
      }
    }
    if ((t == "color" || t == "colour" || t == "colored" || t == "coloured") && i > 0 && !color_known_here) {
      info.notes.push_back("unknown color '" + w[i - 1].text + "'; keeping the surface default");
    }
  }
  return info;
}

SurfaceStyle& slot(TextureSpec& spec, Surface s) {
  switch (s) {
    case Surface::floor: return spec.floor;
    case Surface::walls: return spec.walls;
    case Surface::ceiling: return spec.ceiling;
    case Surface::door: return spec.door;
    default: return spec.window;
  }
}

void apply(SurfaceStyle& style, const ClauseInfo& info) {
  if (info.pattern && *info.pattern != style.pattern) {
    style.pattern = *info.pattern;
    style.scale = default_scale(style.pattern);
  }
  if (info.scale) style.scale = *info.scale;
  if (!info.colors.empty()) {
    style.base = info.colors[0];
    style.secondary = info.colors.size() > 1 ? info.colors[1] : shade(style.base);
  } else if (info.implied_color) {
    style.base = *named_color(info.implied_color);
    style.secondary = shade(style.base);
  }
}

}  // namespace

const char* pattern_name(Pattern p) {
  for (const auto& [pat, name] : kPatternNames)
    if (pat == p) return name;
  return "?";
}

std::optional<Pattern> pattern_from_name(std::string_view name) {
  for (const auto& [pat, n] : kPatternNames)
    if (name == n) return pat;
  return std::nullopt;
}

double default_scale(Pattern p) {
  switch (p) {
    case Pattern::stripes: return 0.25;
    case Pattern::planks: return 0.2;
    case Pattern::tiles: return 0.5;
    case Pattern::speckle: return 0.05;
    default: return 1.0;
  }
}

Rgb8 shade(const Rgb8& base) { return mix(base, {0, 0, 0}, 0.15); }

SurfaceStyle make_style(const Rgb8& base, Pattern pattern) {
  return {base, pattern, default_scale(pattern), shade(base)};
}

TextureSpec TextureSpec::defaults() {
  TextureSpec s;
  s.floor = make_style(*named_color("brown"), Pattern::planks);
  s.walls = make_style(*named_color("lightgray"), Pattern::solid);
  s.ceiling = make_style(*named_color("white"), Pattern::solid);
  s.door = make_style(*named_color("sienna"), Pattern::planks);
  s.window = make_style(*named_color("lightsteelblue"), Pattern::solid);
  return s;
}

TextureSpec parse_texture_spec(std::string_view text) {
  return parse_texture_spec(text, TextureSpec::defaults());
}

TextureSpec parse_texture_spec(std::string_view text, const TextureSpec& base) {
  TextureSpec spec = base;
  const std::string verbatim(util::trim(text));
  if (!verbatim.empty()) spec.text = spec.text.empty() ? verbatim : spec.text + "\n" + verbatim;

  // clause pieces: (text, words), split further at connectors between surfaces
  std::vector<std::pair<std::string, std::vector<Word>>> pieces;
  for (const auto& clause : split_clauses(text)) {
    const auto words = words_of(clause);
    std::size_t start = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (!is_connector(words[i].text)) continue;
      bool left = false, right = false;
      for (std::size_t k = start; k < i; ++k) left |= surface_word(words[k].text).has_value();
      for (std::size_t k = i + 1; k < words.size(); ++k) right |= surface_word(words[k].text).has_value();
      if (left && right) {
        pieces.emplace_back(clause.substr(words[start].begin, words[i].begin - words[start].begin),
                            std::vector<Word>(words.begin() + start, words.begin() + i));
        start = i + 1;
      }
    }
    if (start < words.size())
      pieces.emplace_back(clause.substr(words[start].begin),
                          std::vector<Word>(words.begin() + start, words.end()));
  }

  std::vector<Surface> pending;  // surfaces named without attributes, e.g. "walls and ceiling are white"
  std::optional<Surface> previous;
  for (const auto& [piece, words] : pieces) {
    ClauseInfo info = analyse(words);
    spec.notes.insert(spec.notes.end(), info.notes.begin(), info.notes.end());
    if (info.surfaces.empty()) {
      if (previous && info.has_attributes()) apply(slot(spec, *previous), info);
      else spec.unparsed.push_back(std::string(util::trim(piece)));
      continue;
    }
    if (!info.has_attributes()) {
      pending.insert(pending.end(), info.surfaces.begin(), info.surfaces.end());
      continue;
    }
    for (Surface s : pending) apply(slot(spec, s), info);
    pending.clear();
    for (Surface s : info.surfaces) apply(slot(spec, s), info);
    previous = info.surfaces.back();
  }
  return spec;
}

std::string describe_spec(const TextureSpec& spec) {
  auto line = [](const char* name, const SurfaceStyle& s) {
    return std::string(name) + ": " + pattern_name(s.pattern) + " " + color_name(s.base) + "/" +
           color_name(s.secondary) + " " + util::format_number(s.scale) + "m\n";
  };
  return line("floor", spec.floor) + line("walls", spec.walls) + line("ceiling", spec.ceiling) +
         line("door", spec.door) + line("window", spec.window);
}

const SurfaceStyle& style_for(const TextureSpec& spec, SurfaceLabel label) {
  switch (label) {
    case SurfaceLabel::ceiling: return spec.ceiling;
    case SurfaceLabel::floor: return spec.floor;
    case SurfaceLabel::door: return spec.door;
    case SurfaceLabel::window: return spec.window;
    default: return spec.walls;
  }
}

}  // namespace proom::texture
