#include "proom/furniture/layout.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "proom/geometry/shape.hpp"
#include "proom/util/text.hpp"

namespace proom::furniture {

namespace {

constexpr double kDeg = geometry::kPi / 180.0;

FurnitureError syntax(int line, const std::string& msg) {
  return FurnitureError(FurnitureError::Kind::syntax, "line " + std::to_string(line) + ": " + msg);
}

bool valid_category(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

double normalize_degrees(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0) d += 360.0;
  if (d >= 360.0) d = 0.0;
  return d == 0.0 ? 0.0 : d;
}

}  // namespace

std::array<Vec2, 4> FurnitureItem::footprint() const {
  const double c = std::cos(orientation * kDeg), s = std::sin(orientation * kDeg);
  const double hx = length / 2, hy = width / 2;
  const double sx[4] = {-1, 1, 1, -1}, sy[4] = {-1, -1, 1, 1};
  std::array<Vec2, 4> out;
  for (int k = 0; k < 4; ++k) {
    const double x = sx[k] * hx, y = sy[k] * hy;
    out[k] = {left + c * x - s * y, top + s * x + c * y};
  }
  return out;
}

const FurnitureItem* FurnitureLayout::find(const std::string& category, int index) const {
  for (const auto& it : items) {
    if (it.category == category && it.index == index) return &it;
  }
  return nullptr;
}

const FurnitureItem* FurnitureLayout::find_first(const std::string& category) const {
  const FurnitureItem* best = nullptr;
  for (const auto& it : items) {
    if (it.category == category && (!best || it.index < best->index)) best = &it;
  }
  return best;
}

int FurnitureLayout::next_index(const std::string& category) const {
  int n = 0;
  for (const auto& it : items) {
    if (it.category == category) n = std::max(n, it.index + 1);
  }
  return n;
}

RoomExtents extents_of(const geometry::RoomShape& shape) {
  const auto b = geometry::plan_bounds(shape.floor_corners);
  RoomExtents r;
  r.length = b.extent().x();
  r.width = b.extent().y();
  r.left = b.center().x();
  r.top = b.center().y();
  r.outline = shape.floor_corners;
  return r;
}

const std::string* Stanza::get(const std::string& name) const {
  for (const auto& [k, v] : props) {
    if (k == name) return &v;
  }
  return nullptr;
}

std::vector<Stanza> parse_stanzas(const std::string& text) {
  std::vector<Stanza> out;
  std::size_t i = 0;
  int line = 1;
  auto skip = [&] {
    while (i < text.size()) {
      if (text[i] == '\n') {
        ++line;
        ++i;
      } else if (std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
      } else if (text.compare(i, 2, "/*") == 0) {
        const auto end = text.find("*/", i + 2);
        if (end == std::string::npos) throw syntax(line, "unterminated comment");
        line += static_cast<int>(std::count(text.begin() + i, text.begin() + end, '\n'));
        i = end + 2;
      } else {
        break;
      }
    }
  };
  while (true) {
    skip();
    if (i >= text.size()) break;
    Stanza st;
    st.line = line;
    const std::size_t brace = text.find('{', i);
    if (brace == std::string::npos) throw syntax(line, "expected '{'");
    st.selector = std::string(util::trim(std::string_view(text).substr(i, brace - i)));
    if (st.selector.empty() || st.selector.find_first_of(" \t\n;}") != std::string::npos)
      throw syntax(line, "bad selector \"" + st.selector + "\"");
    const std::size_t close = text.find('}', brace);
    if (close == std::string::npos) throw syntax(line, "missing '}'");
    const std::string body = text.substr(brace + 1, close - brace - 1);
    std::stringstream ss(body);
    std::string decl;
    int decl_line = line;
    while (std::getline(ss, decl, ';')) {
      const int here = decl_line;
      decl_line += static_cast<int>(std::count(decl.begin(), decl.end(), '\n'));
      const std::string d(util::trim(decl));
      if (d.empty()) continue;
      const auto colon = d.find(':');
      if (colon == std::string::npos) throw syntax(here, "expected 'property: value' in " + st.selector);
      std::string key(util::trim(std::string_view(d).substr(0, colon)));
      std::string value(util::trim(std::string_view(d).substr(colon + 1)));
      if (key.empty() || value.empty()) throw syntax(here, "empty property in " + st.selector);
      if (st.get(key)) throw syntax(here, "property " + key + " repeated in " + st.selector);
      st.props.emplace_back(std::move(key), std::move(value));
    }
    line += static_cast<int>(std::count(text.begin() + i, text.begin() + close, '\n'));
    i = close + 1;
    out.push_back(std::move(st));
  }
  return out;
}

double css_value(const std::string& text, const std::string& unit) {
  std::string_view s = util::trim(text);
  if (s.size() > unit.size() && s.substr(s.size() - unit.size()) == unit) s.remove_suffix(unit.size());
  double v = 0;
  if (!util::parse_number(s, v) || !std::isfinite(v))
    throw FurnitureError(FurnitureError::Kind::syntax, "bad value \"" + text + "\"");
  return v;
}

std::string format_length(double meters) {
  std::string s = util::format_number(meters == 0.0 ? 0.0 : meters);
  if (s.find_first_of("eE") != std::string::npos) s = util::format_fixed(meters, 9);
  const auto dot = s.find('.');
  if (dot == std::string::npos) return s + ".00";
  while (s.size() - dot - 1 < 2) s += '0';
  return s;
}

FurnitureLayout parse_furniture_css(const std::string& text) {
  FurnitureLayout layout;
  bool have_room = false;
  std::set<std::string> seen;
  for (const Stanza& st : parse_stanzas(text)) {
    if (!seen.insert(st.selector).second)
      throw FurnitureError(FurnitureError::Kind::duplicate, "duplicate selector " + st.selector);
    auto need = [&](const char* name) -> const std::string& {
      const std::string* v = st.get(name);
      if (!v)
        throw FurnitureError(FurnitureError::Kind::missing_property,
                             st.selector + " (line " + std::to_string(st.line) + ") has no " + name);
      return *v;
    };
    if (st.selector == "room") {
      for (const auto& [k, _] : st.props) {
        if (k != "length" && k != "width" && k != "left" && k != "top" && k != "outline")
          throw syntax(st.line, "unknown room property " + k);
      }
      layout.room.length = css_value(need("length"), "m");
      layout.room.width = css_value(need("width"), "m");
      layout.room.left = css_value(need("left"), "m");
      layout.room.top = css_value(need("top"), "m");
      if (const std::string* o = st.get("outline")) {
        std::stringstream ss(*o);
        std::string pt;
        while (std::getline(ss, pt, ',')) {
          std::istringstream in(pt);
          std::string xs, ys, extra;
          if (!(in >> xs >> ys) || (in >> extra)) throw syntax(st.line, "bad outline point \"" + pt + "\"");
          layout.room.outline.emplace_back(css_value(xs, "m"), css_value(ys, "m"));
        }
      }
      if (layout.room.length <= 0 || layout.room.width <= 0)
        throw FurnitureError(FurnitureError::Kind::invalid, "room extents must be positive");
      have_room = true;
      continue;
    }
    const auto dash = st.selector.rfind('-');
    FurnitureItem item;
    item.category = dash == std::string::npos ? "" : st.selector.substr(0, dash);
    const std::string idx = dash == std::string::npos ? "" : st.selector.substr(dash + 1);
    if (!valid_category(item.category) || idx.empty() ||
        !std::all_of(idx.begin(), idx.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
        idx.size() > 6 || (idx.size() > 1 && idx[0] == '0'))
      throw syntax(st.line, "selector must be category-index, got \"" + st.selector + "\"");
    item.index = std::stoi(idx);
    for (const auto& [k, _] : st.props) {
      if (k != "length" && k != "width" && k != "height" && k != "left" && k != "top" && k != "orientation")
        throw syntax(st.line, "unknown property " + k + " in " + st.selector);
    }
    item.length = css_value(need("length"), "m");
    item.width = css_value(need("width"), "m");
    item.height = css_value(need("height"), "m");
    item.left = css_value(need("left"), "m");
    item.top = css_value(need("top"), "m");
    item.orientation = normalize_degrees(css_value(need("orientation"), "deg"));
    if (item.length <= 0 || item.width <= 0 || item.height <= 0)
      throw FurnitureError(FurnitureError::Kind::invalid, st.selector + ": dimensions must be positive");
    layout.items.push_back(std::move(item));
  }
  if (!have_room) throw FurnitureError(FurnitureError::Kind::missing_property, "no room stanza");
  return layout;
}

std::string serialize_furniture_css(const FurnitureLayout& layout) {
  const auto& r = layout.room;
  std::string out = "room { length: " + format_length(r.length) + "m; width: " + format_length(r.width) +
                    "m; left: " + format_length(r.left) + "m; top: " + format_length(r.top) + "m;";
  if (!r.outline.empty()) {
    out += " outline:";
    for (std::size_t i = 0; i < r.outline.size(); ++i) {
      out += (i ? ", " : " ") + util::format_number(r.outline[i].x()) + " " + util::format_number(r.outline[i].y());
    }
    out += ";";
  }
  out += " }\n";
  for (const auto& it : layout.items) {
    out += it.selector() + " { length: " + format_length(it.length) + "m; width: " + format_length(it.width) +
           "m; height: " + format_length(it.height) + "m; left: " + format_length(it.left) +
           "m; top: " + format_length(it.top) + "m; orientation: " + util::format_number(it.orientation) +
           "deg; }\n";
  }
  return out;
}

std::vector<Vec2> room_polygon(const RoomExtents& room) {
  if (room.outline.size() >= 3) return room.outline;
  const double hx = room.length / 2, hy = room.width / 2;
  return {{room.left - hx, room.top - hy}, {room.left + hx, room.top - hy},
          {room.left + hx, room.top + hy}, {room.left - hx, room.top + hy}};
}

bool inside(const std::vector<Vec2>& polygon, const FurnitureItem& item) {
  for (const Vec2& c : item.footprint()) {
    if (!geometry::point_in_polygon(polygon, c, 1e-9)) return false;
  }
  return true;
}

bool footprints_overlap(const FurnitureItem& a, const FurnitureItem& b) {
  const auto ca = a.footprint(), cb = b.footprint();
  for (const FurnitureItem* r : {&a, &b}) {
    for (int k = 0; k < 2; ++k) {
      const double ang = (r->orientation + 90.0 * k) * kDeg;
      const Vec2 axis(std::cos(ang), std::sin(ang));
      double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
      for (const Vec2& v : ca) amin = std::min(amin, axis.dot(v)), amax = std::max(amax, axis.dot(v));
      for (const Vec2& v : cb) bmin = std::min(bmin, axis.dot(v)), bmax = std::max(bmax, axis.dot(v));
      // touching footprints do not overlap
      if (amax <= bmin + 1e-9 || bmax <= amin + 1e-9) return false;
    }
  }
  return true;
}

namespace {

std::vector<Violation> report(const std::vector<Vec2>& polygon, const FurnitureLayout& layout) {
  std::vector<Violation> out;
  for (const auto& it : layout.items) {
    const auto fp = it.footprint();
    for (int k = 0; k < 4; ++k) {
      if (geometry::point_in_polygon(polygon, fp[k], 1e-9)) continue;
      out.push_back({Violation::Kind::out_of_room, it.selector(), "",
                     it.selector() + " corner (" + util::format_number(fp[k].x()) + ", " +
                         util::format_number(fp[k].y()) + ") is outside the room"});
    }
  }
  for (std::size_t i = 0; i < layout.items.size(); ++i) {
    for (std::size_t j = i + 1; j < layout.items.size(); ++j) {
      if (!footprints_overlap(layout.items[i], layout.items[j])) continue;
      out.push_back({Violation::Kind::overlap, layout.items[i].selector(), layout.items[j].selector(),
                     layout.items[i].selector() + " overlaps " + layout.items[j].selector()});
    }
  }
  return out;
}

}  // namespace

std::vector<Violation> containment_report(const FurnitureLayout& layout) {
  return report(room_polygon(layout.room), layout);
}

std::vector<Violation> containment_report(const geometry::RoomShape& shape, const FurnitureLayout& layout) {
  return report(shape.floor_corners, layout);
}

}  // namespace proom::furniture
