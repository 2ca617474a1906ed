#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <regex>
#include <sstream>

#include "proom/geometry/shape.hpp"
#include "proom/llm/chat.hpp"
#include "proom/util/text.hpp"

namespace proom::llm {

namespace {

using geometry::Vec2;
using util::format_number;
using util::to_lower;

const char* kProse = "I am not sure how to turn that into a program. Could you describe the change differently?";

std::string task_of(const PromptBundle& p) {
  const auto lines = util::split_lines(p.system);
  if (lines.empty() || lines[0].rfind("task: ", 0) != 0) return {};
  return std::string(util::trim(std::string_view(lines[0]).substr(6)));
}

std::string instruction_of(const PromptBundle& p) {
  for (const std::string& line : util::split_lines(p.user)) {
    if (line.rfind("Instruction: ", 0) == 0) return line.substr(13);
  }
  return {};
}

bool has_any(const std::string& text, std::initializer_list<const char*> words) {
  for (const char* w : words) {
    if (util::contains_word(text, w)) return true;
  }
  return false;
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

// ---- program task ----

struct Bound {
  std::map<std::string, int> latest;  // prefix -> highest index
  std::map<std::string, std::string> type_of;

  bool has(const std::string& prefix) const { return latest.count(prefix) > 0; }
  std::string last(const std::string& prefix) const { return prefix + std::to_string(latest.at(prefix)); }
  std::string next(const std::string& prefix) const {
    return prefix + std::to_string(has(prefix) ? latest.at(prefix) + 1 : 0);
  }
};

Bound parse_variables(const PromptBundle& p) {
  Bound b;
  const auto section = prompt_section(p.user, "Variables");
  if (!section) return b;
  static const std::regex var(R"(^([A-Za-z_]*[A-Za-z_])([0-9]+): *(\w+)$)");
  for (const std::string& line : util::split_lines(*section)) {
    std::smatch m;
    if (!std::regex_match(line, m, var)) continue;
    const std::string prefix = m[1];
    const int idx = std::stoi(m[2]);
    auto [it, fresh] = b.latest.try_emplace(prefix, idx);
    if (!fresh) it->second = std::max(it->second, idx);
    b.type_of[m[1].str() + m[2].str()] = m[3];
  }
  return b;
}

const std::vector<std::string> kVerbs = {"create", "make", "generate", "build", "design", "give me", "i want",
                                         "show me"};

std::string shape_fragment(const std::string& instruction) {
  std::string s = instruction;
  const auto with = to_lower(s).find(" with ");
  const auto comma = s.find(',');
  s = s.substr(0, std::min(with, comma));
  std::string lower = to_lower(s);
  for (const std::string& v : kVerbs) {
    if (lower.rfind(v + " ", 0) == 0) {
      s = s.substr(v.size() + 1);
      break;
    }
  }
  return std::string(util::trim(s));
}

std::string texture_fragment(const std::string& instruction) {
  std::string rest = instruction;
  const auto with = to_lower(rest).find(" with ");
  const auto comma = rest.find(',');
  const auto cut = std::min(with, comma);
  if (cut == std::string::npos) return {};
  rest = rest.substr(cut == with ? cut + 6 : cut + 1);
  std::vector<std::string> kept;
  std::stringstream ss(rest);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    std::string t(util::trim(piece));
    if (to_lower(t).rfind("and ", 0) == 0) t = t.substr(4);
    const std::string lower = to_lower(t);
    for (const char* surf : {"floor", "wall", "ceiling", "door", "window"}) {
      if (lower.find(surf) != std::string::npos) {
        kept.push_back(t);
        break;
      }
    }
  }
  std::string out;
  for (std::size_t i = 0; i < kept.size(); ++i) out += (i ? ", " : "") + kept[i];
  return out;
}

std::string room_type(const std::string& lower) {
  static const std::vector<std::pair<const char*, const char*>> kinds = {
      {"living room", "living room"}, {"living", "living room"}, {"dining room", "dining room"},
      {"kitchen", "kitchen"},         {"office", "office"},      {"study", "office"},
      {"bathroom", "bathroom"},       {"bedroom", "bedroom"}};
  for (const auto& [word, kind] : kinds) {
    if (lower.find(word) != std::string::npos) return kind;
  }
  return "bedroom";
}

std::string canonical_program(const std::string& instruction) {
  const std::string lower = to_lower(instruction);
  std::string tex = texture_fragment(instruction);
  if (tex.empty()) tex = instruction;
  std::string out;
  out += "SHAPE0=GenShape(instruction=" + quote(shape_fragment(instruction)) + ")\n";
  out += "LAYOUT0=GenLayout(shape=SHAPE0)\n";
  out += "DEPTH0=GenDepth(shape=SHAPE0)\n";
  out += "SEMANTIC0=GenSemantic(layout=LAYOUT0)\n";
  out += "TEXTURE0=GenTexture(layout=LAYOUT0, depth=DEPTH0, semantic=SEMANTIC0, instruction=" + quote(tex) + ")\n";
  out += "ROOM0=GenEmptyRoom(texture=TEXTURE0, depth=DEPTH0)\n";
  if (has_any(lower, {"furnish", "furniture", "furnished"})) {
    out += "FURNITURE0=GenFurniture(shape=SHAPE0, room_type=" + quote(room_type(lower)) + ")\n";
    out += "SCENE0=Merge(room=ROOM0, furniture=FURNITURE0)\n";
  }
  return out;
}

std::string edit_program(const std::string& instruction, const Bound& b) {
  const std::string lower = to_lower(instruction);
  const std::string q = quote(instruction);

  static const std::regex furniture_word(
      R"(\b(bed|nightstand|wardrobe|desk|chair|table|sofa|dresser|bookshelf|armchair|cabinet|stool|shelf)s?\b)");
  const bool names_furniture = std::regex_search(lower, furniture_word);
  if (b.has("FURNITURE") && names_furniture &&
      (has_any(lower, {"remove", "delete", "add", "put", "place"}) ||
       std::regex_search(lower, std::regex(R"(\breplace\b.*\bwith\b)")))) {
    return b.next("FURNITURE") + "=EditFurniture(furniture=" + b.last("FURNITURE") + ", instruction=" + q + ")\n";
  }

  auto merge_line = [&](const std::string& room) {
    if (!b.has("FURNITURE")) return std::string();
    return b.next("SCENE") + "=Merge(room=" + room + ", furniture=" + b.last("FURNITURE") + ")\n";
  };

  if (b.has("SHAPE") && b.has("LAYOUT") && b.has("DEPTH") && b.has("SEMANTIC") && b.has("TEXTURE") &&
      b.has("ROOM") &&
      (has_any(lower, {"width", "length", "height", "scale", "resize", "wider", "longer", "narrower", "shorter"}) ||
       (util::contains_word(lower, "ceiling") && has_any(lower, {"raise", "lower", "higher"})))) {
    const std::string shape = b.next("SHAPE"), layout = b.next("LAYOUT"), depth = b.next("DEPTH"),
                      sem = b.next("SEMANTIC"), tex = b.next("TEXTURE"), room = b.next("ROOM");
    std::string out;
    out += shape + "=EditShape(shape=" + b.last("SHAPE") + ", instruction=" + q + ")\n";
    out += layout + "=EditLayout(layout=" + b.last("LAYOUT") + ", shape=" + shape + ")\n";
    out += depth + "=EditDepth(depth=" + b.last("DEPTH") + ", shape=" + shape + ")\n";
    out += sem + "=EditSemantic(semantic=" + b.last("SEMANTIC") + ", layout=" + layout + ")\n";
    out += tex + "=EditTexture(texture=" + b.last("TEXTURE") + ", layout=" + layout + ", depth=" + depth +
           ", semantic=" + sem + ")\n";
    out += room + "=EditEmptyRoom(room=" + b.last("ROOM") + ", texture=" + tex + ", depth=" + depth + ")\n";
    return out + merge_line(room);
  }

  static const std::vector<const char*> surface_words = {
      "floor",  "wall",  "walls", "ceiling", "door",   "window", "color", "colour",  "texture", "paint",
      "tiles",  "tile",  "wood",  "wooden",  "planks", "carpet", "marble", "stripes", "striped"};
  bool texture_edit = false;
  for (const char* w : surface_words) texture_edit = texture_edit || util::contains_word(lower, w);
  if (texture_edit && b.has("TEXTURE") && b.has("ROOM")) {
    const std::string tex = b.next("TEXTURE"), room = b.next("ROOM");
    std::string out;
    out += tex + "=EditTexture(texture=" + b.last("TEXTURE") + ", instruction=" + q + ")\n";
    out += room + "=EditEmptyRoom(room=" + b.last("ROOM") + ", texture=" + tex + ")\n";
    return out + merge_line(room);
  }
  return kProse;
}

std::string program_reply(const PromptBundle& p) {
  const std::string instruction = instruction_of(p);
  const Bound b = parse_variables(p);
  std::smatch m;
  static const std::regex session(R"(\bsession ([A-Za-z0-9_-]+))");
  if (b.latest.empty() && std::regex_search(instruction, m, session))
    return "SESSION0=LoadRoom(session=" + quote(m[1]) + ")\n";
  if (b.latest.empty()) return "```\n" + canonical_program(instruction) + "```";
  return edit_program(instruction, b);
}

// ---- shape tasks ----

const std::string kNum = R"((\d+(?:\.\d+)?))";

std::optional<std::pair<double, double>> dims(const std::string& lower) {
  static const std::regex re(kNum + R"( *(?:m|meters?|metres?)? *(?:by|x) *)" + kNum);
  std::smatch m;
  if (!std::regex_search(lower, m, re)) return std::nullopt;
  return std::pair{std::stod(m[1]), std::stod(m[2])};
}

std::optional<double> height_in(const std::string& lower) {
  static const std::regex re(R"((?:height|ceiling)(?: of| is| at)? *)" + kNum + R"( *m)");
  static const std::regex re2(kNum + R"( *(?:m|meters?|metres?) *(?:high|tall|ceiling))");
  std::smatch m;
  if (std::regex_search(lower, m, re) || std::regex_search(lower, m, re2)) return std::stod(m[1]);
  return std::nullopt;
}

std::string shape_reply(const PromptBundle& p) {
  const std::string lower = to_lower(instruction_of(p));
  geometry::RoomShape s;
  s.ceiling_height = height_in(lower).value_or(2.8);
  const auto d = dims(lower).value_or(std::pair{4.0, 4.0});
  const double a = d.first, b = d.second;
  std::smatch m;
  if (lower.find("l-shaped") != std::string::npos || lower.find("l shaped") != std::string::npos) {
    double c = std::min(a, b) / 2;
    if (std::regex_search(lower, m, std::regex(kNum + R"( *(?:m|meters?|metres?)? *notch)"))) c = std::stod(m[1]);
    s.floor_corners = {{0, 0}, {a, 0}, {a, b - c}, {a - c, b - c}, {a - c, b}, {0, b}};
  } else {
    s.floor_corners = {{0, 0}, {a, 0}, {a, b}, {0, b}};
  }
  return geometry::serialize_shape(s);
}

std::string shape_edit_reply(const PromptBundle& p) {
  const auto current = prompt_section(p.user, "Current shape");
  if (!current) return "No current shape was given.";
  geometry::RoomShape s = geometry::parse_shape(*current);
  const std::string lower = to_lower(instruction_of(p));
  const auto bounds = geometry::plan_bounds(s.floor_corners);
  double sx = 1, sy = 1;
  std::smatch m;
  const auto amount = [&](const std::string& pattern) {
    return std::regex_search(lower, m, std::regex(pattern)) ? std::optional<double>(std::stod(m[1])) : std::nullopt;
  };
  const std::string by = R"(\bby *)" + kNum;
  const double sign = has_any(lower, {"decrease", "reduce", "shrink", "lower"}) ? -1.0 : 1.0;

  if (auto to = amount(R"((?:scale|resize)(?: it| the room)? to *)" + kNum + R"( *m? *(?:by|x) *(\d+(?:\.\d+)?))")) {
    sx = *to / bounds.extent().x();
    sy = std::stod(m[2]) / bounds.extent().y();
  } else if (auto h = amount(R"((?:ceiling|height)\b.*\bto *)" + kNum)) {
    s.ceiling_height = *h;
  } else if (auto d = amount(by)) {
    if (util::contains_word(lower, "width")) sx = (bounds.extent().x() + sign * *d) / bounds.extent().x();
    else if (util::contains_word(lower, "length")) sy = (bounds.extent().y() + sign * *d) / bounds.extent().y();
    else if (has_any(lower, {"height", "ceiling"})) s.ceiling_height += sign * *d;
    else return "I could not tell which dimension to change.";
  } else {
    return "I could not find an amount in the instruction.";
  }
  sx = std::max(sx, 0.0);
  sy = std::max(sy, 0.0);
  for (auto& c : s.floor_corners) {
    c.x() = bounds.min.x() + (c.x() - bounds.min.x()) * sx;
    c.y() = bounds.min.y() + (c.y() - bounds.min.y()) * sy;
  }
  return geometry::serialize_shape(s);
}

// ---- furniture tasks ----

struct Box {
  std::string selector;
  std::map<std::string, double> props;
};

double css_number(const std::string& v) {
  std::string s(util::trim(v));
  for (const char* unit : {"deg", "m"}) {
    const std::string u = unit;
    if (s.size() > u.size() && s.compare(s.size() - u.size(), u.size(), u) == 0) {
      s.resize(s.size() - u.size());
      break;
    }
  }
  double out = 0;
  if (!util::parse_number(s, out)) throw std::invalid_argument("bad number " + v);
  return out;
}

// Lenient reader for the CSS blocks in prompts.
std::vector<Box> read_css(const std::string& text) {
  static const std::regex stanza(R"(([A-Za-z][\w-]*)\s*\{([^}]*)\})");
  static const std::regex prop(R"(([a-z_]+)\s*:\s*([^;]+);?)");
  std::vector<Box> out;
  const std::string clean = std::regex_replace(text, std::regex(R"(/\*[\s\S]*?\*/)"), "");
  for (auto it = std::sregex_iterator(clean.begin(), clean.end(), stanza); it != std::sregex_iterator(); ++it) {
    Box b;
    b.selector = (*it)[1];
    const std::string body = (*it)[2];
    for (auto pt = std::sregex_iterator(body.begin(), body.end(), prop); pt != std::sregex_iterator(); ++pt) {
      b.props[(*pt)[1]] = css_number((*pt)[2]);
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::string len(double v) {
  std::string s = format_number(v);
  const auto dot = s.find('.');
  if (dot == std::string::npos) return s + ".00m";
  while (s.size() - dot - 1 < 2) s += '0';
  return s + "m";
}

const Box* find_room(const std::vector<Box>& boxes) {
  for (const Box& b : boxes) {
    if (b.selector == "room") return &b;
  }
  return nullptr;
}

std::string furniture_reply(const PromptBundle& p) {
  const auto room_text = prompt_section(p.user, "Room");
  if (!room_text || p.assistant.empty()) return "There is no example to follow.";
  const auto target_boxes = read_css(*room_text);
  const Box* target = find_room(target_boxes);
  const std::string& ex_text = p.assistant.front();
  const auto label = ex_text.find("Layout:\n");
  const auto ex = read_css(label == std::string::npos ? ex_text : ex_text.substr(label));
  const Box* source = find_room(ex);
  if (!target || !source) return "The room stanza is missing.";

  const auto& t = target->props;
  const auto& s = source->props;
  const bool same = t.at("length") == s.at("length") && t.at("width") == s.at("width") &&
                    t.at("left") == s.at("left") && t.at("top") == s.at("top");
  if (same) return ex_text.substr(label == std::string::npos ? 0 : label + 8);

  const double fx = t.at("length") / s.at("length"), fy = t.at("width") / s.at("width");
  std::string out = "room { length: " + len(t.at("length")) + "; width: " + len(t.at("width")) +
                    "; left: " + len(t.at("left")) + "; top: " + len(t.at("top")) + "; }\n";
  for (const Box& b : ex) {
    if (&b == source) continue;
    const double left = t.at("left") + (b.props.at("left") - s.at("left")) * fx;
    const double top = t.at("top") + (b.props.at("top") - s.at("top")) * fy;
    const auto round2 = [](double v) { return std::round(v * 100) / 100; };
    out += b.selector + " { length: " + len(b.props.at("length")) + "; width: " + len(b.props.at("width")) +
           "; height: " + len(b.props.at("height")) + "; left: " + len(round2(left)) +
           "; top: " + len(round2(top)) + "; orientation: " + format_number(b.props.at("orientation")) + "deg; }\n";
  }
  return out;
}

struct Rect {
  Vec2 c;
  double hx, hy, angle;

  std::array<Vec2, 4> corners() const {
    const double ca = std::cos(angle), sa = std::sin(angle);
    std::array<Vec2, 4> out;
    const double sx[4] = {-1, 1, 1, -1}, sy[4] = {-1, -1, 1, 1};
    for (int k = 0; k < 4; ++k) {
      const double x = sx[k] * hx, y = sy[k] * hy;
      out[k] = c + Vec2(ca * x - sa * y, sa * x + ca * y);
    }
    return out;
  }
};

bool overlap(const Rect& a, const Rect& b) {
  const auto ca = a.corners(), cb = b.corners();
  for (const Rect* r : {&a, &b}) {
    for (int k = 0; k < 2; ++k) {
      const double ang = r->angle + k * geometry::kPi / 2;
      const Vec2 axis(std::cos(ang), std::sin(ang));
      double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
      for (const Vec2& v : ca) amin = std::min(amin, axis.dot(v)), amax = std::max(amax, axis.dot(v));
      for (const Vec2& v : cb) bmin = std::min(bmin, axis.dot(v)), bmax = std::max(bmax, axis.dot(v));
      if (amax <= bmin + 1e-9 || bmax <= amin + 1e-9) return false;
    }
  }
  return true;
}

std::string furniture_edit_reply(const PromptBundle& p) {
  const std::string lower = to_lower(instruction_of(p));
  const auto item_text = prompt_section(p.user, "New item");
  const auto layout_text = prompt_section(p.user, "Current layout");
  if (!item_text || !layout_text) return "I need the current layout and the new item.";
  const auto items = read_css(*item_text);
  if (items.empty()) return "The new item is missing.";
  const Box& item = items.front();
  const auto layout = read_css(*layout_text);
  const std::string head = item.selector + " { length: " + len(item.props.at("length")) +
                           "; width: " + len(item.props.at("width")) + "; height: " + len(item.props.at("height"));

  static const std::regex replace_re(R"(replace ([a-z]+-\d+))");
  std::smatch m;
  if (std::regex_search(lower, m, replace_re)) {
    for (const Box& b : layout) {
      if (b.selector == m[1].str()) {
        return head + "; orientation: " + format_number(b.props.at("orientation")) + "deg; }\n";
      }
    }
    return head + "; orientation: 0deg; }\n";
  }

  const Box* room = find_room(layout);
  if (!room) return "The room stanza is missing.";
  const double cx = room->props.at("left"), cy = room->props.at("top");
  const double rl = room->props.at("length"), rw = room->props.at("width");
  std::vector<Rect> placed;
  for (const Box& b : layout) {
    if (&b == room) continue;
    placed.push_back({{b.props.at("left"), b.props.at("top")}, b.props.at("length") / 2, b.props.at("width") / 2,
                      b.props.at("orientation") * geometry::kPi / 180});
  }
  if (placed.empty()) return head + "; left: " + len(cx) + "; top: " + len(cy) + "; orientation: 0deg; }\n";

  std::vector<Vec2> polygon;
  if (const auto corners = prompt_section(p.user, "Room corners")) {
    for (const std::string& line : util::split_lines(*corners)) {
      std::istringstream in(line);
      double x, y;
      if (in >> x >> y) polygon.emplace_back(x, y);
    }
  }
  const double hx = item.props.at("length") / 2, hy = item.props.at("width") / 2;
  // scan candidates on a 5 cm grid, nearest to the room center first
  std::vector<Vec2> candidates;
  const int nx = static_cast<int>(std::floor(rl / 0.05)), ny = static_cast<int>(std::floor(rw / 0.05));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      candidates.emplace_back(std::round((cx - rl / 2 + i * 0.05) * 100) / 100,
                              std::round((cy - rw / 2 + j * 0.05) * 100) / 100);
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](const Vec2& a, const Vec2& b) {
    return (a - Vec2(cx, cy)).squaredNorm() < (b - Vec2(cx, cy)).squaredNorm();
  });
  for (const Vec2& c : candidates) {
    const Rect r{c, hx, hy, 0.0};
    bool ok = true;
    for (const Vec2& k : r.corners()) {
      if (polygon.size() >= 3 ? !geometry::point_in_polygon(polygon, k)
                              : (std::abs(k.x() - cx) > rl / 2 || std::abs(k.y() - cy) > rw / 2)) {
        ok = false;
        break;
      }
    }
    for (const Rect& o : placed) ok = ok && !overlap(r, o);
    if (ok) return head + "; left: " + len(c.x()) + "; top: " + len(c.y()) + "; orientation: 0deg; }\n";
  }
  return "There is no free space for that item.";
}

}  // namespace

std::string MockBackend::complete(const PromptBundle& prompt, const DecodeParams&) const {
  const std::string task = task_of(prompt);
  try {
    if (task == "program") return program_reply(prompt);
    if (task == "shape") return shape_reply(prompt);
    if (task == "shape_edit") return shape_edit_reply(prompt);
    if (task == "furniture") return furniture_reply(prompt);
    if (task == "furniture_edit") return furniture_edit_reply(prompt);
  } catch (const std::exception& e) {
    return std::string("I could not read the request: ") + e.what();
  }
  throw LlmError(LlmError::Kind::invalid_input, "mock backend: unknown task \"" + task + "\"");
}

}  // namespace proom::llm
