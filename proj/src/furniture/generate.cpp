#include "proom/furniture/generate.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "proom/util/text.hpp"

namespace proom::furniture {

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FurnitureError(FurnitureError::Kind::not_found, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string room_stanza(const RoomExtents& r) {
  FurnitureLayout only;
  only.room = r;
  only.room.outline.clear();
  return serialize_furniture_css(only);
}

std::string without_outline(FurnitureLayout layout) {
  layout.room.outline.clear();
  return serialize_furniture_css(layout);
}

std::string corners_section(const std::vector<Vec2>& polygon) {
  std::string s = "Room corners:\n";
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    s += util::format_number(polygon[i].x()) + " " + util::format_number(polygon[i].y());
    if (i + 1 < polygon.size()) s += "\n";
  }
  return s;
}

std::string chomp(std::string s) {
  while (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

std::string describe_extents(const RoomExtents& r) {
  return format_length(r.length) + "m by " + format_length(r.width) + "m";
}

std::string singular(std::string word) {
  if (word.size() > 3 && word.compare(word.size() - 3, 3, "ves") == 0) return word.substr(0, word.size() - 3) + "f";
  if (word.size() > 2 && word.back() == 's' && word[word.size() - 2] != 's') word.pop_back();
  return word;
}

}  // namespace

std::vector<ExampleLayout> load_example_bank(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".css") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  static const std::regex type_re(R"(/\*\s*room_type:\s*([a-z ]+?)\s*\*/)");
  std::vector<ExampleLayout> out;
  for (const auto& f : files) {
    const std::string text = read_file(f);
    ExampleLayout ex;
    ex.name = f.stem().string();
    std::smatch m;
    ex.room_type = std::regex_search(text, m, type_re) ? m[1].str() : "room";
    try {
      ex.layout = parse_furniture_css(text);
    } catch (const FurnitureError& e) {
      throw FurnitureError(e.kind(), f.filename().string() + ": " + e.what());
    }
    out.push_back(std::move(ex));
  }
  return out;
}

double extent_distance(const RoomExtents& a, const RoomExtents& b) {
  return std::max(std::abs(a.length - b.length), std::abs(a.width - b.width));
}

std::vector<const ExampleLayout*> select_examples(const std::vector<ExampleLayout>& bank,
                                                  const std::string& room_type, const RoomExtents& room,
                                                  std::size_t count) {
  auto nearest_first = [&](std::vector<const ExampleLayout*>& v) {
    std::stable_sort(v.begin(), v.end(), [&](const ExampleLayout* a, const ExampleLayout* b) {
      const double da = extent_distance(a->layout.room, room), db = extent_distance(b->layout.room, room);
      if (da != db) return da < db;
      return a->name < b->name;
    });
  };
  std::vector<const ExampleLayout*> all, typed;
  for (const auto& ex : bank) {
    all.push_back(&ex);
    if (ex.room_type == room_type) typed.push_back(&ex);
  }
  nearest_first(all);
  nearest_first(typed);
  std::vector<const ExampleLayout*> out = typed.empty() ? all : typed;
  if (out.size() > count) out.resize(count);
  const bool close = std::any_of(out.begin(), out.end(),
                                 [&](const ExampleLayout* e) { return extent_distance(e->layout.room, room) <= 0.5; });
  if (!close && !all.empty() && std::find(out.begin(), out.end(), all.front()) == out.end())
    out.push_back(all.front());
  return out;
}

FurnitureResult gen_furniture(const geometry::RoomShape& shape, const std::string& room_type,
                              const FurnitureContext& ctx) {
  const RoomExtents room = extents_of(shape);
  std::vector<llm::Example> examples;
  for (const ExampleLayout* ex : select_examples(ctx.bank, room_type, room)) {
    examples.push_back({"furnish a " + ex->room_type + " of " + describe_extents(ex->layout.room),
                        "Room:\n" + chomp(room_stanza(ex->layout.room)), chomp(without_outline(ex->layout))});
  }
  const std::string context =
      "Room:\n" + chomp(room_stanza(room)) + "\n\n" + corners_section(shape.floor_corners);
  const llm::PromptBundle prompt = llm::assemble_prompt(
      ctx.prompts.furniture.system, examples, "furnish a " + room_type + " of " + describe_extents(room), context,
      "Layout");
  const std::string reply = ctx.backend.complete(prompt, ctx.params);

  FurnitureResult result;
  FurnitureLayout proposed;
  try {
    proposed = parse_furniture_css(llm::strip_code_fences(reply));
  } catch (const FurnitureError& e) {
    throw llm::LlmError(llm::LlmError::Kind::malformed, std::string("furniture reply: ") + e.what(),
                        {prompt.render() + "[completion]\n" + reply + "\n"});
  }
  result.layout.room = room;
  for (const FurnitureItem& it : proposed.items) {
    if (!inside(shape.floor_corners, it)) {
      result.warnings.push_back("dropped " + it.selector() + ": footprint leaves the room");
      continue;
    }
    result.layout.items.push_back(it);
  }
  for (const Violation& v : containment_report(shape, result.layout)) result.warnings.push_back(v.message);
  return result;
}

EditCommand parse_edit_command(const std::string& instruction) {
  const std::string s = util::to_lower(instruction);
  static const std::string article = R"((?:the |a |an |another |one )?)";
  static const std::string target = R"(([a-z_]+)(?:[- ](\d+))?)";
  static const std::regex remove_re(R"(\b(?:remove|delete|take out|get rid of) )" + article + target);
  static const std::regex replace_re(R"(\b(?:replace|swap) )" + article + target + R"( (?:with|for) )" + article +
                                     R"(([a-z_]+))");
  static const std::regex add_re(R"(\b(?:add|put|place|insert) )" + article + R"(([a-z_]+))");
  std::smatch m;
  EditCommand c;
  if (std::regex_search(s, m, replace_re)) {
    c.kind = EditCommand::Kind::replace;
    c.category = singular(m[1]);
    if (m[2].matched) c.index = std::stoi(m[2]);
    c.replacement = singular(m[3]);
    return c;
  }
  if (std::regex_search(s, m, remove_re)) {
    c.kind = EditCommand::Kind::remove;
    c.category = singular(m[1]);
    if (m[2].matched) c.index = std::stoi(m[2]);
    return c;
  }
  if (std::regex_search(s, m, add_re)) {
    c.kind = EditCommand::Kind::add;
    c.category = singular(m[1]);
    return c;
  }
  throw FurnitureError(FurnitureError::Kind::invalid, "not a furniture edit: \"" + instruction + "\"");
}

namespace {

const FurnitureItem& resolve(const FurnitureLayout& layout, const EditCommand& c) {
  const FurnitureItem* it = c.index ? layout.find(c.category, *c.index) : layout.find_first(c.category);
  if (!it)
    throw FurnitureError(FurnitureError::Kind::not_found,
                         "no " + (c.index ? c.category + "-" + std::to_string(*c.index) : c.category) +
                             " in the layout");
  return *it;
}

struct Proposal {
  FurnitureItem item;
  bool positioned = false;
};

Proposal read_proposal(const std::string& reply, const FurnitureItem& base) {
  Proposal p{base, false};
  const auto stanzas = parse_stanzas(llm::strip_code_fences(reply));
  const Stanza* st = nullptr;
  for (const auto& s : stanzas) {
    if (s.selector == base.selector()) st = &s;
  }
  if (!st) {
    for (const auto& s : stanzas) {
      if (s.selector != "room") {
        st = &s;
        break;
      }
    }
  }
  if (!st) throw FurnitureError(FurnitureError::Kind::syntax, "reply has no stanza");
  auto number = [&](const char* name, const char* unit, double& out) {
    if (const std::string* v = st->get(name)) {
      out = css_value(*v, unit);
      return true;
    }
    return false;
  };
  number("length", "m", p.item.length);
  number("width", "m", p.item.width);
  number("height", "m", p.item.height);
  if (number("orientation", "deg", p.item.orientation)) {
    p.item.orientation = std::fmod(p.item.orientation, 360.0);
    if (p.item.orientation < 0) p.item.orientation += 360.0;
    if (p.item.orientation >= 360.0) p.item.orientation = 0.0;
  }
  const bool has_left = number("left", "m", p.item.left);
  const bool has_top = number("top", "m", p.item.top);
  p.positioned = has_left && has_top;
  if (p.item.length <= 0 || p.item.width <= 0 || p.item.height <= 0)
    throw FurnitureError(FurnitureError::Kind::invalid, "proposed dimensions must be positive");
  return p;
}

}  // namespace

FurnitureResult edit_furniture(const FurnitureLayout& layout, const EditCommand& command,
                               const FurnitureContext& ctx) {
  FurnitureResult result;
  result.layout = layout;
  auto& items = result.layout.items;
  const std::vector<Vec2> polygon = room_polygon(layout.room);

  if (command.kind == EditCommand::Kind::remove) {
    const FurnitureItem& gone = resolve(layout, command);
    items.erase(items.begin() + (&gone - layout.items.data()));
    return result;
  }

  const std::string category =
      command.kind == EditCommand::Kind::add ? command.category : command.replacement;
  const AssetEntry& asset = ctx.assets.at(category);
  FurnitureItem fresh;
  fresh.category = category;
  fresh.index = layout.next_index(category);
  fresh.length = asset.dims.x();
  fresh.width = asset.dims.y();
  fresh.height = asset.dims.z();

  const FurnitureItem* old = command.kind == EditCommand::Kind::replace ? &resolve(layout, command) : nullptr;
  if (old) {
    fresh.left = old->left;
    fresh.top = old->top;
    fresh.orientation = old->orientation;
  }
  const std::string instruction =
      old ? "replace " + old->selector() + " with " + category : "add " + category;
  std::string context = "Current layout:\n" + chomp(without_outline(layout)) + "\n\n" + corners_section(polygon) +
                        "\n\nNew item:\n" + fresh.selector() + " { length: " + format_length(fresh.length) +
                        "m; width: " + format_length(fresh.width) + "m; height: " + format_length(fresh.height) +
                        "m; }";
  llm::PromptBundle prompt = llm::assemble_prompt(ctx.prompts.furniture_edit.system,
                                                  ctx.prompts.furniture_edit.examples, instruction, context, "Answer");

  for (int attempt = 1; attempt <= 2; ++attempt) {
    const std::string reply = ctx.backend.complete(prompt, ctx.params);
    std::string problem;
    Proposal p;
    try {
      p = read_proposal(reply, fresh);
    } catch (const FurnitureError& e) {
      problem = e.what();
    }
    if (problem.empty()) {
      if (old) {
        if (!p.positioned) {
          p.item.left = old->left;
          p.item.top = old->top;
        }
        items[&*old - layout.items.data()] = p.item;
        for (const Violation& v : containment_report(result.layout)) {
          if (v.item == p.item.selector() || v.other == p.item.selector()) result.warnings.push_back(v.message);
        }
        return result;
      }
      if (!p.positioned) problem = "the proposal has no position";
      else if (!inside(polygon, p.item)) problem = "the proposal leaves the room";
    }
    if (problem.empty()) {
      items.push_back(p.item);
      for (const Violation& v : containment_report(result.layout)) {
        if (v.item == p.item.selector() || v.other == p.item.selector()) result.warnings.push_back(v.message);
      }
      return result;
    }
    if (attempt == 2 || old) {
      throw FurnitureError(old ? FurnitureError::Kind::syntax : FurnitureError::Kind::containment,
                           "cannot " + instruction + ": " + problem);
    }
    prompt.user += "\n\nYour previous answer:\n" + reply + "\n\nProblem: " + problem + ". Answer again.";
  }
  return result;
}

}  // namespace proom::furniture
