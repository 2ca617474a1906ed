#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "proom/furniture/layout.hpp"
#include "proom/furniture/scene.hpp"
#include "proom/llm/chat.hpp"
#include "proom/llm/prompt_pack.hpp"

namespace proom::furniture {

struct ExampleLayout {
  std::string name;       // file stem
  std::string room_type;  // from a leading "/* room_type: ... */" comment
  FurnitureLayout layout;
};

/// Every *.css file in `dir`, sorted by name.
std::vector<ExampleLayout> load_example_bank(const std::filesystem::path& dir);

/// Largest per-axis difference of the plan extents.
double extent_distance(const RoomExtents& a, const RoomExtents& b);

/// Up to `count` examples of the room type, nearest extents first (ties by
/// name); when none of them is within 0.5 m, the nearest example of any type
/// is appended. Falls back to all types when the type has no examples.
std::vector<const ExampleLayout*> select_examples(const std::vector<ExampleLayout>& bank,
                                                  const std::string& room_type, const RoomExtents& room,
                                                  std::size_t count = 3);

struct FurnitureResult {
  FurnitureLayout layout;
  std::vector<std::string> warnings;
};

struct FurnitureContext {
  const llm::ChatBackend& backend;
  const llm::PromptPack& prompts;
  const std::vector<ExampleLayout>& bank;
  const AssetManifest& assets;
  llm::DecodeParams params{};
};

/// Asks the backend for a layout of `shape`. Items whose footprint leaves the
/// polygon are dropped with a warning; overlaps are warned about. The result's
/// room stanza is the shape's plan bbox with the polygon as outline. Throws
/// llm::LlmError(malformed) when the reply is not a layout.
FurnitureResult gen_furniture(const geometry::RoomShape& shape, const std::string& room_type,
                              const FurnitureContext& ctx);

struct EditCommand {
  enum class Kind { add, replace, remove };
  Kind kind = Kind::add;
  std::string category;  // target for replace/remove, new item for add
  std::optional<int> index;
  std::string replacement;  // new category for replace
};

/// "remove the bed", "delete chair-1", "replace the table with a wardrobe",
/// "add a chair". Plurals of known categories are singularized. Throws
/// FurnitureError(invalid) for anything else.
EditCommand parse_edit_command(const std::string& instruction);

/// Remove deletes exactly the target (lowest index when none is given).
/// Add and Replace ask the backend for the new stanza; Replace keeps the old
/// item's position when the reply has none, and takes the old slot in the
/// item list. An Add proposal outside the room is retried once, then fails
/// with FurnitureError(containment).
FurnitureResult edit_furniture(const FurnitureLayout& layout, const EditCommand& command,
                               const FurnitureContext& ctx);

}  // namespace proom::furniture
