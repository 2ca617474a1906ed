#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "proom/dsl/runtime.hpp"
#include "proom/furniture/generate.hpp"
#include "proom/llm/chat.hpp"
#include "proom/llm/prompt_pack.hpp"
#include "proom/pipeline/values.hpp"
#include "proom/texture/backend.hpp"

namespace proom::pipeline {

struct PipelineConfig {
  geometry::PanoramaGrid grid{512, 256};
  double mesh_degrees = mesh::kDefaultSubdivisionDegrees;
  std::uint64_t seed = 0;
  llm::DecodeParams decode{};
};

/// Loads the bindings of a stored session for LoadRoom.
using RoomLoader = std::function<dsl::Environment(const std::string& session, SessionValue& info)>;

/// Everything the module handlers call into. Must outlive the registry.
struct Services {
  const llm::ChatBackend& chat;
  const llm::PromptPack& prompts;
  const texture::TextureBackend& texture;
  const std::vector<furniture::ExampleLayout>& furniture_bank;
  const furniture::AssetManifest& assets;
  PipelineConfig config{};
  RoomLoader load_room{};
};

/// Names of the registered modules, in the order they are registered.
const std::vector<std::string>& module_names();

/// Registry with GenShape, GenLayout, GenDepth, GenSemantic, GenTexture,
/// GenEmptyRoom, GenFurniture, EditShape, EditLayout, EditDepth, EditSemantic,
/// EditTexture, EditEmptyRoom, EditFurniture, LoadRoom and Merge.
dsl::ModuleRegistry make_registry(const Services& services);

/// Signatures only; handlers throw. Enough for parsing and typechecking.
dsl::ModuleRegistry signature_registry();

}  // namespace proom::pipeline
