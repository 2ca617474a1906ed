#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "proom/pipeline/modules.hpp"

namespace proom::pipeline {

struct EngineOptions {
  std::filesystem::path data_dir;  // holds prompts/, assets/ and furniture/examples/
  std::filesystem::path prompt_dir;  // overrides data_dir/prompts when set
  PipelineConfig config{};

  std::string llm = "mock";  // mock | http
  llm::HttpChatConfig llm_http{};

  std::string texture = "procedural";  // procedural | remote
  std::string texture_endpoint;
  int texture_timeout_ms = 60000;
};

/// Owns the backends, prompt pack, example bank and asset manifest behind a
/// module registry.
class Engine {
 public:
  explicit Engine(EngineOptions options);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const EngineOptions& options() const { return options_; }
  const Services& services() const { return *services_; }
  const dsl::ModuleRegistry& registry() const { return registry_; }
  const llm::ChatBackend& chat() const { return *chat_; }
  const texture::TextureBackend& texture() const { return *texture_; }
  const llm::PromptPack& prompts() const { return prompts_; }
  const furniture::AssetManifest& assets() const { return assets_; }

  /// Installs the LoadRoom callback.
  void set_room_loader(RoomLoader loader);

 private:
  EngineOptions options_;
  std::unique_ptr<llm::ChatBackend> chat_;
  std::unique_ptr<texture::TextureBackend> texture_;
  llm::PromptPack prompts_;
  std::vector<furniture::ExampleLayout> bank_;
  furniture::AssetManifest assets_;
  std::unique_ptr<Services> services_;
  dsl::ModuleRegistry registry_;
};

}  // namespace proom::pipeline
