#include "proom/pipeline/engine.hpp"

#include <stdexcept>

namespace proom::pipeline {

namespace {

std::unique_ptr<llm::ChatBackend> make_chat(const EngineOptions& o) {
  if (o.llm == "mock") return std::make_unique<llm::MockBackend>();
  if (o.llm == "http") return std::make_unique<llm::HttpChatBackend>(o.llm_http);
  throw std::invalid_argument("unknown llm backend '" + o.llm + "' (expected mock or http)");
}

std::unique_ptr<texture::TextureBackend> make_texture(const EngineOptions& o) {
  if (o.texture == "procedural") return std::make_unique<texture::ProceduralBackend>();
  if (o.texture == "remote") {
    if (o.texture_endpoint.empty()) throw std::invalid_argument("remote texture backend needs an endpoint");
    return std::make_unique<texture::RemoteBackend>(o.texture_endpoint,
                                                    std::chrono::milliseconds(o.texture_timeout_ms));
  }
  throw std::invalid_argument("unknown texture backend '" + o.texture + "' (expected procedural or remote)");
}

}  // namespace

Engine::Engine(EngineOptions options)
    : options_(std::move(options)),
      chat_(make_chat(options_)),
      texture_(make_texture(options_)),
      prompts_(llm::load_prompt_pack(options_.prompt_dir.empty() ? options_.data_dir / "prompts"
                                                                 : options_.prompt_dir)),
      bank_(furniture::load_example_bank(options_.data_dir / "furniture" / "examples")),
      assets_(furniture::load_asset_manifest(options_.data_dir / "assets" / "manifest.json")) {
  options_.config.grid.validate();
  services_ = std::make_unique<Services>(Services{*chat_, prompts_, *texture_, bank_, assets_, options_.config, {}});
  registry_ = make_registry(*services_);
}

void Engine::set_room_loader(RoomLoader loader) { services_->load_room = std::move(loader); }

}  // namespace proom::pipeline
