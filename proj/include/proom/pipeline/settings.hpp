#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "proom/pipeline/engine.hpp"

namespace proom::pipeline {

/// Everything the command-line tool needs.
struct Settings {
  EngineOptions engine;
  std::filesystem::path store = "proom-store";
  std::string host = "127.0.0.1";
  int port = 8080;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Config file keys (all optional):
///   data_dir, prompt_dir, store, grid_width, mesh_degrees, seed, temperature,
///   llm: {backend, endpoint, model, api_key_env, timeout_ms},
///   texture: {backend, endpoint, timeout_ms},
///   server: {host, port}
/// Unknown keys are errors.
void apply_config(Settings& settings, const nlohmann::json& config);

/// PROOM_DATA_DIR, PROOM_PROMPTS, PROOM_STORE, PROOM_GRID_WIDTH,
/// PROOM_MESH_DEGREES, PROOM_SEED, PROOM_LLM, PROOM_LLM_ENDPOINT,
/// PROOM_LLM_MODEL, PROOM_LLM_API_KEY, PROOM_TEXTURE, PROOM_TEXTURE_ENDPOINT,
/// PROOM_HOST, PROOM_PORT.
void apply_environment(Settings& settings, const EnvLookup& env);

/// Defaults, then the config file (if any), then the environment.
Settings load_settings(const std::optional<std::filesystem::path>& config_file, const EnvLookup& env,
                       Settings defaults = {});

}  // namespace proom::pipeline
