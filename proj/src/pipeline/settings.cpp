#include "proom/pipeline/settings.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>

#include "proom/util/text.hpp"

namespace proom::pipeline {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const auto& [k, _] : j.items()) {
    if (!allowed.count(k)) throw std::invalid_argument("unknown config key " + where + "." + k);
  }
}

int to_int(const std::string& name, const std::string& text) {
  double v = 0;
  if (!util::parse_number(text, v) || v != static_cast<int>(v))
    throw std::invalid_argument(name + " must be an integer, got '" + text + "'");
  return static_cast<int>(v);
}

double to_double(const std::string& name, const std::string& text) {
  double v = 0;
  if (!util::parse_number(text, v)) throw std::invalid_argument(name + " must be a number, got '" + text + "'");
  return v;
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v) return std::nullopt;
  return std::string(v);
}

void apply_config(Settings& s, const json& c) {
  check_keys(c, "config", {"data_dir", "prompt_dir", "store", "grid_width", "mesh_degrees", "seed", "temperature",
                           "llm", "texture", "server"});
  EngineOptions& e = s.engine;
  if (c.contains("data_dir")) e.data_dir = c["data_dir"].get<std::string>();
  if (c.contains("prompt_dir")) e.prompt_dir = c["prompt_dir"].get<std::string>();
  if (c.contains("store")) s.store = c["store"].get<std::string>();
  if (c.contains("grid_width")) e.config.grid = geometry::make_grid(c["grid_width"].get<int>());
  if (c.contains("mesh_degrees")) e.config.mesh_degrees = c["mesh_degrees"].get<double>();
  if (c.contains("seed")) e.config.seed = c["seed"].get<std::uint64_t>();
  if (c.contains("temperature")) e.config.decode.temperature = c["temperature"].get<double>();
  if (c.contains("llm")) {
    const json& l = c["llm"];
    check_keys(l, "llm", {"backend", "endpoint", "model", "api_key_env", "timeout_ms"});
    if (l.contains("backend")) e.llm = l["backend"].get<std::string>();
    if (l.contains("endpoint")) e.llm_http.endpoint = l["endpoint"].get<std::string>();
    if (l.contains("model")) e.llm_http.model = l["model"].get<std::string>();
    if (l.contains("api_key_env")) {
      if (auto key = process_env(l["api_key_env"].get<std::string>())) e.llm_http.api_key = *key;
    }
    if (l.contains("timeout_ms")) e.llm_http.timeout = std::chrono::milliseconds(l["timeout_ms"].get<int>());
  }
  if (c.contains("texture")) {
    const json& t = c["texture"];
    check_keys(t, "texture", {"backend", "endpoint", "timeout_ms"});
    if (t.contains("backend")) e.texture = t["backend"].get<std::string>();
    if (t.contains("endpoint")) e.texture_endpoint = t["endpoint"].get<std::string>();
    if (t.contains("timeout_ms")) e.texture_timeout_ms = t["timeout_ms"].get<int>();
  }
  if (c.contains("server")) {
    const json& v = c["server"];
    check_keys(v, "server", {"host", "port"});
    if (v.contains("host")) s.host = v["host"].get<std::string>();
    if (v.contains("port")) s.port = v["port"].get<int>();
  }
}

void apply_environment(Settings& s, const EnvLookup& env) {
  EngineOptions& e = s.engine;
  if (auto v = env("PROOM_DATA_DIR")) e.data_dir = *v;
  if (auto v = env("PROOM_PROMPTS")) e.prompt_dir = *v;
  if (auto v = env("PROOM_STORE")) s.store = *v;
  if (auto v = env("PROOM_GRID_WIDTH")) e.config.grid = geometry::make_grid(to_int("PROOM_GRID_WIDTH", *v));
  if (auto v = env("PROOM_MESH_DEGREES")) e.config.mesh_degrees = to_double("PROOM_MESH_DEGREES", *v);
  if (auto v = env("PROOM_SEED")) e.config.seed = static_cast<std::uint64_t>(to_int("PROOM_SEED", *v));
  if (auto v = env("PROOM_LLM")) e.llm = *v;
  if (auto v = env("PROOM_LLM_ENDPOINT")) e.llm_http.endpoint = *v;
  if (auto v = env("PROOM_LLM_MODEL")) e.llm_http.model = *v;
  if (auto v = env("PROOM_LLM_API_KEY")) e.llm_http.api_key = *v;
  if (auto v = env("PROOM_TEXTURE")) e.texture = *v;
  if (auto v = env("PROOM_TEXTURE_ENDPOINT")) e.texture_endpoint = *v;
  if (auto v = env("PROOM_HOST")) s.host = *v;
  if (auto v = env("PROOM_PORT")) s.port = to_int("PROOM_PORT", *v);
}

Settings load_settings(const std::optional<std::filesystem::path>& config_file, const EnvLookup& env,
                       Settings defaults) {
  Settings s = std::move(defaults);
  if (config_file) {
    std::ifstream in(*config_file);
    if (!in) throw std::invalid_argument("cannot read config " + config_file->string());
    json c;
    try {
      c = json::parse(in);
    } catch (const json::exception& ex) {
      throw std::invalid_argument("bad config " + config_file->string() + ": " + ex.what());
    }
    try {
      apply_config(s, c);
    } catch (const json::exception& ex) {
      throw std::invalid_argument("bad config " + config_file->string() + ": " + ex.what());
    }
  }
  apply_environment(s, env);
  s.engine.config.grid.validate();
  return s;
}

}  // namespace proom::pipeline
