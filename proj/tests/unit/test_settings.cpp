#include <fstream>

#include "doctest.h"
#include "proom/pipeline/settings.hpp"
#include "../support/files.hpp"

using namespace proom;
using namespace proom::pipeline;

namespace {

EnvLookup fake_env(std::map<std::string, std::string> vars) {
  return [vars](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

}  // namespace

TEST_CASE("defaults survive an empty environment") {
  const Settings s = load_settings(std::nullopt, fake_env({}));
  CHECK(s.engine.llm == "mock");
  CHECK(s.engine.texture == "procedural");
  CHECK(s.engine.config.grid == geometry::PanoramaGrid{512, 256});
  CHECK(s.port == 8080);
}

TEST_CASE("config file then environment") {
  const auto dir = proom::testing::scratch_dir("settings");
  const auto cfg = dir / "proom.json";
  std::ofstream(cfg) << R"({"store": "/tmp/a", "grid_width": 256, "seed": 7,
    "llm": {"backend": "http", "endpoint": "http://x/v1/chat/completions", "model": "m"},
    "texture": {"backend": "remote", "endpoint": "http://t/gen", "timeout_ms": 500},
    "server": {"host": "0.0.0.0", "port": 9000}})";
  Settings s = load_settings(cfg, fake_env({}));
  CHECK(s.store == "/tmp/a");
  CHECK(s.engine.config.grid == geometry::PanoramaGrid{256, 128});
  CHECK(s.engine.config.seed == 7);
  CHECK(s.engine.llm == "http");
  CHECK(s.engine.llm_http.model == "m");
  CHECK(s.engine.texture == "remote");
  CHECK(s.engine.texture_timeout_ms == 500);
  CHECK(s.host == "0.0.0.0");
  CHECK(s.port == 9000);

  s = load_settings(cfg, fake_env({{"PROOM_LLM", "mock"}, {"PROOM_GRID_WIDTH", "128"}, {"PROOM_STORE", "/tmp/b"},
                                   {"PROOM_PROMPTS", "/p"}, {"PROOM_PORT", "1234"}}));
  CHECK(s.engine.llm == "mock");
  CHECK(s.engine.config.grid == geometry::PanoramaGrid{128, 64});
  CHECK(s.store == "/tmp/b");
  CHECK(s.engine.prompt_dir == "/p");
  CHECK(s.port == 1234);
  CHECK(s.engine.texture == "remote");
}

TEST_CASE("bad settings are rejected") {
  const auto dir = proom::testing::scratch_dir("settings-bad");
  std::ofstream(dir / "unknown.json") << R"({"gird_width": 256})";
  std::ofstream(dir / "nested.json") << R"({"llm": {"modle": "x"}})";
  std::ofstream(dir / "type.json") << R"({"grid_width": "wide"})";
  std::ofstream(dir / "syntax.json") << "{";
  for (const char* f : {"unknown.json", "nested.json", "type.json", "syntax.json"}) {
    CAPTURE(f);
    CHECK_THROWS_AS(load_settings(dir / f, fake_env({})), std::invalid_argument);
  }
  CHECK_THROWS_AS(load_settings(dir / "missing.json", fake_env({})), std::invalid_argument);
  CHECK_THROWS(load_settings(std::nullopt, fake_env({{"PROOM_GRID_WIDTH", "90"}})));
  CHECK_THROWS_AS(load_settings(std::nullopt, fake_env({{"PROOM_PORT", "x"}})), std::invalid_argument);
}

TEST_CASE("engine rejects unknown backends") {
  EngineOptions o;
  o.data_dir = PROOM_DATA_DIR;
  o.llm = "oracle";
  CHECK_THROWS_AS(Engine{o}, std::invalid_argument);
  o.llm = "mock";
  o.texture = "remote";
  CHECK_THROWS_AS(Engine{o}, std::invalid_argument);
  o.texture = "procedural";
  CHECK_NOTHROW(Engine{o});
}
