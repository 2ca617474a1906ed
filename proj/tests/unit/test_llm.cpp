#include <deque>
#include <mutex>

#include <json.hpp>

#include "doctest.h"
#include "proom/geometry/shape.hpp"
#include "proom/llm/generate.hpp"
#include "proom/util/text.hpp"
#include "../support/random_rooms.hpp"
#include "../support/stub_server.hpp"

using namespace proom;
using namespace proom::llm;

namespace {

PromptPack pack() { return load_prompt_pack(std::filesystem::path(PROOM_DATA_DIR) / "prompts"); }

// Replies from a fixed queue and records every prompt it sees.
class ScriptedBackend : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies) : replies_(replies.begin(), replies.end()) {}
  std::string name() const override { return "scripted"; }
  std::string complete(const PromptBundle& prompt, const DecodeParams&) const override {
    seen.push_back(prompt);
    const std::string r = replies_.front();
    replies_.pop_front();
    return r;
  }
  mutable std::vector<PromptBundle> seen;

 private:
  mutable std::deque<std::string> replies_;
};

dsl::ModuleRegistry tiny_registry() {
  dsl::ModuleRegistry r;
  auto none = [](dsl::CallContext&) { return dsl::RuntimeValue{}; };
  r.register_module("GenShape", {{{"instruction", dsl::SemType::text}}, dsl::SemType::shape}, none);
  r.register_module("GenDepth", {{{"shape", dsl::SemType::shape}}, dsl::SemType::depth}, none);
  return r;
}

geometry::RoomShape rect(double w, double l, double h = 2.8) {
  geometry::RoomShape s;
  s.floor_corners = {{0, 0}, {w, 0}, {w, l}, {0, l}};
  s.ceiling_height = h;
  return s;
}

}  // namespace

TEST_CASE("assemble_prompt") {
  const std::vector<Example> ex = {{"first", "", "A=GenShape(instruction='x')"},
                                   {"second", "Variables:\n(none)", "B=GenShape(instruction='y')"}};
  const PromptBundle b = assemble_prompt("task: program\ndo it", ex, "  make a room ", "Variables:\n(none)");
  REQUIRE(b.assistant.size() == 2);
  CHECK(b.assistant[0] == "Instruction: first\nProgram:\nA=GenShape(instruction='x')");
  CHECK(b.assistant[1] == "Instruction: second\nVariables:\n(none)\nProgram:\nB=GenShape(instruction='y')");
  CHECK(b.user == "Variables:\n(none)\n\nInstruction: make a room");
  CHECK(b.system == "task: program\ndo it");
  CHECK(assemble_prompt("task: program\ndo it", ex, "  make a room ", "Variables:\n(none)") == b);
  CHECK(b.render() == assemble_prompt("task: program\ndo it", ex, "  make a room ", "Variables:\n(none)").render());
  try {
    assemble_prompt("task: program", ex, " \n ");
    FAIL("no error");
  } catch (const LlmError& e) {
    CHECK(e.kind() == LlmError::Kind::invalid_input);
  }
}

TEST_CASE("code fences and whitespace are stripped") {
  CHECK(strip_code_fences("```python\nA=GenShape(instruction='x')  \r\n\n```\n") == "A=GenShape(instruction='x')\n");
  CHECK(strip_code_fences("A=1\n\n\nB=2") == "A=1\nB=2\n");
  CHECK(prompt_section("Variables:\nA: RoomShape\nB: DepthMap\n\nInstruction: x", "Variables") == "A: RoomShape\nB: DepthMap");
  CHECK(prompt_section("XVariables:\nA", "Variables") == std::nullopt);
}

TEST_CASE("prompt pack loads and examples parse") {
  const PromptPack p = pack();
  CHECK(p.program.system.rfind("task: program\n", 0) == 0);
  CHECK(p.program.examples.size() >= 5);
  CHECK(p.shape.examples.size() >= 2);
  CHECK(p.shape_edit.examples[0].context.rfind("Current shape:\n", 0) == 0);
  const auto parsed = parse_examples("# comment\ninstruction: a\noutput:\nX\nY\n---\ninstruction: b\ncontext:\nC1\n\nC2\noutput:\nZ\n");
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].output == "X\nY");
  CHECK(parsed[1].context == "C1\n\nC2");
  CHECK_THROWS_AS(parse_examples("output:\nX\n"), LlmError);
}

TEST_CASE("generate_program repairs once, then fails with both transcripts") {
  const auto reg = tiny_registry();
  const PromptPack p = pack();
  {
    ScriptedBackend b({"```\nS=GenShape(instruction='a')\nD=GenDepth(shape=S)\n```"});
    const auto g = generate_program("make a room", b, p, reg);
    CHECK(g.attempts == 1);
    CHECK(g.program.statements.size() == 2);
    CHECK(g.text == "S=GenShape(instruction='a')\nD=GenDepth(shape=S)\n");
  }
  {
    ScriptedBackend b({"Sure! Here is your room.", "S=GenShape(instruction='a')"});
    const auto g = generate_program("make a room", b, p, reg);
    CHECK(g.attempts == 2);
    CHECK(g.transcripts.size() == 2);
    REQUIRE(b.seen.size() == 2);
    CHECK(b.seen[1].user.find("Your previous answer:\nSure! Here is your room.") != std::string::npos);
    CHECK(b.seen[1].user.find("Diagnostics:\nline 1") != std::string::npos);
    CHECK(b.seen[1].assistant == b.seen[0].assistant);
  }
  {
    ScriptedBackend b({"Sure! Here is your room.", "D=GenDepth(shape=S0)"});
    try {
      generate_program("make a room", b, p, reg);
      FAIL("no error");
    } catch (const LlmError& e) {
      CHECK(e.kind() == LlmError::Kind::generation);
      REQUIRE(e.transcripts().size() == 2);
      CHECK(e.transcripts()[0].find("[completion]\nSure! Here is your room.") != std::string::npos);
      CHECK(e.transcripts()[1].find("[completion]\nD=GenDepth(shape=S0)") != std::string::npos);
    }
  }
  {
    // bound variables are visible to the parser and the typechecker
    ScriptedBackend b({"D1=GenDepth(shape=SHAPE0)"});
    const auto g = generate_program("depth again", b, p, reg, {{"SHAPE0", dsl::SemType::shape}});
    CHECK(g.attempts == 1);
    CHECK(b.seen[0].user == "Variables:\nSHAPE0: RoomShape\n\nInstruction: depth again");
  }
}

TEST_CASE("mock program rules") {
  const auto reg = tiny_registry();
  const PromptPack p = pack();
  MockBackend mock;
  auto ask = [&](const std::string& instruction, const std::string& vars) {
    return mock.complete(assemble_prompt(p.program.system, p.program.examples, instruction, vars), {});
  };
  const std::string fresh = strip_code_fences(
      ask("Create a 5m by 4m bedroom with wooden floor and white walls, and furnish it", "Variables:\n(none)"));
  CHECK(fresh ==
        "SHAPE0=GenShape(instruction='a 5m by 4m bedroom')\n"
        "LAYOUT0=GenLayout(shape=SHAPE0)\n"
        "DEPTH0=GenDepth(shape=SHAPE0)\n"
        "SEMANTIC0=GenSemantic(layout=LAYOUT0)\n"
        "TEXTURE0=GenTexture(layout=LAYOUT0, depth=DEPTH0, semantic=SEMANTIC0, instruction='wooden floor and white "
        "walls')\n"
        "ROOM0=GenEmptyRoom(texture=TEXTURE0, depth=DEPTH0)\n"
        "FURNITURE0=GenFurniture(shape=SHAPE0, room_type='bedroom')\n"
        "SCENE0=Merge(room=ROOM0, furniture=FURNITURE0)\n");
  CHECK(util::split_lines(strip_code_fences(ask("Make a 3m by 3m kitchen", "Variables:\n(none)"))).size() == 6);

  const std::string vars =
      "Variables:\nSHAPE0: RoomShape\nLAYOUT0: LayoutMap\nDEPTH0: DepthMap\nSEMANTIC0: SemanticMap\n"
      "TEXTURE0: TextureImage\nROOM0: RoomMesh\nFURNITURE0: FurnitureLayout\nSCENE0: Scene\nTEXTURE1: TextureImage\n"
      "ROOM1: RoomMesh\nSCENE1: Scene";
  CHECK(ask("replace the table with a wardrobe", vars) ==
        "FURNITURE1=EditFurniture(furniture=FURNITURE0, instruction='replace the table with a wardrobe')\n");
  CHECK(ask("change the floor to red tiles", vars) ==
        "TEXTURE2=EditTexture(texture=TEXTURE1, instruction='change the floor to red tiles')\n"
        "ROOM2=EditEmptyRoom(room=ROOM1, texture=TEXTURE2)\n"
        "SCENE2=Merge(room=ROOM2, furniture=FURNITURE0)\n");
  const std::string shape_edit = ask("increase the width by 1m", vars);
  CHECK(shape_edit.rfind("SHAPE1=EditShape(shape=SHAPE0, instruction='increase the width by 1m')\n", 0) == 0);
  CHECK(util::split_lines(shape_edit).size() == 7);
  CHECK(ask("paint the ceiling white", vars).rfind("TEXTURE2=EditTexture", 0) == 0);
  CHECK(ask("open the room from session abc", "Variables:\n(none)") == "SESSION0=LoadRoom(session='abc')\n");

  // prose leads to one repair round and then an error
  try {
    generate_program("sing a song", mock, p, reg, {{"SHAPE0", dsl::SemType::shape}});
    FAIL("no error");
  } catch (const LlmError& e) {
    CHECK(e.kind() == LlmError::Kind::generation);
    CHECK(e.transcripts().size() == 2);
  }
  // the mock is a pure function of the prompt
  CHECK(ask("change the floor to red tiles", vars) == ask("change the floor to red tiles", vars));
}

TEST_CASE("gen_shape with the mock") {
  const PromptPack p = pack();
  MockBackend mock;
  const auto sq = gen_shape("a square bedroom 4m by 4m", mock, p);
  CHECK(sq.floor_corners == rect(4, 4).floor_corners);
  CHECK(sq.ceiling_height == 2.8);
  CHECK(gen_shape("a 5m by 4m bedroom", mock, p).floor_corners == rect(5, 4).floor_corners);
  CHECK(gen_shape("a cozy room", mock, p).floor_corners == rect(4, 4).floor_corners);
  CHECK(gen_shape("a 3.5 x 3 m office with a ceiling height of 2.5m", mock, p).ceiling_height == 2.5);

  const auto l = gen_shape("L-shaped room 6m by 4m with a 2m notch", mock, p);
  CHECK(l.floor_corners.size() == 6);
  CHECK(geometry::signed_area(l.floor_corners) == 20.0);
  CHECK(geometry::validate_shape(l).ok());
}

TEST_CASE("edit_shape with the mock") {
  const PromptPack p = pack();
  MockBackend mock;
  const geometry::RoomShape sq = rect(4, 4);
  CHECK(edit_shape(sq, "increase the width by 1m", mock, p).floor_corners == rect(5, 4).floor_corners);
  CHECK(edit_shape(sq, "decrease the length by 0.5m", mock, p).floor_corners == rect(4, 3.5).floor_corners);
  const auto raised = edit_shape(sq, "raise the ceiling to 3m", mock, p);
  CHECK(raised.floor_corners == sq.floor_corners);
  CHECK(raised.ceiling_height == 3.0);
  CHECK(edit_shape(sq, "increase the height by 0.2m", mock, p).ceiling_height == doctest::Approx(3.0));
  CHECK(edit_shape(sq, "scale to 6 by 3", mock, p).floor_corners == rect(6, 3).floor_corners);

  const auto l = testing::l_shape(6, 4, 2, 2, 2.8);
  const auto wide = edit_shape(l, "increase the width by 3m", mock, p);
  CHECK(geometry::plan_bounds(wide.floor_corners).extent().x() == 9.0);

  const geometry::RoomShape before = sq;
  try {
    edit_shape(sq, "decrease the width by 5m", mock, p);
    FAIL("no error");
  } catch (const LlmError& e) {
    CHECK(e.kind() == LlmError::Kind::validation);
  }
  CHECK(sq == before);

  ScriptedBackend bowtie({"ceiling_height = 2.8\ncorner = 0 0\ncorner = 2 2\ncorner = 2 0\ncorner = 0 2\n"});
  try {
    edit_shape(sq, "twist it", bowtie, p);
    FAIL("no error");
  } catch (const LlmError& e) {
    CHECK(e.kind() == LlmError::Kind::validation);
    CHECK(std::string(e.what()).find("self-intersection") != std::string::npos);
  }
  ScriptedBackend collinear({"ceiling_height = 2.8\ncorner = 0 0\ncorner = 2 0\ncorner = 4 0\ncorner = 4 4\n"});
  CHECK_THROWS_AS(gen_shape("a room", collinear, p), LlmError);
  ScriptedBackend junk({"The room is square."});
  try {
    gen_shape("a room", junk, p);
    FAIL("no error");
  } catch (const LlmError& e) {
    CHECK(e.kind() == LlmError::Kind::malformed);
  }
  REQUIRE(bowtie.seen.size() == 1);
  CHECK(bowtie.seen[0].user.rfind("Current shape:\n", 0) == 0);
}

TEST_CASE("HTTP chat backend") {
  httplib::Server server;
  std::mutex mu;
  nlohmann::json last;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    last = nlohmann::json::parse(req.body);
    last["auth"] = req.get_header_value("Authorization");
    res.set_content(R"js({"choices":[{"message":{"role":"assistant","content":"A=GenShape(instruction='x')"}}]})js",
                    "application/json");
  });
  server.Post("/bad", [](const httplib::Request&, httplib::Response& res) { res.set_content("{}", "application/json"); });
  server.Post("/down", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  server.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(600));
    res.set_content("{}", "application/json");
  });
  testing::StubServer stub(server);

  const PromptBundle prompt{"task: program", {"Instruction: a\nProgram:\nA=GenShape(instruction='a')"}, "Instruction: b"};
  HttpChatBackend ok({stub.url("/v1/chat/completions"), "gpt-test", "k123"});
  CHECK(ok.complete(prompt, {0.0, 256, 7}) == "A=GenShape(instruction='x')");
  {
    std::lock_guard lock(mu);
    CHECK(last["model"] == "gpt-test");
    CHECK(last["max_tokens"] == 256);
    CHECK(last["seed"] == 7);
    CHECK(last["auth"] == "Bearer k123");
    REQUIRE(last["messages"].size() == 3);
    CHECK(last["messages"][0]["role"] == "system");
    CHECK(last["messages"][1]["role"] == "assistant");
    CHECK(last["messages"][2]["content"] == "Instruction: b");
  }
  auto kind_of = [&](const HttpChatConfig& cfg) {
    try {
      HttpChatBackend(cfg).complete(prompt, {});
    } catch (const LlmError& e) {
      return e.kind();
    }
    return LlmError::Kind::invalid_input;
  };
  CHECK(kind_of({stub.url("/bad"), "m", ""}) == LlmError::Kind::malformed);
  CHECK(kind_of({stub.url("/down"), "m", ""}) == LlmError::Kind::network);
  CHECK(kind_of({stub.url("/slow"), "m", "", std::chrono::milliseconds(200)}) == LlmError::Kind::timeout);
  CHECK(kind_of({"http://127.0.0.1:" + std::to_string(testing::unused_port()) + "/x", "m", ""}) ==
        LlmError::Kind::network);
}
