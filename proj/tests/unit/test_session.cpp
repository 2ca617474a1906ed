#include <set>
#include <thread>

#include "doctest.h"
#include "proom/furniture/layout.hpp"
#include "proom/session/http.hpp"
#include "proom/session/service.hpp"
#include "proom/util/digest.hpp"
#include "../support/files.hpp"

#include <httplib.h>

using namespace proom;
using namespace proom::session;
using nlohmann::json;
using proom::testing::scratch_dir;

namespace {

const char* kCanonical = "Create a 5m by 4m bedroom with a wooden floor and light gray walls, and furnish it";

pipeline::EngineOptions options() {
  pipeline::EngineOptions o;
  o.data_dir = PROOM_DATA_DIR;
  o.config.grid = geometry::make_grid(128);
  return o;
}

struct Fixture {
  std::filesystem::path dir;
  SessionStore store;
  pipeline::Engine engine;
  SessionService service;

  explicit Fixture(const std::string& name)
      : dir(scratch_dir(name)), store(dir), engine(options()), service(store, engine) {}
};

std::map<std::string, std::string> digests(const std::vector<BindingRecord>& manifest) {
  std::map<std::string, std::string> out;
  for (const auto& b : manifest)
    for (const auto& f : b.files) out[b.name + "." + f.role] = f.digest;
  return out;
}

const BindingRecord& binding(const std::vector<BindingRecord>& m, const std::string& name) {
  for (const auto& b : m)
    if (b.name == name) return b;
  FAIL("no binding " << name);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("create gives an empty session") {
  Fixture f("create");
  const auto info = f.store.create();
  CHECK(valid_session_id(info.id));
  CHECK(info.committed == 0);
  CHECK(f.store.steps(info.id).empty());
  CHECK(f.store.load_env(info.id).size() == 0);
  CHECK(f.store.exists(info.id));
  CHECK(f.store.list() == std::vector<std::string>{info.id});

  CHECK(f.store.create("named").id == "named");
  CHECK_THROWS_AS(f.store.create("named"), SessionError);
  CHECK_THROWS_AS(f.store.create("../x"), SessionError);
  CHECK_THROWS_AS(f.store.create(""), SessionError);
  try {
    f.store.info("missing");
    FAIL("expected an error");
  } catch (const SessionError& e) {
    CHECK(e.kind() == SessionError::Kind::unknown_session);
  }
  CHECK_THROWS_AS(f.store.step("named", 1), SessionError);
  CHECK_THROWS_AS(f.service.run_instruction("missing", kCanonical), SessionError);
}

TEST_CASE("full-room instruction commits eight bindings and mesh files") {
  Fixture f("canonical");
  const std::string id = f.store.create("room").id;
  const StepRecord s = f.service.run_instruction(id, kCanonical);
  REQUIRE(s.ok());
  CHECK(s.step == 1);
  CHECK(s.created.size() == 8);
  CHECK(s.bindings.size() == 8);
  CHECK(s.error.empty());
  CHECK(s.program.find("GenFurniture") != std::string::npos);
  CHECK(f.store.info(id).committed == 1);

  for (const auto& b : s.bindings) {
    CHECK(b.step == 1);
    for (const auto& file : b.files) {
      CHECK(f.store.artifacts().has(file.digest));
      CHECK(util::sha256_hex(f.store.artifacts().get(file.digest)) == file.digest);
      CHECK(f.store.artifacts().get(file.digest).size() == file.size);
    }
  }
  CHECK(binding(s.bindings, "ROOM0").type == dsl::SemType::room_mesh);
  CHECK(binding(s.bindings, "LAYOUT0").file("png")->media_type == "image/png");

  // ROOM0 and SCENE0 each get obj, mtl, png; the scene also gets scene.json
  CHECK(s.exports.size() == 7);
  const auto obj = f.store.session_dir(id) / "exports/step-1/ROOM0/room.obj";
  REQUIRE(std::filesystem::exists(obj));
  for (const auto& e : s.exports) CHECK(std::filesystem::exists(f.store.session_dir(id) / e));
  const auto imported = mesh::import_mesh(obj);
  const auto bb = mesh::mesh_bounds(imported);
  CHECK(bb.extent().x() == 5.0);
  CHECK(bb.extent().y() == 4.0);
  CHECK(imported.texture.grid == geometry::PanoramaGrid{128, 64});

  const auto reread = f.store.step(id, 1);
  CHECK(to_json(reread) == to_json(s));
}

TEST_CASE("a fresh store reloads the same environment") {
  Fixture f("reload");
  const std::string id = f.store.create("r").id;
  REQUIRE(f.service.run_instruction(id, kCanonical).ok());
  REQUIRE(f.service.run_instruction(id, "change the floor to red tiles").ok());

  SessionStore fresh(f.dir);
  const auto manifest = fresh.manifest(id);
  const dsl::Environment env = fresh.load_env(id);
  REQUIRE(env.size() == manifest.size());
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& b = manifest[i];
    CHECK(env.names()[i] == b.name);
    CHECK(env.at(b.name).type == b.type);
    for (const auto& file : pipeline::encode_value(env.at(b.name))) {
      CAPTURE(b.name);
      CAPTURE(file.role);
      REQUIRE(b.file(file.role));
      CHECK(util::sha256_hex(file.bytes) == b.file(file.role)->digest);
    }
  }
  CHECK(fresh.load_env(id, 1).size() == 8);
}

TEST_CASE("texture edit rebinds only texture and mesh variables") {
  Fixture f("texedit");
  const std::string id = f.store.create("t").id;
  const StepRecord s1 = f.service.run_instruction(id, kCanonical);
  const StepRecord s2 = f.service.run_instruction(id, "change the floor to red tiles");
  REQUIRE(s2.ok());
  CHECK(s2.created == std::vector<std::string>{"TEXTURE1", "ROOM1", "SCENE1"});
  for (const auto& name : s2.created) {
    const auto t = binding(s2.bindings, name).type;
    CHECK((t == dsl::SemType::texture || t == dsl::SemType::room_mesh || t == dsl::SemType::scene));
  }
  CHECK(binding(s2.bindings, "SHAPE0").file("shape")->digest == binding(s1.bindings, "SHAPE0").file("shape")->digest);
  const auto d1 = digests(s1.bindings);
  const auto d2 = digests(s2.bindings);
  for (const auto& [k, v] : d1) CHECK(d2.at(k) == v);
  CHECK(binding(s2.bindings, "TEXTURE1").file("png")->digest != binding(s1.bindings, "TEXTURE0").file("png")->digest);
  // same geometry, new texture
  CHECK(binding(s2.bindings, "ROOM1").file("obj")->digest == binding(s1.bindings, "ROOM0").file("obj")->digest);
  CHECK(binding(s2.bindings, "ROOM1").file("texture")->digest ==
        binding(s2.bindings, "TEXTURE1").file("png")->digest);
}

TEST_CASE("failed steps are recorded and leave the environment alone") {
  Fixture f("failed");
  const std::string id = f.store.create("x").id;
  const StepRecord s1 = f.service.run_instruction(id, kCanonical);

  const StepRecord gen = f.service.run_instruction(id, "hello there");
  CHECK_FALSE(gen.ok());
  CHECK(gen.step == 2);
  CHECK(gen.error == "generation");
  CHECK(gen.bindings.empty());
  CHECK(gen.created.empty());
  CHECK(gen.transcripts.size() == 2);
  CHECK_FALSE(gen.diagnostics.empty());

  const StepRecord exec = f.service.run_instruction(id, "decrease the width by 10m");
  CHECK_FALSE(exec.ok());
  CHECK(exec.step == 3);
  CHECK(exec.error == "execution");
  REQUIRE(exec.diagnostics.size() == 1);
  CHECK(exec.diagnostics[0].line == 1);
  CHECK(exec.program.find("EditShape") != std::string::npos);
  CHECK(exec.exports.empty());
  CHECK_FALSE(std::filesystem::exists(f.store.session_dir(id) / "exports/step-3"));

  CHECK(f.store.info(id).committed == 3);
  CHECK(digests(f.store.manifest(id)) == digests(s1.bindings));
  CHECK(f.store.load_env(id).names() == f.store.load_env(id, 1).names());

  const StepRecord s4 = f.service.run_instruction(id, "change the floor to red tiles");
  REQUIRE(s4.ok());
  CHECK(s4.step == 4);
  CHECK(s4.created == std::vector<std::string>{"TEXTURE1", "ROOM1", "SCENE1"});
}

TEST_CASE("tampered artifacts fail the load") {
  Fixture f("tamper");
  const std::string id = f.store.create("t").id;
  const StepRecord s = f.service.run_instruction(id, kCanonical);
  const auto path = f.store.artifacts().path_of(binding(s.bindings, "SHAPE0").file("shape")->digest);
  {
    std::ofstream out(path, std::ios::app);
    out << "# tampered\n";
  }
  try {
    f.store.load_env(id);
    FAIL("expected a digest error");
  } catch (const SessionError& e) {
    CHECK(e.kind() == SessionError::Kind::corrupt);
    CHECK(std::string(e.what()).find("digest mismatch") != std::string::npos);
  }
  std::filesystem::remove(path);
  try {
    f.store.load_env(id);
    FAIL("expected a missing artifact error");
  } catch (const SessionError& e) {
    CHECK(e.kind() == SessionError::Kind::unknown_artifact);
  }
}

TEST_CASE("uncommitted writes are invisible") {
  Fixture f("atomic");
  const std::string id = f.store.create("a").id;
  const StepRecord s1 = f.service.run_instruction(id, kCanonical);
  // a step record written without moving the pointer, plus a stray temp file
  StepRecord ghost = s1;
  ghost.step = 2;
  ghost.instruction = "ghost";
  write_atomic(f.store.session_dir(id) / "steps/2.json", to_json(ghost).dump());
  write_atomic(f.store.session_dir(id) / ".index.json.tmp.1", "{garbage");
  CHECK(f.store.info(id).committed == 1);
  CHECK(f.store.steps(id).size() == 1);
  CHECK_THROWS_AS(f.store.step(id, 2), SessionError);
  const StepRecord s2 = f.service.run_instruction(id, "change the floor to red tiles");
  CHECK(s2.step == 2);
  CHECK(f.store.step(id, 2).instruction == "change the floor to red tiles");
}

TEST_CASE("replaying a three-step session reproduces every digest") {
  Fixture f("replay");
  const std::string id = f.store.create("orig").id;
  REQUIRE(f.service.run_instruction(id, kCanonical).ok());
  REQUIRE(f.service.run_instruction(id, "change the floor to red tiles").ok());
  const StepRecord s3 = f.service.run_instruction(id, "replace the table with a wardrobe");
  REQUIRE(s3.ok());
  CHECK(s3.created == std::vector<std::string>{"FURNITURE1"});

  const ReplayResult r = f.service.replay(id, "copy");
  CHECK(r.replica == "copy");
  for (const auto& m : r.mismatches) MESSAGE(m);
  CHECK(r.identical());
  CHECK(digests(f.store.manifest("copy")) == digests(f.store.manifest(id)));

  // a separate store and engine agree too
  Fixture g("replay2");
  const std::string other = g.store.create("again").id;
  for (const auto& s : f.store.steps(id)) g.service.run_instruction(other, s.instruction);
  CHECK(digests(g.store.manifest(other)) == digests(f.store.manifest(id)));
}

TEST_CASE("fork inherits steps and diverges independently") {
  Fixture f("fork");
  const std::string id = f.store.create("base").id;
  const StepRecord s1 = f.service.run_instruction(id, kCanonical);
  f.service.run_instruction(id, "change the floor to red tiles");
  f.service.run_instruction(id, "replace the table with a wardrobe");

  const SessionInfo fork = f.store.fork(id, 1, "branch");
  CHECK(fork.committed == 1);
  CHECK(fork.forked_from == id);
  CHECK(fork.forked_step == 1);
  CHECK(f.store.steps("branch").size() == 1);
  CHECK(digests(f.store.manifest("branch")) == digests(s1.bindings));
  for (const auto& e : s1.exports) CHECK(std::filesystem::exists(f.store.session_dir("branch") / e));

  const StepRecord b2 = f.service.run_instruction("branch", "paint the walls light blue");
  REQUIRE(b2.ok());
  CHECK(b2.step == 2);
  CHECK(f.store.info(id).committed == 3);
  CHECK(f.store.step(id, 2).instruction == "change the floor to red tiles");
  CHECK(digests(f.store.manifest("branch")) != digests(f.store.manifest(id)));
  CHECK(f.store.manifest(id).size() == 12);

  CHECK(f.store.fork(id, 0).committed == 0);
  CHECK_THROWS_AS(f.store.fork(id, 4), SessionError);
  CHECK_THROWS_AS(f.store.fork("nope", 1), SessionError);
}

TEST_CASE("LoadRoom brings another session's bindings in") {
  Fixture f("loadroom");
  const std::string src = f.store.create("s1").id;
  const StepRecord s1 = f.service.run_instruction(src, kCanonical);
  const std::string dst = f.store.create("s2").id;
  const StepRecord l = f.service.run_instruction(dst, "open the room from session s1");
  REQUIRE(l.ok());
  CHECK(l.program == "SESSION0=LoadRoom(session='s1')\n");
  CHECK(l.created.size() == 9);
  CHECK(l.created.front() == "SESSION0");
  const auto d = digests(l.bindings);
  for (const auto& [k, v] : digests(s1.bindings)) CHECK(d.at(k) == v);
  const auto env = f.store.load_env(dst);
  const auto& info = pipeline::as_session(env.at("SESSION0"));
  CHECK(info.id == "s1");
  CHECK(info.step == 1);
  CHECK(info.names.size() == 8);

  const StepRecord next = f.service.run_instruction(dst, "change the floor to red tiles");
  REQUIRE(next.ok());
  CHECK(next.created == std::vector<std::string>{"TEXTURE1", "ROOM1", "SCENE1"});

  const std::string empty = f.store.create("s3").id;
  const StepRecord bad = f.service.run_instruction(empty, "open the room from session nothere");
  CHECK_FALSE(bad.ok());
  CHECK(bad.error == "execution");
}

TEST_CASE("concurrent writers are serialized per session") {
  Fixture f("concurrent");
  const std::string a = f.store.create("a").id;
  const std::string b = f.store.create("b").id;
  REQUIRE(f.service.run_instruction(a, kCanonical).ok());
  REQUIRE(f.service.run_instruction(b, kCanonical).ok());
  const std::vector<std::string> edits = {"change the floor to red tiles", "paint the walls light blue",
                                          "make the ceiling white", "change the floor to gray tiles"};
  std::vector<std::thread> threads;
  for (const auto& e : edits) {
    threads.emplace_back([&f, &a, e] { f.service.run_instruction(a, e); });
    threads.emplace_back([&f, &b, e] { f.service.run_instruction(b, e); });
  }
  for (auto& t : threads) t.join();
  for (const auto& id : {a, b}) {
    const auto steps = f.store.steps(id);
    REQUIRE(steps.size() == 5);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      CHECK(steps[i].step == static_cast<int>(i) + 1);
      CHECK(steps[i].ok());
      seen.insert(steps[i].instruction);
    }
    CHECK(seen.size() == 5);
    CHECK(f.store.manifest(id).size() == 8 + 4 * 3);
    CHECK(f.store.load_env(id).size() == 20);
  }
}

TEST_CASE("HTTP API") {
  Fixture f("http");
  ApiServer api(f.service);
  const int port = api.bind("127.0.0.1", 0);
  std::thread t([&] { api.serve(); });
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(30, 0);
  for (int i = 0; i < 100; ++i) {
    if (cli.Get("/sessions")) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }

  auto created = cli.Post("/sessions?id=web", "", "text/plain");
  REQUIRE(created);
  CHECK(created->status == 201);
  CHECK(json::parse(created->body)["id"] == "web");
  CHECK(cli.Post("/sessions?id=web", "", "text/plain")->status == 400);

  auto step = cli.Post("/sessions/web/instructions", kCanonical, "text/plain");
  REQUIRE(step);
  CHECK(step->status == 201);
  const json s1 = json::parse(step->body);
  CHECK(s1["step"] == 1);
  CHECK(s1["status"] == "ok");
  CHECK(s1["bindings"].size() == 8);
  CHECK(step->get_header_value("Location") == "/sessions/web/steps/1");

  const json shape = s1["bindings"][0];
  CHECK(shape["name"] == "SHAPE0");
  CHECK(shape["type"] == "RoomShape");
  const std::string url = shape["files"][0]["url"];
  auto art = cli.Get(url);
  REQUIRE(art);
  CHECK(art->status == 200);
  CHECK(util::sha256_hex(art->body) == shape["files"][0]["digest"].get<std::string>());
  CHECK(art->get_header_value("Content-Type").rfind("text/plain", 0) == 0);

  std::string png_url;
  for (const auto& b : s1["bindings"])
    if (b["name"] == "TEXTURE0") png_url = b["files"][0]["url"];
  auto png = cli.Get(png_url);
  REQUIRE(png);
  CHECK(png->get_header_value("Content-Type") == "image/png");

  auto obj = cli.Get(s1["export_urls"][0].get<std::string>());
  REQUIRE(obj);
  CHECK(obj->status == 200);
  CHECK(obj->body.find("mtllib room.mtl") != std::string::npos);

  auto json_step = cli.Post("/sessions/web/instructions", R"({"instruction": "change the floor to red tiles"})",
                            "application/json");
  REQUIRE(json_step);
  CHECK(json::parse(json_step->body)["created"] == json::array({"TEXTURE1", "ROOM1", "SCENE1"}));

  auto failed = cli.Post("/sessions/web/instructions", "hello there", "text/plain");
  REQUIRE(failed);
  CHECK(failed->status == 201);
  CHECK(json::parse(failed->body)["status"] == "failed");

  auto info = cli.Get("/sessions/web");
  REQUIRE(info);
  const json j = json::parse(info->body);
  CHECK(j["committed"] == 3);
  CHECK(j["steps"].size() == 3);
  CHECK(j["environment"].size() == 11);

  auto one = cli.Get("/sessions/web/steps/1");
  REQUIRE(one);
  CHECK(json::parse(one->body)["instruction"] == kCanonical);

  auto fork = cli.Post("/sessions?from=web,1", "", "text/plain");
  REQUIRE(fork);
  CHECK(fork->status == 201);
  const std::string fid = json::parse(fork->body)["id"];
  CHECK(json::parse(cli.Get("/sessions/" + fid)->body)["steps"].size() == 1);
  CHECK(cli.Post("/sessions/" + fid + "/instructions", "paint the walls light blue", "text/plain")->status == 201);
  CHECK(json::parse(cli.Get("/sessions/web")->body)["committed"] == 3);
  CHECK(json::parse(cli.Get("/sessions/" + fid)->body)["committed"] == 2);

  CHECK(cli.Get("/sessions")->status == 200);
  CHECK(cli.Get("/sessions/nope")->status == 404);
  CHECK(cli.Get("/sessions/web/steps/9")->status == 404);
  CHECK(cli.Get("/artifacts/" + std::string(64, '0'))->status == 404);
  CHECK(cli.Get("/artifacts/xyz")->status == 400);
  CHECK(cli.Post("/sessions/nope/instructions", "x", "text/plain")->status == 404);
  CHECK(cli.Post("/sessions/web/instructions", "  ", "text/plain")->status == 400);
  CHECK(cli.Post("/sessions?from=web", "", "text/plain")->status == 400);
  CHECK(cli.Post("/sessions?from=web,7", "", "text/plain")->status == 404);
  CHECK(cli.Get("/sessions/web/files/exports/../index.json")->status >= 400);

  api.stop();
  t.join();
}
