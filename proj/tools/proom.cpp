#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "proom/pipeline/settings.hpp"
#include "proom/session/http.hpp"
#include "proom/session/service.hpp"

namespace fs = std::filesystem;
using namespace proom;
using nlohmann::json;

namespace {

session::ApiServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

void print_step(const session::StepRecord& s, bool full) {
  if (full) {
    std::cout << session::to_json(s).dump(2) << "\n";
    return;
  }
  std::cout << "step " << s.step << " " << s.status << "\n";
  if (!s.program.empty()) std::cout << s.program;
  for (const auto& d : s.diagnostics) std::cout << "error: " << dsl::format_diagnostic(d) << "\n";
  for (const auto& name : s.created) {
    for (const auto& b : s.bindings) {
      if (b.name != name) continue;
      std::cout << "  " << name << ": " << dsl::type_name(b.type) << " " << b.files.front().digest.substr(0, 12)
                << "\n";
    }
  }
  for (const auto& e : s.exports) std::cout << "  exported " << e << "\n";
}

int export_step(session::SessionStore& store, const std::string& id, int step, const fs::path& out) {
  if (step < 0) step = store.info(id).committed;
  const auto manifest = store.manifest(id, step);
  fs::create_directories(out);
  for (const auto& b : manifest) {
    for (const auto& f : b.files) {
      const std::string stem = f.role == f.extension ? b.name : b.name + "." + f.role;
      const fs::path p = out / (stem + "." + f.extension);
      session::write_atomic(p, store.artifacts().get(f.digest));
      std::cout << p.string() << "\n";
    }
  }
  // mesh files keep their relative names so the OBJ finds its MTL and texture
  for (int k = 1; k <= step; ++k) {
    const auto rec = store.step(id, k);
    for (const auto& rel : rec.exports) {
      const fs::path src = store.session_dir(id) / rel;
      const fs::path dst = out / fs::path(rel).lexically_relative("exports");
      session::write_atomic(dst, session::read_file(src));
      std::cout << dst.string() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Programmable room engine: instructions to textured room meshes"};
  app.require_subcommand(1);

  std::optional<std::string> config_file;
  std::optional<std::string> data_dir, store_dir, llm, texture, prompts;
  std::optional<int> grid;
  app.add_option("--config", config_file, "JSON config file")->envname("PROOM_CONFIG");
  app.add_option("--data", data_dir, "data directory (prompts, assets, furniture examples)");
  app.add_option("--store", store_dir, "session store directory");
  app.add_option("--llm", llm, "program backend: mock or http");
  app.add_option("--texture", texture, "texture backend: procedural or remote");
  app.add_option("--prompts", prompts, "prompt pack directory");
  app.add_option("--grid", grid, "panorama width in pixels (height is half)");

  auto* run = app.add_subcommand("run", "run an instruction in a session");
  std::string run_session;
  std::vector<std::string> words;
  bool run_json = false;
  run->add_option("-s,--session", run_session, "session id (created when missing)");
  run->add_option("instruction", words, "instruction text")->required();
  run->add_flag("--json", run_json, "print the full step record");

  auto* replay = app.add_subcommand("replay", "re-run a session's instructions in a new session and compare digests");
  std::string replay_source;
  std::optional<std::string> replay_into;
  replay->add_option("session", replay_source)->required();
  replay->add_option("--into", replay_into, "id of the new session");

  auto* exp = app.add_subcommand("export", "write a step's artifacts and mesh files to a directory");
  std::string exp_session;
  int exp_step = -1;
  std::string exp_out;
  exp->add_option("session", exp_session)->required();
  exp->add_option("--step", exp_step, "step number (default: latest)");
  exp->add_option("-o,--out", exp_out, "output directory")->required();

  auto* serve = app.add_subcommand("serve", "serve the HTTP API");
  std::optional<std::string> host;
  std::optional<int> port;
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  auto* show = app.add_subcommand("show", "print a session or one of its steps");
  std::string show_session;
  int show_step = 0;
  show->add_option("session", show_session)->required();
  show->add_option("--step", show_step);

  CLI11_PARSE(app, argc, argv);

  try {
    pipeline::Settings defaults;
#ifdef PROOM_DEFAULT_DATA_DIR
    defaults.engine.data_dir = PROOM_DEFAULT_DATA_DIR;
#endif
    pipeline::Settings settings = pipeline::load_settings(
        config_file ? std::optional<fs::path>(*config_file) : std::nullopt, pipeline::process_env, defaults);
    if (data_dir) settings.engine.data_dir = *data_dir;
    if (store_dir) settings.store = *store_dir;
    if (llm) settings.engine.llm = *llm;
    if (texture) settings.engine.texture = *texture;
    if (prompts) settings.engine.prompt_dir = *prompts;
    if (grid) settings.engine.config.grid = geometry::make_grid(*grid);
    if (host) settings.host = *host;
    if (port) settings.port = *port;

    session::SessionStore store(settings.store);

    if (*show) {
      if (show_step > 0) {
        std::cout << session::to_json(store.step(show_session, show_step)).dump(2) << "\n";
      } else {
        json j = session::to_json(store.info(show_session));
        json steps = json::array();
        for (const auto& s : store.steps(show_session))
          steps.push_back({{"step", s.step}, {"instruction", s.instruction}, {"status", s.status}});
        j["steps"] = steps;
        std::cout << j.dump(2) << "\n";
      }
      return 0;
    }
    if (*exp) return export_step(store, exp_session, exp_step, exp_out);

    pipeline::Engine engine(settings.engine);
    session::SessionService service(store, engine);

    if (*run) {
      std::string id = run_session;
      if (id.empty() || !store.exists(id)) {
        id = store.create(id.empty() ? std::nullopt : std::optional<std::string>(id)).id;
        std::cerr << "session " << id << "\n";
      }
      const auto rec = service.run_instruction(id, join(words));
      print_step(rec, run_json);
      return rec.ok() ? 0 : 2;
    }
    if (*replay) {
      const auto r = service.replay(replay_source, replay_into);
      std::cout << "replayed " << r.source << " into " << r.replica << "\n";
      for (const auto& m : r.mismatches) std::cout << "mismatch: " << m << "\n";
      std::cout << (r.identical() ? "identical" : "different") << "\n";
      return r.identical() ? 0 : 1;
    }
    if (*serve) {
      session::ApiServer server(service);
      const int bound = server.bind(settings.host, settings.port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << settings.host << ":" << bound << "\n";
      server.serve();
      g_server = nullptr;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
