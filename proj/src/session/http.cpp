#include "proom/session/http.hpp"

#include <httplib.h>

#include "proom/util/text.hpp"

namespace proom::session {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
  send_json(res, status, {{"error", kind}, {"message", message}});
}

int status_for(SessionError::Kind kind) {
  switch (kind) {
    case SessionError::Kind::unknown_session:
    case SessionError::Kind::unknown_step:
    case SessionError::Kind::unknown_artifact: return 404;
    case SessionError::Kind::invalid: return 400;
    case SessionError::Kind::corrupt: return 500;
  }
  return 500;
}

std::string sniff(const std::string& bytes) {
  if (bytes.rfind("\x89PNG\r\n\x1a\n", 0) == 0) return "image/png";
  if (bytes.rfind("PRMESH1", 0) == 0 || bytes.rfind("PRDEPTH1", 0) == 0) return "application/octet-stream";
  const auto first = bytes.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (bytes[first] == '{' || bytes[first] == '[')) {
    if (json::accept(bytes)) return "application/json";
  }
  return "text/plain; charset=utf-8";
}

std::string media_for(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "png") return "image/png";
  if (ext == "obj") return "model/obj";
  if (ext == "mtl") return "model/mtl";
  if (ext == "json") return "application/json";
  return "application/octet-stream";
}

json step_json(const std::string& id, const StepRecord& s) {
  json j = to_json(s);
  json urls = json::array();
  for (const auto& e : s.exports) urls.push_back("/sessions/" + id + "/files/" + e);
  j["export_urls"] = urls;
  return j;
}

template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const SessionError& e) {
    send_error(res, status_for(e.kind()), error_kind_name(e.kind()), e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal", e.what());
  }
}

}  // namespace

struct ApiServer::Impl {
  SessionService& service;
  httplib::Server server;

  explicit Impl(SessionService& s) : service(s) { routes(); }

  SessionStore& store() { return service.store(); }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::optional<std::string> id;
        if (req.has_param("id")) id = req.get_param_value("id");
        if (!req.has_param("from")) {
          send_json(res, 201, to_json(store().create(id)));
          return;
        }
        const std::string from = req.get_param_value("from");
        const auto comma = from.rfind(',');
        double step = 0;
        if (comma == std::string::npos || !util::parse_number(from.substr(comma + 1), step) || step < 0 ||
            step != static_cast<int>(step)) {
          send_error(res, 400, "invalid", "from must be <session>,<step>");
          return;
        }
        send_json(res, 201, to_json(store().fork(from.substr(0, comma), static_cast<int>(step), id)));
      });
    });

    server.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, {{"sessions", store().list()}}); });
    });

    server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        json j = to_json(store().info(id));
        json steps = json::array();
        for (const auto& s : store().steps(id))
          steps.push_back({{"step", s.step},
                           {"instruction", s.instruction},
                           {"status", s.status},
                           {"created", s.created},
                           {"url", "/sessions/" + id + "/steps/" + std::to_string(s.step)}});
        j["steps"] = steps;
        json env = json::array();
        for (const auto& b : store().manifest(id)) env.push_back(to_json(b));
        j["environment"] = env;
        send_json(res, 200, j);
      });
    });

    server.Post(R"(/sessions/([^/]+)/instructions)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        std::string text = req.body;
        if (req.get_header_value("Content-Type").rfind("application/json", 0) == 0) {
          const json body = json::parse(req.body, nullptr, false);
          if (!body.is_object() || !body.contains("instruction") || !body["instruction"].is_string()) {
            send_error(res, 400, "invalid", "expected {\"instruction\": \"...\"}");
            return;
          }
          text = body["instruction"].get<std::string>();
        }
        text = std::string(util::trim(text));
        if (text.empty()) {
          send_error(res, 400, "invalid", "empty instruction");
          return;
        }
        if (!store().exists(id)) throw SessionError(SessionError::Kind::unknown_session, "unknown session '" + id + "'");
        const StepRecord rec = service.run_instruction(id, text);
        res.set_header("Location", "/sessions/" + id + "/steps/" + std::to_string(rec.step));
        send_json(res, 201, step_json(id, rec));
      });
    });

    server.Get(R"(/sessions/([^/]+)/steps/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        send_json(res, 200, step_json(id, store().step(id, std::stoi(req.matches[2]))));
      });
    });

    server.Get(R"(/sessions/([^/]+)/files/(exports/.+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        const std::string rel = req.matches[2];
        if (rel.find("..") != std::string::npos) {
          send_error(res, 400, "invalid", "bad path");
          return;
        }
        const auto path = store().session_dir(id) / rel;
        if (!store().exists(id) || !std::filesystem::is_regular_file(path)) {
          send_error(res, 404, "unknown_file", "no file " + rel);
          return;
        }
        res.set_content(read_file(path), media_for(rel));
      });
    });

    server.Get(R"(/artifacts/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string digest = req.matches[1];
        const std::string bytes = store().artifacts().get(digest);
        res.set_header("Cache-Control", "public, max-age=31536000, immutable");
        res.set_header("ETag", "\"" + digest + "\"");
        res.set_content(bytes, sniff(bytes));
      });
    });
  }
};

ApiServer::ApiServer(SessionService& service) : impl_(std::make_unique<Impl>(service)) {}
ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = impl_->server.bind_to_any_port(host);
    if (p < 0) throw std::runtime_error("cannot bind " + host);
    return p;
  }
  if (!impl_->server.bind_to_port(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void ApiServer::serve() { impl_->server.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace proom::session
