#pragma once

#include <memory>
#include <string>

#include "proom/session/service.hpp"

namespace proom::session {

/// JSON over HTTP:
///   POST /sessions                       create; ?from=<id>,<step> forks, ?id=<id> names it
///   GET  /sessions                       ids
///   GET  /sessions/{id}                  info, step summaries, current environment
///   POST /sessions/{id}/instructions     body: instruction text (or {"instruction": ...})
///   GET  /sessions/{id}/steps/{n}        step record
///   GET  /sessions/{id}/files/{path}     exported mesh files
///   GET  /artifacts/{digest}             artifact bytes
class ApiServer {
 public:
  explicit ApiServer(SessionService& service);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds to `port` (0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace proom::session
