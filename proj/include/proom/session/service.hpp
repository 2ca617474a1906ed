#pragma once

#include <string>
#include <vector>

#include "proom/pipeline/engine.hpp"
#include "proom/session/store.hpp"

namespace proom::session {

struct ReplayResult {
  std::string source;
  std::string replica;
  std::vector<std::string> mismatches;  // "step 2 TEXTURE1 png: <a> != <b>"

  bool identical() const { return mismatches.empty(); }
};

/// Runs instructions against stored sessions. Installs itself as the engine's
/// LoadRoom loader.
class SessionService {
 public:
  SessionService(SessionStore& store, pipeline::Engine& engine);

  SessionStore& store() { return store_; }
  const pipeline::Engine& engine() const { return engine_; }

  /// generate_program -> execute against the latest environment -> commit.
  /// Generation and execution failures are committed as failed steps with
  /// their diagnostics; the environment is left as it was.
  StepRecord run_instruction(const std::string& session, const std::string& instruction);

  /// Re-runs every instruction of `source` in a fresh session and compares
  /// the digests of each step's new bindings and its status.
  ReplayResult replay(const std::string& source, std::optional<std::string> replica_id = std::nullopt);

 private:
  SessionStore& store_;
  pipeline::Engine& engine_;
};

}  // namespace proom::session
