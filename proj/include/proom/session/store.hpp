#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "proom/dsl/runtime.hpp"
#include "proom/pipeline/codec.hpp"

namespace proom::session {

class SessionError : public std::runtime_error {
 public:
  enum class Kind { unknown_session, unknown_step, unknown_artifact, corrupt, invalid };
  SessionError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

const char* error_kind_name(SessionError::Kind kind);

/// Immutable blobs named by the SHA-256 of their bytes:
/// <root>/<first two hex digits>/<digest>.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path root);
  /// Writes the blob unless present; returns its digest.
  std::string put(const std::string& bytes) const;
  /// Reads and re-hashes; throws SessionError(corrupt) on mismatch and
  /// SessionError(unknown_artifact) when missing.
  std::string get(const std::string& digest) const;
  bool has(const std::string& digest) const;
  std::filesystem::path path_of(const std::string& digest) const;
  static bool valid_digest(const std::string& digest);

 private:
  std::filesystem::path root_;
};

struct FileRef {
  std::string role;
  std::string media_type;
  std::string extension;
  std::string digest;
  std::uint64_t size = 0;

  bool operator==(const FileRef&) const = default;
};

/// One variable of an environment manifest.
struct BindingRecord {
  std::string name;
  dsl::SemType type = dsl::SemType::text;
  int step = 0;  // step that created it
  std::vector<FileRef> files;

  const FileRef* file(const std::string& role) const;
};

struct StepRecord {
  int step = 0;
  std::string instruction;
  std::string status;  // "ok" or "failed"
  std::string program;
  std::string started;
  std::string finished;
  int attempts = 0;
  std::string error;  // failure kind: generation, execution, ...
  std::vector<dsl::Diagnostic> diagnostics;
  std::vector<std::string> transcripts;
  std::vector<std::string> created;        // names bound by this step
  std::vector<BindingRecord> bindings;     // whole environment after the step; empty when failed
  std::vector<std::string> exports;        // files under the session directory

  bool ok() const { return status == "ok"; }
};

struct SessionInfo {
  std::string id;
  std::string created;
  int committed = 0;  // last committed step
  std::optional<std::string> forked_from;
  int forked_step = 0;
};

nlohmann::json to_json(const FileRef& f);
nlohmann::json to_json(const BindingRecord& b);
nlohmann::json to_json(const StepRecord& s);
nlohmann::json to_json(const SessionInfo& s);
StepRecord step_from_json(const nlohmann::json& j);
SessionInfo info_from_json(const nlohmann::json& j);

/// Current UTC time as 2026-01-02T03:04:05.678Z.
std::string utc_now();

/// Exclusive advisory lock on a file, released on destruction.
class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path);
  ~FileLock();
  FileLock(FileLock&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

/// One directory per session under <root>/sessions:
///   index.json       session info; `committed` is the commit pointer
///   steps/<n>.json   step records
///   exports/step-<n>/<NAME>/...   mesh files per step
///   lock             advisory write lock
/// Files are written to a temporary name and renamed into place; a step
/// becomes visible only when index.json points at it.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  const ArtifactStore& artifacts() const { return artifacts_; }
  std::filesystem::path session_dir(const std::string& id) const;

  /// Random id when none is given. Throws SessionError(invalid) for a taken
  /// or malformed id.
  SessionInfo create(std::optional<std::string> id = std::nullopt);
  /// New session holding copies of steps 1..step of `from`.
  SessionInfo fork(const std::string& from, int step, std::optional<std::string> id = std::nullopt);

  bool exists(const std::string& id) const;
  std::vector<std::string> list() const;
  SessionInfo info(const std::string& id) const;
  StepRecord step(const std::string& id, int n) const;
  std::vector<StepRecord> steps(const std::string& id) const;

  /// Manifest of the environment after step `n` (latest when n < 0).
  std::vector<BindingRecord> manifest(const std::string& id, int n = -1) const;
  /// Decodes every binding of the manifest, verifying digests.
  dsl::Environment load_env(const std::string& id, int n = -1) const;
  dsl::Environment decode(const std::vector<BindingRecord>& manifest) const;

  /// Holds the session's write lock.
  FileLock lock(const std::string& id) const;

  /// Writes the artifacts of `created` (taken from `env`), exports mesh files,
  /// then the step record, then moves the commit pointer. `record.step`,
  /// `record.bindings`, `record.created` and `record.exports` are filled in.
  /// The caller holds the lock.
  StepRecord commit(const std::string& id, StepRecord record, const dsl::Environment& env,
                    const std::vector<std::string>& created);

 private:
  std::vector<FileRef> store_value(const dsl::RuntimeValue& value) const;
  std::vector<std::string> export_files(const std::string& id, int step, const std::string& name,
                                        const dsl::RuntimeValue& value) const;
  void write_info(const SessionInfo& info) const;

  std::filesystem::path root_;
  ArtifactStore artifacts_;
};

/// Writes `bytes` to `path` through a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

bool valid_session_id(const std::string& id);

}  // namespace proom::session
