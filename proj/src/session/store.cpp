#include "proom/session/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include "proom/image/maps.hpp"
#include "proom/util/digest.hpp"

namespace proom::session {

namespace fs = std::filesystem;
using nlohmann::json;

const char* error_kind_name(SessionError::Kind kind) {
  switch (kind) {
    case SessionError::Kind::unknown_session: return "unknown_session";
    case SessionError::Kind::unknown_step: return "unknown_step";
    case SessionError::Kind::unknown_artifact: return "unknown_artifact";
    case SessionError::Kind::corrupt: return "corrupt";
    case SessionError::Kind::invalid: return "invalid";
  }
  return "unknown";
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_atomic(const fs::path& path, const std::string& bytes) {
  static std::atomic<unsigned> counter{0};
  fs::create_directories(path.parent_path());
  std::ostringstream name;
  name << "." << path.filename().string() << ".tmp." << ::getpid() << "." << counter++ << "."
       << std::hash<std::thread::id>{}(std::this_thread::get_id());
  const fs::path tmp = path.parent_path() / name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
  }
}

bool valid_session_id(const std::string& id) {
  static const std::regex re("[A-Za-z0-9][A-Za-z0-9_-]{0,63}");
  return std::regex_match(id, re);
}

std::string utc_now() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t t = system_clock::to_time_t(now);
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof(out), "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

// ---- artifacts ----

ArtifactStore::ArtifactStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

bool ArtifactStore::valid_digest(const std::string& d) {
  return d.size() == 64 && std::all_of(d.begin(), d.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

fs::path ArtifactStore::path_of(const std::string& digest) const {
  if (!valid_digest(digest)) throw SessionError(SessionError::Kind::invalid, "malformed digest '" + digest + "'");
  return root_ / digest.substr(0, 2) / digest;
}

bool ArtifactStore::has(const std::string& digest) const {
  return valid_digest(digest) && fs::exists(path_of(digest));
}

std::string ArtifactStore::put(const std::string& bytes) const {
  const std::string digest = util::sha256_hex(bytes);
  const fs::path p = path_of(digest);
  if (!fs::exists(p)) write_atomic(p, bytes);
  return digest;
}

std::string ArtifactStore::get(const std::string& digest) const {
  const fs::path p = path_of(digest);
  if (!fs::exists(p)) throw SessionError(SessionError::Kind::unknown_artifact, "no artifact " + digest);
  std::string bytes = read_file(p);
  if (util::sha256_hex(bytes) != digest)
    throw SessionError(SessionError::Kind::corrupt, "digest mismatch for artifact " + digest);
  return bytes;
}

// ---- json ----

const FileRef* BindingRecord::file(const std::string& role) const {
  for (const auto& f : files) {
    if (f.role == role) return &f;
  }
  return nullptr;
}

json to_json(const FileRef& f) {
  return {{"role", f.role},
          {"media_type", f.media_type},
          {"extension", f.extension},
          {"digest", f.digest},
          {"size", f.size},
          {"url", "/artifacts/" + f.digest}};
}

json to_json(const BindingRecord& b) {
  json files = json::array();
  for (const auto& f : b.files) files.push_back(to_json(f));
  return {{"name", b.name}, {"type", dsl::type_name(b.type)}, {"step", b.step}, {"files", files}};
}

json to_json(const StepRecord& s) {
  json diags = json::array();
  for (const auto& d : s.diagnostics)
    diags.push_back({{"line", d.line}, {"column", d.column}, {"code", d.code}, {"message", d.message}});
  json bindings = json::array();
  for (const auto& b : s.bindings) bindings.push_back(to_json(b));
  return {{"step", s.step},         {"instruction", s.instruction}, {"status", s.status},
          {"program", s.program},   {"started", s.started},         {"finished", s.finished},
          {"attempts", s.attempts}, {"error", s.error},             {"diagnostics", diags},
          {"transcripts", s.transcripts}, {"created", s.created},   {"bindings", bindings},
          {"exports", s.exports}};
}

json to_json(const SessionInfo& s) {
  json j = {{"id", s.id}, {"created", s.created}, {"committed", s.committed}};
  if (s.forked_from) j["forked_from"] = {{"session", *s.forked_from}, {"step", s.forked_step}};
  return j;
}

namespace {

FileRef file_from_json(const json& j) {
  return {j.at("role").get<std::string>(), j.at("media_type").get<std::string>(),
          j.at("extension").get<std::string>(), j.at("digest").get<std::string>(),
          j.at("size").get<std::uint64_t>()};
}

BindingRecord binding_from_json(const json& j) {
  BindingRecord b;
  b.name = j.at("name").get<std::string>();
  const auto t = dsl::type_from_name(j.at("type").get<std::string>());
  if (!t) throw SessionError(SessionError::Kind::corrupt, "unknown type in manifest: " + j.at("type").dump());
  b.type = *t;
  b.step = j.at("step").get<int>();
  for (const auto& f : j.at("files")) b.files.push_back(file_from_json(f));
  return b;
}

}  // namespace

StepRecord step_from_json(const json& j) {
  StepRecord s;
  s.step = j.at("step").get<int>();
  s.instruction = j.at("instruction").get<std::string>();
  s.status = j.at("status").get<std::string>();
  s.program = j.at("program").get<std::string>();
  s.started = j.at("started").get<std::string>();
  s.finished = j.at("finished").get<std::string>();
  s.attempts = j.at("attempts").get<int>();
  s.error = j.at("error").get<std::string>();
  for (const auto& d : j.at("diagnostics"))
    s.diagnostics.push_back({d.at("line").get<int>(), d.at("column").get<int>(), d.at("code").get<std::string>(),
                             d.at("message").get<std::string>()});
  s.transcripts = j.at("transcripts").get<std::vector<std::string>>();
  s.created = j.at("created").get<std::vector<std::string>>();
  for (const auto& b : j.at("bindings")) s.bindings.push_back(binding_from_json(b));
  s.exports = j.at("exports").get<std::vector<std::string>>();
  return s;
}

SessionInfo info_from_json(const json& j) {
  SessionInfo s;
  s.id = j.at("id").get<std::string>();
  s.created = j.at("created").get<std::string>();
  s.committed = j.at("committed").get<int>();
  if (j.contains("forked_from")) {
    s.forked_from = j["forked_from"].at("session").get<std::string>();
    s.forked_step = j["forked_from"].at("step").get<int>();
  }
  return s;
}

// ---- lock ----

FileLock::FileLock(const fs::path& path) {
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw std::runtime_error("cannot open lock " + path.string());
  while (::flock(fd_, LOCK_EX) != 0) {
    if (errno != EINTR) {
      ::close(fd_);
      throw std::runtime_error("cannot lock " + path.string());
    }
  }
}

FileLock::~FileLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

// ---- sessions ----

SessionStore::SessionStore(fs::path root) : root_(std::move(root)), artifacts_(root_ / "artifacts") {
  fs::create_directories(root_ / "sessions");
}

fs::path SessionStore::session_dir(const std::string& id) const {
  if (!valid_session_id(id)) throw SessionError(SessionError::Kind::invalid, "malformed session id '" + id + "'");
  return root_ / "sessions" / id;
}

bool SessionStore::exists(const std::string& id) const {
  return valid_session_id(id) && fs::exists(session_dir(id) / "index.json");
}

std::vector<std::string> SessionStore::list() const {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(root_ / "sessions")) {
    const std::string id = e.path().filename().string();
    if (exists(id)) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void SessionStore::write_info(const SessionInfo& info) const {
  write_atomic(session_dir(info.id) / "index.json", to_json(info).dump(2) + "\n");
}

SessionInfo SessionStore::create(std::optional<std::string> id) {
  if (!id) {
    std::random_device rd;
    std::mt19937_64 rng((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
    do {
      char buf[17];
      std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(rng()));
      id = std::string("s") + std::string(buf, 12);
    } while (exists(*id));
  }
  const fs::path dir = session_dir(*id);
  fs::create_directories(dir.parent_path());
  // mkdir is the atomic claim on the id
  std::error_code ec;
  if (!fs::create_directory(dir, ec) || ec)
    throw SessionError(SessionError::Kind::invalid, "session '" + *id + "' already exists");
  fs::create_directories(dir / "steps");
  SessionInfo info{*id, utc_now(), 0, std::nullopt, 0};
  write_info(info);
  return info;
}

SessionInfo SessionStore::info(const std::string& id) const {
  if (!exists(id)) throw SessionError(SessionError::Kind::unknown_session, "unknown session '" + id + "'");
  try {
    return info_from_json(json::parse(read_file(session_dir(id) / "index.json")));
  } catch (const json::exception& e) {
    throw SessionError(SessionError::Kind::corrupt, "bad index for session '" + id + "': " + e.what());
  }
}

StepRecord SessionStore::step(const std::string& id, int n) const {
  const SessionInfo i = info(id);
  if (n < 1 || n > i.committed)
    throw SessionError(SessionError::Kind::unknown_step,
                       "session '" + id + "' has no step " + std::to_string(n) + " (" +
                           std::to_string(i.committed) + " committed)");
  try {
    return step_from_json(json::parse(read_file(session_dir(id) / "steps" / (std::to_string(n) + ".json"))));
  } catch (const json::exception& e) {
    throw SessionError(SessionError::Kind::corrupt, "bad record for step " + std::to_string(n) + ": " + e.what());
  }
}

std::vector<StepRecord> SessionStore::steps(const std::string& id) const {
  std::vector<StepRecord> out;
  const int n = info(id).committed;
  for (int k = 1; k <= n; ++k) out.push_back(step(id, k));
  return out;
}

std::vector<BindingRecord> SessionStore::manifest(const std::string& id, int n) const {
  const int committed = info(id).committed;
  if (n < 0) n = committed;
  if (n > committed)
    throw SessionError(SessionError::Kind::unknown_step, "session '" + id + "' has no step " + std::to_string(n));
  for (int k = n; k >= 1; --k) {
    StepRecord s = step(id, k);
    if (s.ok()) return s.bindings;
  }
  return {};
}

dsl::Environment SessionStore::decode(const std::vector<BindingRecord>& manifest) const {
  dsl::Environment env;
  for (const auto& b : manifest) {
    std::map<std::string, std::string> files;
    for (const auto& role : pipeline::required_roles(b.type)) {
      const FileRef* f = b.file(role);
      if (!f) throw SessionError(SessionError::Kind::corrupt, b.name + " has no '" + role + "' file");
      files[role] = artifacts_.get(f->digest);
    }
    try {
      env.bind(b.name, pipeline::decode_value(b.type, files));
    } catch (const pipeline::CodecError& e) {
      throw SessionError(SessionError::Kind::corrupt, b.name + ": " + e.what());
    }
  }
  return env;
}

dsl::Environment SessionStore::load_env(const std::string& id, int n) const { return decode(manifest(id, n)); }

FileLock SessionStore::lock(const std::string& id) const {
  if (!exists(id)) throw SessionError(SessionError::Kind::unknown_session, "unknown session '" + id + "'");
  return FileLock(session_dir(id) / "lock");
}

std::vector<FileRef> SessionStore::store_value(const dsl::RuntimeValue& value) const {
  std::vector<FileRef> refs;
  for (const auto& f : pipeline::encode_value(value))
    refs.push_back({f.role, f.media_type, f.extension, artifacts_.put(f.bytes), f.bytes.size()});
  return refs;
}

std::vector<std::string> SessionStore::export_files(const std::string& id, int step, const std::string& name,
                                                    const dsl::RuntimeValue& value) const {
  const bool is_mesh = value.type == dsl::SemType::room_mesh;
  if (!is_mesh && value.type != dsl::SemType::scene) return {};
  const fs::path rel = fs::path("exports") / ("step-" + std::to_string(step)) / name;
  const fs::path dir = session_dir(id) / rel;
  const mesh::RoomMesh& room = is_mesh ? pipeline::as_mesh(value) : pipeline::as_scene(value).room;
  const mesh::ExportOptions opts;
  std::vector<std::pair<std::string, std::string>> files = {
      {opts.stem + ".obj", mesh::obj_text(room, opts)},
      {opts.stem + ".mtl", mesh::mtl_text(room, opts)},
      {opts.stem + ".png", image::encode_texture_png(room.texture)}};
  if (!is_mesh) {
    for (const auto& f : pipeline::encode_value(value)) {
      if (f.role == "scene") files.emplace_back("scene.json", f.bytes);
    }
  }
  std::vector<std::string> out;
  for (const auto& [file, bytes] : files) {
    write_atomic(dir / file, bytes);
    out.push_back((rel / file).generic_string());
  }
  return out;
}

StepRecord SessionStore::commit(const std::string& id, StepRecord record, const dsl::Environment& env,
                                const std::vector<std::string>& created) {
  SessionInfo i = info(id);
  record.step = i.committed + 1;
  record.bindings.clear();
  record.exports.clear();
  record.created.clear();
  if (record.ok()) {
    record.bindings = manifest(id);
    for (const auto& name : created) {
      const auto& value = env.at(name);
      record.bindings.push_back({name, value.type, record.step, store_value(value)});
      const auto files = export_files(id, record.step, name, value);
      record.exports.insert(record.exports.end(), files.begin(), files.end());
      record.created.push_back(name);
    }
  }
  write_atomic(session_dir(id) / "steps" / (std::to_string(record.step) + ".json"), to_json(record).dump(2) + "\n");
  i.committed = record.step;
  write_info(i);
  return record;
}

SessionInfo SessionStore::fork(const std::string& from, int step, std::optional<std::string> id) {
  const SessionInfo src = info(from);
  if (step < 0 || step > src.committed)
    throw SessionError(SessionError::Kind::unknown_step,
                       "session '" + from + "' has no step " + std::to_string(step));
  std::vector<StepRecord> inherited;
  for (int k = 1; k <= step; ++k) inherited.push_back(this->step(from, k));

  SessionInfo info = create(std::move(id));
  const fs::path src_dir = session_dir(from);
  const fs::path dst_dir = session_dir(info.id);
  for (const auto& s : inherited) {
    for (const auto& rel : s.exports) write_atomic(dst_dir / rel, read_file(src_dir / rel));
    write_atomic(dst_dir / "steps" / (std::to_string(s.step) + ".json"), to_json(s).dump(2) + "\n");
  }
  info.committed = step;
  info.forked_from = from;
  info.forked_step = step;
  write_info(info);
  return info;
}

}  // namespace proom::session
