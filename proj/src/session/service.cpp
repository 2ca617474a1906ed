#include "proom/session/service.hpp"

#include "proom/llm/generate.hpp"

namespace proom::session {

SessionService::SessionService(SessionStore& store, pipeline::Engine& engine) : store_(store), engine_(engine) {
  engine_.set_room_loader([this](const std::string& id, pipeline::SessionValue& info) {
    info.step = store_.info(id).committed;
    return store_.load_env(id);
  });
}

StepRecord SessionService::run_instruction(const std::string& session, const std::string& instruction) {
  FileLock lock = store_.lock(session);
  const dsl::Environment env = store_.load_env(session);

  StepRecord rec;
  rec.instruction = instruction;
  rec.started = utc_now();

  std::vector<std::pair<std::string, dsl::SemType>> bound;
  for (const auto& n : env.names()) bound.emplace_back(n, env.at(n).type);

  std::optional<dsl::Program> program;
  try {
    auto gen = llm::generate_program(instruction, engine_.chat(), engine_.prompts(), engine_.registry(), bound,
                                     engine_.options().config.decode);
    rec.program = dsl::serialize_program(gen.program);
    rec.attempts = gen.attempts;
    program = std::move(gen.program);
  } catch (const llm::LlmError& e) {
    rec.status = "failed";
    rec.error = e.kind() == llm::LlmError::Kind::generation ? "generation" : "llm";
    rec.diagnostics.push_back({0, 0, rec.error, e.what()});
    rec.transcripts = e.transcripts();
    rec.attempts = static_cast<int>(e.transcripts().size());
    rec.finished = utc_now();
    return store_.commit(session, std::move(rec), env, {});
  }

  dsl::ExecutionResult result = dsl::execute(*program, env, engine_.registry());
  rec.finished = utc_now();
  if (!result.ok()) {
    rec.status = "failed";
    rec.error = "execution";
    rec.diagnostics.push_back(*result.failure);
    return store_.commit(session, std::move(rec), env, {});
  }
  rec.status = "ok";
  std::vector<std::string> created(result.env.names().begin() + static_cast<std::ptrdiff_t>(env.size()),
                                   result.env.names().end());
  return store_.commit(session, std::move(rec), result.env, created);
}

ReplayResult SessionService::replay(const std::string& source, std::optional<std::string> replica_id) {
  ReplayResult out;
  out.source = source;
  const std::vector<StepRecord> original = store_.steps(source);
  out.replica = store_.create(std::move(replica_id)).id;
  for (const auto& s : original) {
    const StepRecord r = run_instruction(out.replica, s.instruction);
    const std::string at = "step " + std::to_string(s.step) + " ";
    if (r.status != s.status) out.mismatches.push_back(at + "status: " + s.status + " != " + r.status);
    if (r.program != s.program) out.mismatches.push_back(at + "program differs");
    if (r.created != s.created) {
      out.mismatches.push_back(at + "created different bindings");
      continue;
    }
    for (const auto& name : s.created) {
      const BindingRecord* a = nullptr;
      const BindingRecord* b = nullptr;
      for (const auto& x : s.bindings) if (x.name == name) a = &x;
      for (const auto& x : r.bindings) if (x.name == name) b = &x;
      if (!a || !b) continue;
      for (const auto& f : a->files) {
        const FileRef* g = b->file(f.role);
        if (!g || g->digest != f.digest)
          out.mismatches.push_back(at + name + " " + f.role + ": " + f.digest + " != " + (g ? g->digest : "missing"));
      }
    }
  }
  return out;
}

}  // namespace proom::session
