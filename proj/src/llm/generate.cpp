#include "proom/llm/generate.hpp"

#include <set>

#include "proom/geometry/shape.hpp"

namespace proom::llm {

std::string variables_context(const std::vector<std::pair<std::string, dsl::SemType>>& bound) {
  std::string s = "Variables:\n";
  if (bound.empty()) return s + "(none)";
  for (std::size_t i = 0; i < bound.size(); ++i) {
    s += bound[i].first + ": " + dsl::type_name(bound[i].second);
    if (i + 1 < bound.size()) s += "\n";
  }
  return s;
}

GeneratedProgram generate_program(const std::string& instruction, const ChatBackend& backend,
                                  const PromptPack& pack, const dsl::ModuleRegistry& registry,
                                  const std::vector<std::pair<std::string, dsl::SemType>>& bound,
                                  const DecodeParams& params) {
  std::set<std::string> names;
  std::map<std::string, dsl::SemType> types;
  for (const auto& [n, t] : bound) {
    names.insert(n);
    types[n] = t;
  }
  PromptBundle prompt =
      assemble_prompt(pack.program.system, pack.program.examples, instruction, variables_context(bound));

  GeneratedProgram out;
  for (int round = 1; round <= 2; ++round) {
    const std::string completion = backend.complete(prompt, params);
    out.transcripts.push_back(prompt.render() + "[completion]\n" + completion + "\n");
    out.attempts = round;
    out.text = strip_code_fences(completion);
    dsl::ParseResult parsed = dsl::parse_program(out.text, names);
    std::vector<dsl::Diagnostic> diags = parsed.diagnostics;
    if (parsed.ok()) diags = dsl::typecheck(*parsed.program, registry, types);
    if (diags.empty()) {
      out.program = std::move(*parsed.program);
      return out;
    }
    if (round == 2)
      throw LlmError(LlmError::Kind::generation,
                     "no valid program after one repair round:\n" + dsl::format_diagnostics(diags), out.transcripts);
    prompt.user += "\n\nYour previous answer:\n" + completion + "\n\nDiagnostics:\n" +
                   dsl::format_diagnostics(diags) + "\n\nAnswer again with a corrected program only.";
  }
  return out;
}

namespace {

geometry::RoomShape shape_from_completion(const std::string& completion) {
  geometry::RoomShape shape;
  try {
    shape = geometry::parse_shape(strip_code_fences(completion));
  } catch (const geometry::GeometryError& e) {
    throw LlmError(LlmError::Kind::malformed, std::string("shape reply: ") + e.what(), {completion});
  }
  const auto v = geometry::validate_shape(shape);
  if (!v.ok()) throw LlmError(LlmError::Kind::validation, "invalid shape: " + v.error_summary(), {completion});
  return *v.shape;
}

}  // namespace

geometry::RoomShape gen_shape(const std::string& instruction, const ChatBackend& backend, const PromptPack& pack,
                              const DecodeParams& params) {
  const PromptBundle prompt = assemble_prompt(pack.shape.system, pack.shape.examples, instruction, {}, "Shape");
  return shape_from_completion(backend.complete(prompt, params));
}

geometry::RoomShape edit_shape(const geometry::RoomShape& shape, const std::string& instruction,
                               const ChatBackend& backend, const PromptPack& pack, const DecodeParams& params) {
  const PromptBundle prompt =
      assemble_prompt(pack.shape_edit.system, pack.shape_edit.examples, instruction,
                      "Current shape:\n" + geometry::serialize_shape(shape), "Shape");
  return shape_from_completion(backend.complete(prompt, params));
}

}  // namespace proom::llm
