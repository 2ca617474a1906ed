#pragma once

#include <map>
#include <string>
#include <vector>

#include "proom/dsl/runtime.hpp"
#include "proom/geometry/types.hpp"
#include "proom/llm/chat.hpp"
#include "proom/llm/prompt_pack.hpp"

namespace proom::llm {

struct GeneratedProgram {
  std::string text;  // cleaned completion
  dsl::Program program;
  std::vector<std::string> transcripts;  // one per round: prompt, then completion
  int attempts = 1;
};

/// "Variables:" section listing bound names and types in binding order.
std::string variables_context(const std::vector<std::pair<std::string, dsl::SemType>>& bound);

/// Asks the backend for a program, then parses and typechecks it against
/// `registry` with `bound` pre-seeded. One repair round with the diagnostics
/// appended to the user part; throws LlmError(generation) carrying both
/// transcripts if that fails too.
GeneratedProgram generate_program(const std::string& instruction, const ChatBackend& backend,
                                  const PromptPack& pack, const dsl::ModuleRegistry& registry,
                                  const std::vector<std::pair<std::string, dsl::SemType>>& bound = {},
                                  const DecodeParams& params = {});

/// Completion parsed as the RoomShape text format and validated; throws
/// LlmError(malformed) for unparseable text and LlmError(validation) for an
/// invalid shape.
geometry::RoomShape gen_shape(const std::string& instruction, const ChatBackend& backend, const PromptPack& pack,
                              const DecodeParams& params = {});

/// Same, with the current shape in the prompt. The input shape is never modified.
geometry::RoomShape edit_shape(const geometry::RoomShape& shape, const std::string& instruction,
                               const ChatBackend& backend, const PromptPack& pack,
                               const DecodeParams& params = {});

}  // namespace proom::llm
