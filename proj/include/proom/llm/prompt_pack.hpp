#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "proom/llm/chat.hpp"

namespace proom::llm {

struct TaskPrompt {
  std::string system;
  std::vector<Example> examples;
};

/// Prompt texts and in-context examples, one directory per task:
///   <dir>/<task>/system.txt     task description (first line "task: <task>")
///   <dir>/<task>/examples.txt   blocks separated by "---" lines; each block
///                               starts with "instruction: ..." and optional
///                               "context: ..." lines followed by the output
struct PromptPack {
  TaskPrompt program;
  TaskPrompt shape;
  TaskPrompt shape_edit;
  TaskPrompt furniture;
  TaskPrompt furniture_edit;
};

std::vector<Example> parse_examples(const std::string& text);
PromptPack load_prompt_pack(const std::filesystem::path& dir);

}  // namespace proom::llm
