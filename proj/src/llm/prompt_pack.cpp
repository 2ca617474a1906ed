#include "proom/llm/prompt_pack.hpp"

#include <fstream>
#include <sstream>

#include "proom/util/text.hpp"

namespace proom::llm {

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw LlmError(LlmError::Kind::invalid_input, "cannot read prompt file " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string chomp(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

TaskPrompt load_task(const std::filesystem::path& dir, const std::string& task) {
  TaskPrompt t;
  t.system = chomp(read_file(dir / task / "system.txt"));
  const std::string first = util::split_lines(t.system).empty() ? "" : util::split_lines(t.system)[0];
  if (first != "task: " + task)
    throw LlmError(LlmError::Kind::invalid_input, task + "/system.txt must start with \"task: " + task + "\"");
  const auto examples = dir / task / "examples.txt";
  if (std::filesystem::exists(examples)) t.examples = parse_examples(read_file(examples));
  return t;
}

}  // namespace

std::vector<Example> parse_examples(const std::string& text) {
  std::vector<Example> out;
  Example cur;
  enum { head, context, output } state = head;
  bool open = false;
  auto flush = [&] {
    if (!open) return;
    if (cur.instruction.empty()) throw LlmError(LlmError::Kind::invalid_input, "example without an instruction");
    cur.context = chomp(cur.context);
    cur.output = chomp(cur.output);
    out.push_back(cur);
    cur = {};
    open = false;
    state = head;
  };
  for (const std::string& line : util::split_lines(text)) {
    if (line == "---") {
      flush();
      continue;
    }
    if (state == head) {
      if (util::trim(line).empty() || line[0] == '#') continue;
      if (line.rfind("instruction:", 0) == 0) {
        cur.instruction = std::string(util::trim(std::string_view(line).substr(12)));
        open = true;
        continue;
      }
      if (line == "context:") {
        open = true;
        state = context;
        continue;
      }
      open = true;
      if (line == "output:") {
        state = output;
        continue;
      }
      state = output;
    }
    if (state == context) {
      if (line == "output:") {
        state = output;
        continue;
      }
      cur.context += line + "\n";
      continue;
    }
    cur.output += line + "\n";
  }
  flush();
  return out;
}

PromptPack load_prompt_pack(const std::filesystem::path& dir) {
  PromptPack p;
  p.program = load_task(dir, "program");
  p.shape = load_task(dir, "shape");
  p.shape_edit = load_task(dir, "shape_edit");
  p.furniture = load_task(dir, "furniture");
  p.furniture_edit = load_task(dir, "furniture_edit");
  return p;
}

}  // namespace proom::llm
