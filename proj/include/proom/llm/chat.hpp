#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace proom::llm {

/// Role-labeled prompt: task description, in-context examples, instruction.
struct PromptBundle {
  std::string system;
  std::vector<std::string> assistant;
  std::string user;

  /// Plain-text rendering used in transcripts and error reports.
  std::string render() const;
  bool operator==(const PromptBundle&) const = default;
};

struct DecodeParams {
  double temperature = 0.0;
  int max_tokens = 2048;
  std::uint64_t seed = 0;
};

class LlmError : public std::runtime_error {
 public:
  enum class Kind { network, timeout, malformed, generation, validation, invalid_input };
  LlmError(Kind kind, const std::string& what, std::vector<std::string> transcripts = {})
      : std::runtime_error(what), kind_(kind), transcripts_(std::move(transcripts)) {}
  Kind kind() const { return kind_; }
  const std::vector<std::string>& transcripts() const { return transcripts_; }

 private:
  Kind kind_;
  std::vector<std::string> transcripts_;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string name() const = 0;
  virtual std::string complete(const PromptBundle& prompt, const DecodeParams& params) const = 0;
};

/// Offline backend following the rule table in docs/mock-backend.md. It reads
/// the task from the first line of the system part ("task: <name>").
class MockBackend : public ChatBackend {
 public:
  std::string name() const override { return "mock"; }
  std::string complete(const PromptBundle& prompt, const DecodeParams& params) const override;
};

struct HttpChatConfig {
  std::string endpoint;  // e.g. https://api.openai.com/v1/chat/completions
  std::string model;
  std::string api_key;
  std::chrono::milliseconds timeout{60000};
};

/// OpenAI-compatible chat-completions client.
class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpChatConfig config);
  std::string name() const override { return "http:" + config_.model; }
  std::string complete(const PromptBundle& prompt, const DecodeParams& params) const override;

 private:
  HttpChatConfig config_;
};

struct Example {
  std::string instruction;
  std::string context;  // extra input shown with the instruction (may be empty)
  std::string output;
};

/// Examples go to the assistant part as "Instruction/<context>/<label>" blocks,
/// in the given order. Throws LlmError(invalid_input) on a blank instruction.
PromptBundle assemble_prompt(const std::string& task_description, const std::vector<Example>& examples,
                             const std::string& instruction, const std::string& context = {},
                             const std::string& output_label = "Program");

/// Removes markdown code fences, trailing whitespace, CRs and blank lines.
std::string strip_code_fences(const std::string& completion);

/// Body of a "<heading>:" section in a user part, up to the next blank line.
std::optional<std::string> prompt_section(const std::string& text, const std::string& heading);

}  // namespace proom::llm
