#include "proom/llm/chat.hpp"

#include <httplib.h>

#include <json.hpp>

#include "proom/util/text.hpp"

namespace proom::llm {

std::string PromptBundle::render() const {
  std::string s = "[system]\n" + system + "\n";
  for (const auto& a : assistant) s += "[assistant]\n" + a + "\n";
  s += "[user]\n" + user + "\n";
  return s;
}

PromptBundle assemble_prompt(const std::string& task_description, const std::vector<Example>& examples,
                             const std::string& instruction, const std::string& context,
                             const std::string& output_label) {
  if (util::trim(instruction).empty()) throw LlmError(LlmError::Kind::invalid_input, "instruction is empty");
  PromptBundle b;
  b.system = task_description;
  for (const Example& ex : examples) {
    std::string block = "Instruction: " + ex.instruction + "\n";
    if (!ex.context.empty()) block += ex.context + "\n";
    block += output_label + ":\n" + ex.output;
    b.assistant.push_back(std::move(block));
  }
  if (!context.empty()) b.user = context + "\n\n";
  b.user += "Instruction: " + std::string(util::trim(instruction));
  return b;
}

std::string strip_code_fences(const std::string& completion) {
  std::string out;
  for (const std::string& raw : util::split_lines(completion)) {
    std::string line = raw;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    if (util::trim(line).rfind("```", 0) == 0) continue;
    if (util::trim(line).empty()) continue;
    out += line + "\n";
  }
  return out;
}

std::optional<std::string> prompt_section(const std::string& text, const std::string& heading) {
  const std::string key = heading + ":\n";
  std::size_t pos = 0;
  while (true) {
    pos = text.find(key, pos);
    if (pos == std::string::npos) return std::nullopt;
    if (pos == 0 || text[pos - 1] == '\n') break;
    pos += key.size();
  }
  const std::size_t start = pos + key.size();
  const std::size_t end = text.find("\n\n", start);
  return text.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

HttpChatBackend::HttpChatBackend(HttpChatConfig config) : config_(std::move(config)) {}

std::string HttpChatBackend::complete(const PromptBundle& prompt, const DecodeParams& params) const {
  using nlohmann::json;
  json messages = json::array();
  messages.push_back({{"role", "system"}, {"content", prompt.system}});
  for (const auto& a : prompt.assistant) messages.push_back({{"role", "assistant"}, {"content", a}});
  messages.push_back({{"role", "user"}, {"content", prompt.user}});
  const json body = {{"model", config_.model},
                     {"messages", messages},
                     {"temperature", params.temperature},
                     {"max_tokens", params.max_tokens},
                     {"seed", params.seed}};

  const auto scheme = config_.endpoint.find("://");
  const auto path_start = config_.endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  const std::string base = config_.endpoint.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
  httplib::Client client(base);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(path, headers, body.dump(), "application/json");
  const auto elapsed = std::chrono::steady_clock::now() - start;
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= config_.timeout * 9 / 10))
      throw LlmError(LlmError::Kind::timeout, "chat backend timed out");
    throw LlmError(LlmError::Kind::network, "chat backend: " + httplib::to_string(err));
  }
  if (res->status != 200)
    throw LlmError(LlmError::Kind::network, "chat backend returned HTTP " + std::to_string(res->status));
  try {
    const json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw LlmError(LlmError::Kind::malformed, std::string("chat backend reply: ") + e.what());
  }
}

}  // namespace proom::llm
