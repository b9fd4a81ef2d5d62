#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace saynav {

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;
};

class LlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Anything that answers a chat-completion request.
class ChatModel {
 public:
  virtual ~ChatModel() = default;
  /// Throws LlmError on transport or protocol failure.
  virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

struct LlmConfig {
  /// Base URL, e.g. http://localhost:8000 ; requests go to <endpoint><path>.
  std::string endpoint;
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4";
  double temperature = 0.0;
  int max_tokens = 512;
  int timeout_seconds = 60;
  int retries = 1;
  /// Environment variable holding the bearer token; unset means no auth header.
  std::string api_key_env = "SAYNAV_LLM_API_KEY";

  void validate() const;
};

/// Reads endpoint settings from a small JSON file with the LlmConfig field names.
LlmConfig load_llm_config(const std::filesystem::path& path);

/// Chat-completion client over HTTP(S). Each call is an independent request,
/// so one instance may serve concurrent episodes.
class HttpChatModel : public ChatModel {
 public:
  explicit HttpChatModel(LlmConfig cfg);
  std::string complete(const std::vector<ChatMessage>& messages) override;

 private:
  LlmConfig cfg_;
  std::string api_key_;
};

/// Append-only JSON-lines log of every request and response of one episode.
class Transcript {
 public:
  Transcript() = default;
  explicit Transcript(const std::filesystem::path& path);

  void record(std::string_view purpose, const std::vector<ChatMessage>& request,
              std::string_view response, bool ok);
  std::size_t entries() const { return entries_; }

 private:
  std::unique_ptr<std::ofstream> out_;
  std::size_t entries_ = 0;
  std::mutex mu_;
};

/// Sends `messages` through `model`, logging to `transcript` when given.
std::string ask(ChatModel& model, Transcript* transcript, std::string_view purpose,
                const std::vector<ChatMessage>& messages);

/// Fills {NAME} placeholders. Throws std::invalid_argument when the template
/// names a placeholder that has no value.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

}  // namespace saynav
