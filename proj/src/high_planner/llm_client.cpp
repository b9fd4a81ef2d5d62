#include "saynav/high_planner/llm_client.hpp"

#include <cctype>
#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace saynav {

void LlmConfig::validate() const {
  if (endpoint.empty()) throw std::invalid_argument("llm endpoint is not set");
  if (!(temperature >= 0.0)) throw std::invalid_argument("llm temperature must be >= 0");
  if (max_tokens <= 0) throw std::invalid_argument("llm max_tokens must be positive");
  if (timeout_seconds <= 0) throw std::invalid_argument("llm timeout must be positive");
  if (retries < 0) throw std::invalid_argument("llm retries must be >= 0");
}

LlmConfig load_llm_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open llm config " + path.string());
  auto j = nlohmann::json::parse(in);
  LlmConfig c;
  c.endpoint = j.value("endpoint", c.endpoint);
  c.path = j.value("path", c.path);
  c.model = j.value("model", c.model);
  c.temperature = j.value("temperature", c.temperature);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  c.retries = j.value("retries", c.retries);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.validate();
  return c;
}

HttpChatModel::HttpChatModel(LlmConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (!cfg_.api_key_env.empty()) {
    if (const char* key = std::getenv(cfg_.api_key_env.c_str())) api_key_ = key;
  }
}

std::string HttpChatModel::complete(const std::vector<ChatMessage>& messages) {
  nlohmann::json body{{"model", cfg_.model},
                      {"temperature", cfg_.temperature},
                      {"max_tokens", cfg_.max_tokens},
                      {"messages", nlohmann::json::array()}};
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});

  httplib::Client client(cfg_.endpoint);
  if (!client.is_valid()) throw LlmError("invalid llm endpoint " + cfg_.endpoint);
  client.set_connection_timeout(cfg_.timeout_seconds, 0);
  client.set_read_timeout(cfg_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post(cfg_.path, headers, body.dump(), "application/json");
  if (!res) throw LlmError("llm request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw LlmError("llm endpoint returned HTTP " + std::to_string(res->status));
  }
  try {
    auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw LlmError(std::string("malformed llm response: ") + e.what());
  }
}

Transcript::Transcript(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_ = std::make_unique<std::ofstream>(path, std::ios::trunc);
  if (!*out_) throw std::runtime_error("cannot write transcript " + path.string());
}

void Transcript::record(std::string_view purpose, const std::vector<ChatMessage>& request,
                        std::string_view response, bool ok) {
  std::lock_guard lock(mu_);
  ++entries_;
  if (!out_) return;
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : request) msgs.push_back({{"role", m.role}, {"content", m.content}});
  nlohmann::json line{{"seq", entries_},
                      {"purpose", purpose},
                      {"request", msgs},
                      {"response", response},
                      {"ok", ok}};
  *out_ << line.dump() << '\n';
  out_->flush();
}

std::string ask(ChatModel& model, Transcript* transcript, std::string_view purpose,
                const std::vector<ChatMessage>& messages) {
  try {
    std::string reply = model.complete(messages);
    if (transcript) transcript->record(purpose, messages, reply, true);
    return reply;
  } catch (const LlmError& e) {
    if (transcript) transcript->record(purpose, messages, e.what(), false);
    throw;
  }
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && (std::isupper(static_cast<unsigned char>(tmpl[j])) || tmpl[j] == '_')) ++j;
      if (j > i + 1 && j < tmpl.size() && tmpl[j] == '}') {
        std::string key(tmpl.substr(i + 1, j - i - 1));
        auto it = values.find(key);
        if (it == values.end()) throw std::invalid_argument("no value for placeholder {" + key + "}");
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += tmpl[i++];
  }
  return out;
}

}  // namespace saynav
