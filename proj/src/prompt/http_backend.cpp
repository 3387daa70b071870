#include "trustnav/prompt/http_backend.hpp"

#include <cmath>
#include <cstdlib>

#include <httplib.h>

#include "trustnav/prompt/mock_backend.hpp"

namespace trustnav::prompt {

using nlohmann::json;

void BackendConfig::validate() const {
  if (kind != "mock" && kind != "http") throw InputError("backend.kind must be \"mock\" or \"http\", got \"" + kind + "\"");
  if (!(temperature >= 0.0 && temperature <= 2.0)) throw InputError("backend.temperature must lie in [0, 2]");
  if (top_logprobs < 1 || top_logprobs > 20) throw InputError("backend.top_logprobs must lie in [1, 20]");
  if (max_tokens < 1) throw InputError("backend.max_tokens must be positive");
  if (!(timeout_s > 0.0)) throw InputError("backend.timeout_s must be positive");
}

json BackendConfig::to_json() const {
  return {{"kind", kind},       {"endpoint", endpoint},       {"credential_env", credential_env},
          {"model", model},     {"temperature", temperature}, {"top_logprobs", top_logprobs},
          {"max_tokens", max_tokens}, {"timeout_s", timeout_s}, {"mock_rules", mock_rules}};
}

BackendConfig BackendConfig::from_json(const json& j) {
  BackendConfig c;
  try {
    c.kind = j.value("kind", c.kind);
    c.endpoint = j.value("endpoint", c.endpoint);
    c.credential_env = j.value("credential_env", c.credential_env);
    c.model = j.value("model", c.model);
    c.temperature = j.value("temperature", c.temperature);
    c.top_logprobs = j.value("top_logprobs", c.top_logprobs);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.timeout_s = j.value("timeout_s", c.timeout_s);
    c.mock_rules = j.value("mock_rules", c.mock_rules);
  } catch (const json::exception& e) {
    throw InputError(std::string("backend config: ") + e.what());
  }
  c.validate();
  return c;
}

std::unique_ptr<Backend> make_backend(const BackendConfig& cfg) {
  cfg.validate();
  if (cfg.kind == "mock")
    return std::make_unique<MockBackend>(cfg.mock_rules.empty() ? MockRules::defaults() : MockRules::load(cfg.mock_rules));

  BackendConfig resolved = cfg;
  if (const char* env = std::getenv("TRUSTNAV_LLM_ENDPOINT"); env && *env) resolved.endpoint = env;
  if (resolved.endpoint.empty()) throw InputError("http backend: no endpoint (set TRUSTNAV_LLM_ENDPOINT or backend.endpoint)");
  std::string key;
  if (const char* k = std::getenv(resolved.credential_env.c_str())) key = k;
  return std::make_unique<HttpBackend>(std::move(resolved), std::move(key));
}

HttpBackend::HttpBackend(BackendConfig cfg, std::string api_key) : cfg_(std::move(cfg)), api_key_(std::move(api_key)) {
  const auto& url = cfg_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InputError("http backend: endpoint must start with http:// or https://");
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw InputError("http backend: unsupported scheme " + scheme);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw InputError("http backend: this build has no TLS support; use an http:// endpoint");
#endif
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
}

json HttpBackend::request_body(const ChatRequest& request) const {
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  json body = {{"model", cfg_.model}, {"messages", messages}, {"temperature", cfg_.temperature}};
  if (request.kind == RequestKind::answer) {
    body["logprobs"] = true;
    body["top_logprobs"] = cfg_.top_logprobs;
    body["max_tokens"] = 1;
  } else {
    body["max_tokens"] = cfg_.max_tokens;
  }
  return body;
}

ChatReply HttpBackend::parse_response(const std::string& body) {
  ChatReply reply;
  try {
    const auto j = json::parse(body);
    const auto& choice = j.at("choices").at(0);
    const auto& content = choice.at("message").at("content");
    reply.text = content.is_string() ? content.get<std::string>() : std::string();
    if (choice.contains("logprobs") && choice.at("logprobs").is_object() && choice.at("logprobs").contains("content") &&
        choice.at("logprobs").at("content").is_array()) {
      for (const auto& t : choice.at("logprobs").at("content")) {
        TokenLogprobs tok{t.at("token").get<std::string>(), t.at("logprob").get<double>(), {}};
        if (t.contains("top_logprobs"))
          for (const auto& alt : t.at("top_logprobs"))
            tok.top.push_back({alt.at("token").get<std::string>(), alt.at("logprob").get<double>()});
        reply.tokens.push_back(std::move(tok));
      }
    }
  } catch (const json::exception& e) {
    throw BackendError(std::string("unparseable completion: ") + e.what(), body);
  }
  return reply;
}

ChatReply HttpBackend::complete(const ChatRequest& request) {
  httplib::Client client(origin_);
  const auto seconds = static_cast<time_t>(cfg_.timeout_s);
  const auto usec = static_cast<time_t>((cfg_.timeout_s - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, usec);
  client.set_read_timeout(seconds, usec);
  client.set_write_timeout(seconds, usec);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const auto result = client.Post(path_ + "/chat/completions", headers, request_body(request).dump(), "application/json");
  if (!result) throw BackendError("http backend: transport failure (" + httplib::to_string(result.error()) + ")");
  if (result->status != 200)
    throw BackendError("http backend: status " + std::to_string(result->status), result->body);
  return parse_response(result->body);
}

}  // namespace trustnav::prompt
