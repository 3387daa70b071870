#pragma once

#include <string>

#include "trustnav/prompt/backend.hpp"

namespace trustnav::prompt {

/// OpenAI-style chat completion client: POST {endpoint}/chat/completions with
/// logprobs enabled. https endpoints need a build with OpenSSL.
class HttpBackend : public Backend {
 public:
  HttpBackend(BackendConfig cfg, std::string api_key);

  ChatReply complete(const ChatRequest& request) override;
  std::string name() const override { return "http:" + cfg_.model; }

  nlohmann::json request_body(const ChatRequest& request) const;
  /// Throws BackendError (raw body attached) when the body is not a usable completion.
  static ChatReply parse_response(const std::string& body);

 private:
  BackendConfig cfg_;
  std::string api_key_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;    // base path, no trailing slash
};

}  // namespace trustnav::prompt
