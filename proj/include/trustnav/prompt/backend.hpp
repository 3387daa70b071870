#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustnav/error.hpp"
#include "trustnav/prompt/bundle.hpp"

namespace trustnav::prompt {

struct ChatMessage {
  std::string role;
  std::string content;
};

enum class RequestKind { options, answer };

/// Structured view of the bundle. Sent alongside the messages so that the
/// mock backend can match rules without parsing prose; remote backends
/// ignore it.
struct RequestContext {
  CueSummary cues;
  std::vector<PlanStep> certain_prefix;
  std::string target;
};

struct ChatRequest {
  RequestKind kind = RequestKind::answer;
  std::vector<ChatMessage> messages;
  RequestContext context;
};

struct TopLogprob {
  std::string token;
  double logprob = 0.0;
};

struct TokenLogprobs {
  std::string token;
  double logprob = 0.0;
  std::vector<TopLogprob> top;
};

struct ChatReply {
  std::string text;
  std::vector<TokenLogprobs> tokens;
};

/// Transport failures, timeouts and replies that cannot be used.
class BackendError : public Error {
 public:
  explicit BackendError(const std::string& what, std::string raw_reply = {})
      : Error(what), raw_reply_(std::move(raw_reply)) {}
  const std::string& raw_reply() const { return raw_reply_; }

 private:
  std::string raw_reply_;
};

/// The mock backend has no rule for this bundle. Never retried.
class UnmatchedBundleError : public BackendError {
 public:
  using BackendError::BackendError;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual ChatReply complete(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;
};

struct BackendConfig {
  std::string kind = "mock";            // mock | http
  std::string endpoint;                 // base URL; TRUSTNAV_LLM_ENDPOINT overrides when set
  std::string credential_env = "TRUSTNAV_LLM_KEY";
  std::string model = "gpt-4";
  double temperature = 0.0;
  int top_logprobs = 10;
  int max_tokens = 512;
  double timeout_s = 60.0;
  std::string mock_rules;               // path; empty = shipped rules

  void validate() const;
  nlohmann::json to_json() const;
  static BackendConfig from_json(const nlohmann::json& j);
};

/// Mock backend from a rules file (or the shipped table), or an HTTP client.
std::unique_ptr<Backend> make_backend(const BackendConfig& cfg);

}  // namespace trustnav::prompt
