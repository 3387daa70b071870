#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trustnav/prompt/backend.hpp"

namespace trustnav::prompt {

struct OptionTemplate {
  std::string text;               // "{target}" is substituted
  std::vector<std::string> plan;  // step strings; "$prefix" expands to the certain prefix
};

struct CuePredicate {
  std::set<CueKind> any_of;
  std::set<CueKind> all_of;
  std::set<CueKind> none_of;
  std::optional<bool> clean;

  bool matches(const CueSummary& s) const;
};

struct MockRule {
  std::string name;
  CuePredicate when;
  /// Logprob per label; labels left out are simply not reported.
  std::array<std::optional<double>, 5> logprobs;
  std::optional<std::array<OptionTemplate, 3>> options;  // B-D override
};

struct MockRules {
  std::string name;
  std::array<OptionTemplate, 3> default_options;
  std::vector<MockRule> rules;

  static const MockRules& defaults();
  static MockRules from_json(const nlohmann::json& j);
  static MockRules load(const std::string& path);
};

/// Deterministic offline backend: the first rule whose predicate matches
/// the request's cue summary decides the reply.
class MockBackend : public Backend {
 public:
  explicit MockBackend(MockRules rules) : rules_(std::move(rules)) {}

  ChatReply complete(const ChatRequest& request) override;
  std::string name() const override { return "mock:" + rules_.name; }

  /// Throws UnmatchedBundleError when no rule applies.
  const MockRule& match(const CueSummary& s) const;

 private:
  MockRules rules_;
};

}  // namespace trustnav::prompt
