#pragma once

#include <array>
#include <string>
#include <vector>

#include "trustnav/decision/distribution.hpp"
#include "trustnav/prompt/backend.hpp"

namespace trustnav::prompt {

struct ActionOption {
  char label = 'A';
  std::string text;
  std::vector<PlanStep> plan;

  bool operator==(const ActionOption&) const = default;
};

struct OptionSet {
  std::array<ActionOption, 5> options;

  const ActionOption& at(char label) const;
  /// Labels A-E in order, nonempty plans, B-E ending in explore_here or ask_person.
  void validate() const;
  bool operator==(const OptionSet&) const = default;
};

inline constexpr double kLabelFloor = 1e-6;

std::vector<ChatMessage> option_messages(const PromptBundle& bundle);
std::vector<ChatMessage> answer_messages(const PromptBundle& bundle, const OptionSet& options);

/// Parses the B-D part of a backend reply ({"options": [...]}, optionally
/// wrapped in prose or a code fence). Throws BackendError on anything else.
std::array<ActionOption, 3> parse_option_reply(const std::string& text);

/// Asks the backend for B-D; A comes from the bundle's paraphrase and E is
/// the fixed fallback. A bad reply is retried once.
OptionSet request_options(const PromptBundle& bundle, Backend& backend);

/// First-answer-token distribution over A-E from a reply's logprobs.
/// Labels the backend did not report get kLabelFloor; the vector is renormalized.
decision::TokenDistribution distribution_from_reply(const ChatReply& reply);

decision::TokenDistribution score_options(const PromptBundle& bundle, const OptionSet& options, Backend& backend);

}  // namespace trustnav::prompt
