#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trustnav/error.hpp"
#include "trustnav/language/transcript.hpp"

namespace trustnav::prompt {

/// One step of an option's plan, written as verb(argument):
///   move_to(<landmark>)  turn(left|right)  move_forward(<cells>)
///   explore_here  ask_person  stop
struct PlanStep {
  std::string verb;
  std::string argument;

  std::string to_string() const;
  bool operator==(const PlanStep&) const = default;
};

class PlanError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Parses "verb" or "verb(argument)". Throws PlanError on unknown verbs or
/// missing required arguments.
PlanStep parse_step(std::string_view text);

void validate_step(const PlanStep& step);

std::string to_string(const std::vector<PlanStep>& plan);

/// Rule-based reading of an instruction into plan steps. Each instruction
/// clause contributes its steps in order; `fallback_target` names the goal
/// for clauses like "on your left" that omit the object.
std::vector<PlanStep> parse_instruction(const language::Transcript& t, const std::string& fallback_target);

/// Steps parsed from each word range, in order.
std::vector<PlanStep> parse_clause(const std::vector<std::string>& tokens, const std::string& fallback_target);

inline constexpr int kDefaultForwardCells = 4;

}  // namespace trustnav::prompt
