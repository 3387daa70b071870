#include "trustnav/prompt/plan.hpp"

#include <algorithm>
#include <set>

#include "trustnav/language/analysis.hpp"

namespace trustnav::prompt {
namespace {

const std::set<std::string, std::less<>> kVerbs = {"move_to", "turn", "move_forward", "explore_here", "ask_person", "stop"};

const std::set<std::string, std::less<>> kTurnVerbs = {"turn", "take", "make", "hang", "veer", "bear"};
const std::set<std::string, std::less<>> kMoveVerbs = {"go",   "going", "move",     "walk",     "walking", "head",
                                                       "continue", "proceed", "navigate", "drive", "keep",    "come"};
const std::set<std::string, std::less<>> kGoalMarkers = {"to", "towards", "toward", "till", "until"};
const std::set<std::string, std::less<>> kDeterminers = {"the", "a", "an", "your", "that", "this", "my"};
const std::set<std::string, std::less<>> kPhraseStops = {
    "and",   "then",      "until",     "where",  "which",   "is",     "are",  "be",   "was",   "were",
    "will",  "should",    "must",      "on",     "to",      "at",     "in",   "by",   "turn",  "go",
    "move",  "walk",      "you",       "it",     "there",   "stop",   "take", "near", "next",  "left",
    "right", "straight",  "forward",   "ahead",  "definitely", "certainly", "surely", "sure", "probably",
    "maybe", "might",     "perhaps",   "located", "placed", "sitting", "s"};
const std::set<std::string, std::less<>> kSkipBeforeGoal = {"you", "see", "reach", "get", "find", "hit", "arrive", "at"};

bool is_side(const std::string& tok) { return tok == "left" || tok == "right"; }
bool is_ahead(const std::string& tok) { return tok == "straight" || tok == "forward" || tok == "ahead"; }

std::string noun_phrase(const std::vector<std::string>& tokens, std::size_t& pos) {
  while (pos < tokens.size() && (kDeterminers.count(tokens[pos]) || kSkipBeforeGoal.count(tokens[pos]))) ++pos;
  std::string out;
  while (pos < tokens.size() && !kPhraseStops.count(tokens[pos])) {
    if (!out.empty()) out += ' ';
    out += tokens[pos++];
  }
  return out;
}

}  // namespace

std::string PlanStep::to_string() const { return argument.empty() ? verb : verb + "(" + argument + ")"; }

void validate_step(const PlanStep& step) {
  if (!kVerbs.count(step.verb)) throw PlanError("unknown plan verb '" + step.verb + "'");
  if (step.verb == "move_to" && step.argument.empty()) throw PlanError("move_to needs a landmark argument");
  if (step.verb == "turn" && step.argument != "left" && step.argument != "right")
    throw PlanError("turn needs 'left' or 'right', got '" + step.argument + "'");
  if (step.verb == "move_forward" && !step.argument.empty()) {
    const bool digits = std::all_of(step.argument.begin(), step.argument.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (!digits || std::stoi(step.argument) <= 0) throw PlanError("move_forward takes a positive cell count");
  }
}

PlanStep parse_step(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  PlanStep step;
  const auto open = text.find('(');
  if (open == std::string_view::npos) {
    step.verb = std::string(text);
  } else {
    if (text.back() != ')') throw PlanError("malformed plan step '" + std::string(text) + "'");
    step.verb = std::string(trim(text.substr(0, open)));
    step.argument = std::string(trim(text.substr(open + 1, text.size() - open - 2)));
  }
  validate_step(step);
  return step;
}

std::string to_string(const std::vector<PlanStep>& plan) {
  std::string out;
  for (const auto& s : plan) out += (out.empty() ? "" : ", ") + s.to_string();
  return "[" + out + "]";
}

std::vector<PlanStep> parse_clause(const std::vector<std::string>& tokens, const std::string& fallback_target) {
  std::vector<PlanStep> steps;
  std::size_t subject_start = 0;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const std::string& tok = tokens[i];
    if (tok == "stop" || tok == "halt") {
      steps.push_back({"stop", ""});
      subject_start = ++i;
      continue;
    }
    if (kTurnVerbs.count(tok)) {
      std::size_t k = i + 1;
      for (; k < tokens.size() && k <= i + 3; ++k)
        if (is_side(tokens[k]) || kMoveVerbs.count(tokens[k])) break;
      if (k < tokens.size() && k <= i + 3 && is_side(tokens[k])) {
        steps.push_back({"turn", tokens[k]});
        i = k + 1;
        if (i < tokens.size() && tokens[i] == "turn") ++i;
        subject_start = i;
        continue;
      }
    }
    if (kMoveVerbs.count(tok)) {
      std::size_t k = i + 1;
      bool ahead = false;
      while (k < tokens.size() && k <= i + 3 && !kGoalMarkers.count(tokens[k])) {
        if (is_ahead(tokens[k])) ahead = true;
        if (is_side(tokens[k]) || kMoveVerbs.count(tokens[k]) || kTurnVerbs.count(tokens[k])) break;
        ++k;
      }
      if (k < tokens.size() && kGoalMarkers.count(tokens[k])) {
        std::size_t pos = k + 1;
        const std::string landmark = noun_phrase(tokens, pos);
        if (!landmark.empty()) {
          steps.push_back({"move_to", landmark});
          i = subject_start = pos;
          continue;
        }
      }
      if (k < tokens.size() && is_side(tokens[k]) && k == i + 1) {
        steps.push_back({"turn", tokens[k]});
        steps.push_back({"move_forward", std::to_string(kDefaultForwardCells)});
        i = subject_start = k + 1;
        continue;
      }
      if (ahead) {
        steps.push_back({"move_forward", std::to_string(kDefaultForwardCells)});
        i = subject_start = k;
        continue;
      }
    }
    // "<object> is on your left": face that side and approach the object.
    if ((tok == "on" || tok == "to" || tok == "at") && i + 2 < tokens.size() && tokens[i + 1] == "your" &&
        is_side(tokens[i + 2])) {
      std::size_t pos = subject_start;
      std::string object = noun_phrase(tokens, pos);
      if (pos > i) object.clear();
      steps.push_back({"turn", tokens[i + 2]});
      steps.push_back({"move_to", object.empty() ? fallback_target : object});
      i += 3;
      subject_start = i;
      continue;
    }
    if (is_side(tok)) {
      steps.push_back({"turn", tok});
      subject_start = i + 1;
    }
    ++i;
  }
  return steps;
}

std::vector<PlanStep> parse_instruction(const language::Transcript& t, const std::string& fallback_target) {
  std::vector<PlanStep> plan;
  for (const auto& seg : language::segment_instructions(t)) {
    std::vector<std::string> tokens;
    for (std::size_t w = seg.words.first; w <= seg.words.last; ++w) {
      auto norm = language::normalize_token(t.words[w].text);
      if (!norm.empty()) tokens.push_back(std::move(norm));
    }
    auto steps = parse_clause(tokens, fallback_target);
    plan.insert(plan.end(), steps.begin(), steps.end());
  }
  return plan;
}

}  // namespace trustnav::prompt
