#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustnav/language/analysis.hpp"
#include "trustnav/prompt/plan.hpp"

namespace trustnav::prompt {

enum class ExampleKind { textual, vocal, both };

std::string to_string(ExampleKind k);

struct InContextExample {
  ExampleKind kind = ExampleKind::textual;
  std::string prompt;
  std::string reasoning;
  char answer = 'A';
};

/// Versioned prompt text. Defaults come from data/prompt_assets.json.
struct PromptAssets {
  std::string template_version;
  std::string system_preamble;
  std::string no_signal_sentence;
  std::string fallback_option_text;
  std::string option_request_instruction;
  std::string answer_instruction;
  std::vector<InContextExample> examples;

  static const PromptAssets& defaults();
  static PromptAssets from_json(const nlohmann::json& j);
  static PromptAssets load(const std::string& path);
  /// Exactly three examples, one of each kind.
  void validate() const;
};

/// Order matters: cues on the same word are listed in this order.
enum class CueKind { slow_segment, filler, repair, ambiguous, loudness, pitch };

std::string to_string(CueKind k);
CueKind parse_cue_kind(const std::string& s);

struct CueLine {
  CueKind kind;
  std::size_t word;  // first word the cue refers to, used for ordering
  std::string text;

  bool operator==(const CueLine&) const = default;
};

/// Which cue kinds are present; what the mock backend matches on.
struct CueSummary {
  std::set<CueKind> kinds;

  bool has(CueKind k) const { return kinds.count(k) != 0; }
  bool clean() const { return kinds.empty(); }
  bool operator==(const CueSummary&) const = default;
};

CueSummary summarize(const language::AlignedCueSet& cues);

/// Option A, built from the transcript itself: hedges and fillers removed,
/// repairs collapsed to their replacement.
struct Paraphrase {
  std::string text;
  std::vector<PlanStep> plan;
  /// Steps from clauses that end before the first cue-bearing word.
  std::vector<PlanStep> certain_prefix;

  bool operator==(const Paraphrase&) const = default;
};

Paraphrase paraphrase(const language::Transcript& t, const language::AlignedCueSet& cues, const std::string& target,
                      const language::Lexicon& lex = language::Lexicon::defaults());

struct PromptBundle {
  std::string template_version;
  std::string system_preamble;
  std::vector<InContextExample> examples;
  std::string transcript_text;
  std::string cue_rendering;
  std::vector<CueLine> cues;
  CueSummary summary;
  std::string target;
  Paraphrase option_a;
  std::string fallback_option_text;
  std::string option_request_instruction;
  std::string answer_instruction;

  /// Instruction and signal block, shared by both requests.
  std::string query_text() const;
  /// Worked examples rendered for the user message.
  std::string examples_text() const;
};

std::vector<CueLine> render_cues(const language::Transcript& t,
                                 const std::vector<language::InstructionSegment>& segments,
                                 const language::AlignedCueSet& cues);

/// Deterministic P(V) = W (+) K: transcript text plus rendered cues, with
/// the reasoning preamble and worked examples attached.
PromptBundle build_prompt(const language::Transcript& t, const std::vector<language::InstructionSegment>& segments,
                          const language::AlignedCueSet& cues, const std::string& target,
                          const PromptAssets& assets = PromptAssets::defaults(),
                          const language::Lexicon& lex = language::Lexicon::defaults());

}  // namespace trustnav::prompt
