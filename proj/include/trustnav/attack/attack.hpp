#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustnav/language/analysis.hpp"
#include "trustnav/language/lexicon.hpp"

namespace trustnav::attack {

/// Confident substitutes for hedges and fillers. An empty replacement
/// deletes the phrase.
struct AttackLexicon {
  std::map<std::string, std::string> replacements;  // normalized phrase -> text
  bool collapse_repairs = true;

  /// Throws InputError when a replacement would itself be flagged by `lex`,
  /// which would make the attack non-idempotent.
  void validate(const language::Lexicon& lex = language::Lexicon::defaults()) const;

  static const AttackLexicon& defaults();
  static AttackLexicon from_json(const nlohmann::json& j);
  static AttackLexicon load(const std::string& path);
};

/// Rewrites hedges to their confident form, drops fillers and collapses
/// repairs, repeating until nothing is flagged. Surviving words keep their
/// timestamps.
language::Transcript token_attack(const language::Transcript& t, const AttackLexicon& attack = AttackLexicon::defaults(),
                                  const language::Lexicon& lex = language::Lexicon::defaults());

struct AttackResult {
  std::string metric;
  double baseline = 0.0;
  double attacked = 0.0;
  double decrease = 0.0;           // baseline - attacked
  double relative_decrease = 0.0;  // decrease / baseline, 0 when baseline is 0

  nlohmann::json to_json() const;
};

AttackResult compare(std::string metric, double baseline, double attacked);

}  // namespace trustnav::attack
