#include "trustnav/attack/attack.hpp"

#include <fstream>

#include "trustnav/assets.hpp"
#include "trustnav/language/rewrite.hpp"

namespace trustnav::attack {

void AttackLexicon::validate(const language::Lexicon& lex) const {
  for (const auto& [phrase, repl] : replacements) {
    if (phrase.empty()) throw InputError("attack lexicon: empty phrase");
    if (repl.empty()) continue;
    std::vector<language::WordToken> words;
    std::size_t i = 0;
    for (const auto& tok : language::split_phrase(repl)) {
      words.push_back({tok, static_cast<double>(i), static_cast<double>(i) + 1.0, i});
      ++i;
    }
    const auto flags = language::detect_semantic_flags(language::make_transcript("lexicon", words), lex);
    if (!flags.ambiguous.empty() || !flags.hesitations.empty())
      throw InputError("attack lexicon: replacement \"" + repl + "\" for \"" + phrase + "\" is itself uncertain");
  }
}

AttackLexicon AttackLexicon::from_json(const nlohmann::json& j) {
  AttackLexicon a;
  try {
    for (const auto& [k, v] : j.at("replacements").items()) {
      std::string key;
      for (const auto& tok : language::split_phrase(k)) key += (key.empty() ? "" : " ") + tok;
      a.replacements[key] = v.get<std::string>();
    }
    a.collapse_repairs = j.value("collapse_repairs", true);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("attack lexicon: ") + e.what());
  }
  a.validate();
  return a;
}

AttackLexicon AttackLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open attack lexicon " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

const AttackLexicon& AttackLexicon::defaults() {
  static const AttackLexicon lex = from_json(nlohmann::json::parse(assets::attack_lexicon_json()));
  return lex;
}

language::Transcript token_attack(const language::Transcript& t, const AttackLexicon& attack,
                                  const language::Lexicon& lex) {
  auto pending = [&](const language::SemanticFlags& f) {
    return !f.ambiguous.empty() || !f.hesitations.empty() || (attack.collapse_repairs && !f.repairs.empty());
  };
  language::Transcript out = t;
  // Each pass removes or replaces every flagged phrase with unflagged text, so
  // the word count of flagged material strictly drops; the cap is a backstop.
  for (std::size_t pass = 0; pass <= t.size(); ++pass) {
    const auto flags = language::detect_semantic_flags(out, lex);
    if (!pending(flags)) return out;
    out = language::rewrite(out, flags, attack.replacements, attack.collapse_repairs).transcript;
  }
  throw DomainError("token attack did not reach a fixpoint for " + t.source_clip_id);
}

nlohmann::json AttackResult::to_json() const {
  return {{"metric", metric},
          {"baseline", baseline},
          {"attacked", attacked},
          {"decrease", decrease},
          {"relative_decrease", relative_decrease}};
}

AttackResult compare(std::string metric, double baseline, double attacked) {
  AttackResult r{std::move(metric), baseline, attacked, baseline - attacked, 0.0};
  if (baseline != 0.0) r.relative_decrease = r.decrease / baseline;
  return r;
}

}  // namespace trustnav::attack
