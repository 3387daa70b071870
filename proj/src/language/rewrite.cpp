#include "trustnav/language/rewrite.hpp"

#include <cctype>
#include <sstream>

namespace trustnav::language {
namespace {

std::string trailing_punctuation(const std::string& text) {
  std::size_t e = text.size();
  while (e > 0 && !std::isalnum(static_cast<unsigned char>(text[e - 1]))) --e;
  return text.substr(e);
}

bool ends_clause(const std::string& text) {
  for (char c : trailing_punctuation(text))
    if (c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '?') return true;
  return false;
}

}  // namespace

RewrittenTranscript rewrite(const Transcript& t, const SemanticFlags& flags,
                            const std::map<std::string, std::string>& replacements, bool collapse_repairs) {
  const std::size_t n = t.size();
  enum class Fate { keep, drop, replace_start, replaced };
  std::vector<Fate> fate(n, Fate::keep);
  std::vector<const PhraseHit*> hit_at(n, nullptr);

  auto mark_hits = [&](const std::vector<PhraseHit>& hits) {
    for (const auto& h : hits) {
      hit_at[h.words.first] = &h;
      for (std::size_t w = h.words.first; w <= h.words.last; ++w) fate[w] = Fate::replaced;
      fate[h.words.first] = Fate::replace_start;
    }
  };
  mark_hits(flags.ambiguous);
  mark_hits(flags.hesitations);
  if (collapse_repairs) {
    for (const auto& r : flags.repairs) {
      for (std::size_t w = r.retracted.first; w <= r.trigger.last; ++w) fate[w] = Fate::drop;
    }
  }

  RewrittenTranscript out;
  out.transcript.source_clip_id = t.source_clip_id;
  auto emit = [&](WordToken word, std::size_t source) {
    word.index = out.transcript.words.size();
    out.transcript.words.push_back(std::move(word));
    out.source_index.push_back(source);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const auto& word = t.words[i];
    if (fate[i] == Fate::keep) {
      emit(word, i);
      continue;
    }
    if (fate[i] != Fate::replace_start) continue;

    const PhraseHit& hit = *hit_at[i];
    const auto& last = t.words[hit.words.last];
    const std::string punct = trailing_punctuation(last.text);
    std::vector<std::string> repl;
    if (auto it = replacements.find(hit.phrase); it != replacements.end()) {
      std::istringstream in(it->second);
      for (std::string w; in >> w;) repl.push_back(w);
    }
    if (repl.empty()) {
      // Deleting "umm," must not erase the clause boundary it carried.
      if (ends_clause(last.text) && !out.transcript.words.empty() && !ends_clause(out.transcript.words.back().text))
        out.transcript.words.back().text += punct;
      continue;
    }
    if (std::isupper(static_cast<unsigned char>(word.text.empty() ? 'a' : word.text.front())))
      repl.front()[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(repl.front()[0])));
    repl.back() += punct;
    const double span = last.end - word.start;
    for (std::size_t k = 0; k < repl.size(); ++k) {
      const double a = word.start + span * static_cast<double>(k) / repl.size();
      const double b = word.start + span * static_cast<double>(k + 1) / repl.size();
      emit(WordToken{repl[k], a, b, 0}, i);
    }
  }
  return out;
}

}  // namespace trustnav::language
