#include "trustnav/language/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace trustnav::language {
namespace {

constexpr std::size_t kRepairWindow = 8;

std::vector<std::string> normalized_tokens(const Transcript& t) {
  std::vector<std::string> out;
  out.reserve(t.size());
  for (const auto& w : t.words) out.push_back(normalize_token(w.text));
  return out;
}

bool ends_clause(const std::string& raw) {
  for (auto it = raw.rbegin(); it != raw.rend(); ++it) {
    const char c = *it;
    if (c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '?') return true;
    if (std::isalnum(static_cast<unsigned char>(c))) return false;
  }
  return false;
}

std::vector<PhraseHit> find_phrases(const std::vector<std::string>& tokens, const std::vector<Phrase>& phrases) {
  std::vector<PhraseHit> hits;
  for (std::size_t i = 0; i < tokens.size();) {
    const std::size_t len = match_phrase(tokens, i, phrases);
    if (len == 0) {
      ++i;
      continue;
    }
    std::string phrase;
    for (std::size_t k = i; k < i + len; ++k) phrase += (k > i ? " " : "") + tokens[k];
    hits.push_back(PhraseHit{WordRange{i, i + len - 1}, phrase});
    i += len;
  }
  return hits;
}

}  // namespace

std::vector<InstructionSegment> segment_instructions(const Transcript& t, const Lexicon& lex) {
  std::vector<InstructionSegment> segments;
  if (t.words.empty()) return segments;
  const auto tokens = normalized_tokens(t);
  auto close = [&](std::size_t first, std::size_t last) {
    WordRange r{first, last};
    segments.push_back(InstructionSegment{r, t.words[first].start, t.words[last].end, t.text(r)});
  };

  std::size_t start = 0;
  std::size_t skip_until = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i >= skip_until) {
      const std::size_t len = match_phrase(tokens, i, lex.connectives);
      if (len > 0) {
        if (i > start) {
          close(start, i - 1);
          start = i;
        }
        skip_until = i + len;
      }
    }
    if (ends_clause(t.words[i].text)) {
      close(start, i);
      start = i + 1;
    }
  }
  if (start < tokens.size()) close(start, tokens.size() - 1);
  return segments;
}

std::vector<audio::TimeSpan> segment_spans(const std::vector<InstructionSegment>& segments) {
  std::vector<audio::TimeSpan> spans;
  spans.reserve(segments.size());
  for (const auto& s : segments) spans.push_back(s.span());
  return spans;
}

SemanticFlags detect_semantic_flags(const Transcript& t, const Lexicon& lex) {
  const auto tokens = normalized_tokens(t);
  const std::size_t n = tokens.size();
  SemanticFlags flags;
  flags.ambiguous = find_phrases(tokens, lex.hedges);
  flags.hesitations = find_phrases(tokens, lex.fillers);

  std::size_t i = 0;
  std::size_t floor = 0;  // retracted spans never reach back into an earlier repair
  while (i < n) {
    std::size_t len = match_phrase(tokens, i, lex.repair_triggers);
    if (len == 0) {
      ++i;
      continue;
    }
    const std::size_t run_start = i;
    std::size_t run_end = i + len;
    while (run_end < n && (len = match_phrase(tokens, run_end, lex.repair_triggers)) > 0) run_end += len;
    i = run_end;

    std::optional<std::size_t> prior;
    for (std::size_t k = run_start; k-- > floor;) {
      if (lex.direction_of(tokens[k])) {
        prior = k;
        break;
      }
    }
    if (!prior) continue;

    std::optional<std::size_t> next;
    const std::size_t window_end = std::min(n, run_end + kRepairWindow);
    for (std::size_t k = run_end; k < window_end; ++k) {
      if (k > run_end && match_phrase(tokens, k, lex.connectives) > 0) break;
      if (match_phrase(tokens, k, lex.repair_triggers) > 0) break;
      if (lex.direction_of(tokens[k])) {
        next = k;
        break;
      }
    }
    if (!next || lex.direction_of(tokens[*next]) == lex.direction_of(tokens[*prior])) continue;

    const std::size_t p = *prior;
    const std::size_t d = *next;
    // Words repeated from just before the retracted direction belong to the retracted clause
    // ("take a left ..., I mean take a right").
    std::size_t lead = 0;
    for (std::size_t m = std::min(p - floor, d - run_end); m > 0; --m) {
      if (std::equal(tokens.begin() + static_cast<std::ptrdiff_t>(p - m), tokens.begin() + static_cast<std::ptrdiff_t>(p),
                     tokens.begin() + static_cast<std::ptrdiff_t>(run_end))) {
        lead = m;
        break;
      }
    }
    // Likewise words after the retracted direction that recur after the replacement one.
    std::size_t tail = 0;
    while (p + 1 + tail < run_start && d + 1 + tail < n && tokens[d + 1 + tail] == tokens[p + 1 + tail]) ++tail;

    flags.repairs.push_back(Repair{WordRange{p - lead, run_start - 1}, WordRange{run_start, run_end - 1},
                                   WordRange{run_end, d + tail}});
    floor = d + tail + 1;
    i = std::max(i, floor);
  }
  return flags;
}

std::size_t word_at(const Transcript& t, double time) {
  for (const auto& w : t.words)
    if (w.start <= time && time <= w.end) return w.index;
  std::size_t best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& w : t.words) {
    const double gap = std::max({w.start - time, time - w.end, 0.0});
    if (gap < best_gap) {
      best_gap = gap;
      best = w.index;
    }
  }
  return best;
}

AlignedCueSet align(const Transcript& t, const std::vector<InstructionSegment>& segments,
                    const audio::VocalCueReport& report, SemanticFlags semantic) {
  AlignedCueSet cues;
  cues.semantic = std::move(semantic);
  if (t.words.empty()) return cues;
  if (report.loudness_event) {
    cues.loudness_event = report.loudness_event;
    cues.loudness_word = word_at(t, report.loudness_event->time);
  }
  if (report.pitch_event) {
    cues.pitch_event = report.pitch_event;
    cues.pitch_word = word_at(t, report.pitch_event->time);
  }
  std::set<std::size_t> hesitant;
  for (const auto& rate : report.segment_rates) {
    if (!rate.hesitant) continue;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      for (std::size_t w = segments[s].words.first; w <= segments[s].words.last; ++w) {
        const double mid = 0.5 * (t.words[w].start + t.words[w].end);
        if (mid >= rate.span.start && mid <= rate.span.end) {
          hesitant.insert(s);
          break;
        }
      }
    }
  }
  cues.hesitant_segments.assign(hesitant.begin(), hesitant.end());
  return cues;
}

}  // namespace trustnav::language
