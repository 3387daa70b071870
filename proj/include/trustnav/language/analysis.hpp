#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trustnav/audio/features.hpp"
#include "trustnav/language/lexicon.hpp"
#include "trustnav/language/transcript.hpp"

namespace trustnav::language {

struct InstructionSegment {
  WordRange words;
  double start = 0.0;
  double end = 0.0;
  std::string text;

  audio::TimeSpan span() const { return {start, end}; }
  bool operator==(const InstructionSegment&) const = default;
};

/// Splits after clause punctuation (, . ; : ! ?) and before connectives.
/// The result partitions the transcript.
std::vector<InstructionSegment> segment_instructions(const Transcript& t, const Lexicon& lex = Lexicon::defaults());

std::vector<audio::TimeSpan> segment_spans(const std::vector<InstructionSegment>& segments);

struct PhraseHit {
  WordRange words;
  std::string phrase;  // normalized

  bool operator==(const PhraseHit&) const = default;
};

/// A self-correction: `retracted` is replaced by `replacement`, with the
/// trigger run ("no no", "I mean", ...) in between.
struct Repair {
  WordRange retracted;
  WordRange trigger;
  WordRange replacement;

  bool operator==(const Repair&) const = default;
};

struct SemanticFlags {
  std::vector<PhraseHit> ambiguous;
  std::vector<Repair> repairs;
  std::vector<PhraseHit> hesitations;

  bool empty() const { return ambiguous.empty() && repairs.empty() && hesitations.empty(); }
  bool operator==(const SemanticFlags&) const = default;
};

/// Hedges and fillers are matched as normalized token n-grams. A repair is
/// a run of trigger phrases preceded by a direction word and followed,
/// before the next connective and within eight tokens, by a direction word
/// of a different kind.
SemanticFlags detect_semantic_flags(const Transcript& t, const Lexicon& lex = Lexicon::defaults());

struct AlignedCueSet {
  std::optional<std::size_t> loudness_word;
  std::optional<audio::ChangeEvent> loudness_event;
  std::optional<std::size_t> pitch_word;
  std::optional<audio::ChangeEvent> pitch_event;
  std::vector<std::size_t> hesitant_segments;
  SemanticFlags semantic;

  bool has_vocal() const { return loudness_word || pitch_word || !hesitant_segments.empty(); }
  bool empty() const { return !has_vocal() && semantic.empty(); }
  bool operator==(const AlignedCueSet&) const = default;
};

/// Word whose closed span contains `time` (earliest on shared boundaries),
/// otherwise the word with the nearest boundary, earlier word on ties.
std::size_t word_at(const Transcript& t, double time);

/// Maps vocal events to words and flagged speech-rate spans onto `segments`
/// (a segment is hesitant when one of its word midpoints falls in a flagged span).
AlignedCueSet align(const Transcript& t, const std::vector<InstructionSegment>& segments,
                    const audio::VocalCueReport& report, SemanticFlags semantic);

}  // namespace trustnav::language
