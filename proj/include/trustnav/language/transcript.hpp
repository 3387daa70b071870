#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "trustnav/error.hpp"

namespace trustnav::language {

struct WordToken {
  std::string text;
  double start = 0.0;
  double end = 0.0;
  std::size_t index = 0;

  bool operator==(const WordToken&) const = default;
};

/// Inclusive word index range.
struct WordRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first + 1; }
  bool contains(std::size_t i) const { return i >= first && i <= last; }
  bool operator==(const WordRange&) const = default;
};

class TranscriptError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct Transcript {
  std::string source_clip_id;
  std::vector<WordToken> words;

  std::size_t size() const { return words.size(); }
  std::string text() const;
  std::string text(const WordRange& range) const;
  double start_time() const { return words.empty() ? 0.0 : words.front().start; }
  double end_time() const { return words.empty() ? 0.0 : words.back().end; }

  bool operator==(const Transcript&) const = default;
};

/// Validates spans (start < end, ordered, non-overlapping, nonempty) and
/// renumbers word indices.
Transcript make_transcript(std::string clip_id, std::vector<WordToken> words);

/// Reads {"id": ..., "words": [{"text", "start", "end"}, ...]}.
Transcript parse_transcript(const nlohmann::json& entry);

nlohmann::json to_json(const Transcript& transcript);

/// Lowercase with leading/trailing punctuation removed ("Left," -> "left").
std::string normalize_token(std::string_view text);

}  // namespace trustnav::language
