#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace trustnav::language {

enum class Direction { left, right, forward, back };

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view word);

using Phrase = std::vector<std::string>;  // normalized tokens

/// Word lists driving semantic uncertainty detection and segmentation.
struct Lexicon {
  std::vector<Phrase> hedges;
  std::vector<Phrase> fillers;
  std::vector<Phrase> repair_triggers;
  std::vector<Phrase> connectives;
  std::map<std::string, Direction> directions;

  /// The lexicon shipped in data/lexicon.json.
  static const Lexicon& defaults();
  static Lexicon from_json(const nlohmann::json& j);
  static Lexicon load(const std::string& path);

  std::optional<Direction> direction_of(const std::string& normalized) const;
};

/// Longest phrase from `phrases` starting at tokens[pos], or 0 if none matches.
std::size_t match_phrase(const std::vector<std::string>& tokens, std::size_t pos, const std::vector<Phrase>& phrases);

Phrase split_phrase(std::string_view text);

}  // namespace trustnav::language
