#pragma once

#include <map>
#include <string>
#include <vector>

#include "trustnav/language/analysis.hpp"

namespace trustnav::language {

struct RewrittenTranscript {
  Transcript transcript;                 // may be empty when every word was removed
  std::vector<std::size_t> source_index; // original index of each surviving word
};

/// Replaces every ambiguous and hesitation hit by its entry in `replacements`
/// (keyed by normalized phrase; missing or empty entries delete the words),
/// and optionally removes retracted clauses and trigger runs of repairs.
/// Surviving words keep their timestamps; replacement words share the span of
/// the words they replace.
RewrittenTranscript rewrite(const Transcript& t, const SemanticFlags& flags,
                            const std::map<std::string, std::string>& replacements, bool collapse_repairs);

}  // namespace trustnav::language
