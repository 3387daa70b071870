#include "trustnav/language/transcript.hpp"

#include <cctype>

namespace trustnav::language {

std::string Transcript::text() const {
  if (words.empty()) return {};
  return text(WordRange{0, words.size() - 1});
}

std::string Transcript::text(const WordRange& range) const {
  std::string out;
  for (std::size_t i = range.first; i <= range.last && i < words.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += words[i].text;
  }
  return out;
}

Transcript make_transcript(std::string clip_id, std::vector<WordToken> words) {
  if (words.empty()) throw TranscriptError("transcript '" + clip_id + "' is empty");
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto& w = words[i];
    w.index = i;
    if (!(w.end > w.start))
      throw TranscriptError("word " + std::to_string(i) + " ('" + w.text + "') has start >= end");
    if (i > 0 && w.start < words[i - 1].end - 1e-9)
      throw TranscriptError("word " + std::to_string(i) + " ('" + w.text + "') overlaps or precedes word " +
                            std::to_string(i - 1));
  }
  return Transcript{std::move(clip_id), std::move(words)};
}

Transcript parse_transcript(const nlohmann::json& entry) {
  if (!entry.is_object() || !entry.contains("words") || !entry["words"].is_array())
    throw InputError("transcript entry needs a 'words' array");
  std::string id = entry.value("id", std::string{});
  std::vector<WordToken> words;
  for (const auto& w : entry["words"]) {
    if (!w.contains("text") || !w.contains("start") || !w.contains("end"))
      throw InputError("transcript word needs 'text', 'start' and 'end'");
    words.push_back(WordToken{w["text"].get<std::string>(), w["start"].get<double>(), w["end"].get<double>(), 0});
  }
  return make_transcript(std::move(id), std::move(words));
}

nlohmann::json to_json(const Transcript& transcript) {
  nlohmann::json words = nlohmann::json::array();
  for (const auto& w : transcript.words) words.push_back({{"text", w.text}, {"start", w.start}, {"end", w.end}});
  return {{"id", transcript.source_clip_id}, {"words", words}};
}

std::string normalize_token(std::string_view text) {
  auto keep = [](unsigned char c) { return std::isalnum(c) || c >= 0x80; };
  std::size_t b = 0, e = text.size();
  while (b < e && !keep(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && !keep(static_cast<unsigned char>(text[e - 1]))) --e;
  std::string out;
  out.reserve(e - b);
  for (std::size_t i = b; i < e; ++i) out += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
  return out;
}

}  // namespace trustnav::language
