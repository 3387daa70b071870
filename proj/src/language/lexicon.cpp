#include "trustnav/language/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "trustnav/assets.hpp"
#include "trustnav/error.hpp"
#include "trustnav/language/transcript.hpp"

namespace trustnav::language {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::left: return "left";
    case Direction::right: return "right";
    case Direction::forward: return "forward";
    case Direction::back: return "back";
  }
  return "?";
}

std::optional<Direction> parse_direction(std::string_view word) {
  if (word == "left") return Direction::left;
  if (word == "right") return Direction::right;
  if (word == "forward" || word == "front" || word == "straight") return Direction::forward;
  if (word == "back") return Direction::back;
  return std::nullopt;
}

Phrase split_phrase(std::string_view text) {
  Phrase out;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    auto norm = normalize_token(word);
    if (!norm.empty()) out.push_back(std::move(norm));
  }
  return out;
}

namespace {

std::vector<Phrase> phrases_from(const nlohmann::json& j, const char* key) {
  std::vector<Phrase> out;
  if (!j.contains(key)) return out;
  for (const auto& item : j.at(key)) {
    auto phrase = split_phrase(item.get<std::string>());
    if (!phrase.empty()) out.push_back(std::move(phrase));
  }
  return out;
}

}  // namespace

Lexicon Lexicon::from_json(const nlohmann::json& j) {
  try {
    Lexicon lex;
    lex.hedges = phrases_from(j, "hedges");
    lex.fillers = phrases_from(j, "fillers");
    lex.repair_triggers = phrases_from(j, "repair_triggers");
    lex.connectives = phrases_from(j, "connectives");
    if (j.contains("directions")) {
      for (const auto& [name, words] : j.at("directions").items()) {
        auto dir = parse_direction(name);
        if (!dir) throw InputError("unknown direction group '" + name + "' in lexicon");
        for (const auto& w : words) lex.directions[normalize_token(w.get<std::string>())] = *dir;
      }
    }
    return lex;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid lexicon: ") + e.what());
  }
}

const Lexicon& Lexicon::defaults() {
  static const Lexicon lex = from_json(nlohmann::json::parse(assets::lexicon_json()));
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open lexicon file " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("lexicon " + path + ": " + e.what());
  }
}

std::optional<Direction> Lexicon::direction_of(const std::string& normalized) const {
  auto it = directions.find(normalized);
  if (it == directions.end()) return std::nullopt;
  return it->second;
}

std::size_t match_phrase(const std::vector<std::string>& tokens, std::size_t pos, const std::vector<Phrase>& phrases) {
  std::size_t best = 0;
  for (const auto& p : phrases) {
    if (p.size() <= best || pos + p.size() > tokens.size()) continue;
    if (std::equal(p.begin(), p.end(), tokens.begin() + static_cast<std::ptrdiff_t>(pos))) best = p.size();
  }
  return best;
}

}  // namespace trustnav::language
