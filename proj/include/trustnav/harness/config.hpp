#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "trustnav/attack/attack.hpp"
#include "trustnav/audio/features.hpp"
#include "trustnav/language/lexicon.hpp"
#include "trustnav/nav/perception.hpp"
#include "trustnav/nav/simulator.hpp"
#include "trustnav/prompt/backend.hpp"
#include "trustnav/prompt/bundle.hpp"

namespace trustnav::harness {

inline constexpr int kSchemaVersion = 1;

struct Ablation {
  bool no_vocal = false;   // vocal cues are not extracted or rendered
  bool no_vision = false;  // no scene conjecture; explore follows the instruction instead
};

/// Everything a run depends on besides the manifest. Serialized verbatim
/// into every report so the run can be repeated from the report alone.
struct RunConfig {
  std::uint64_t seed = 7;
  int workers = 1;
  bool skip_errors = false;
  Ablation ablation;
  prompt::BackendConfig backend;
  audio::VocalThresholds thresholds;
  nav::PolicyConfig policy;
  // Data overrides; empty means the shipped file.
  std::string lexicon;
  std::string attack_lexicon;
  std::string cooccurrence;
  std::string prompt_assets;

  void validate() const;
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
};

nlohmann::json to_json(const audio::VocalThresholds& t);
audio::VocalThresholds thresholds_from_json(const nlohmann::json& j);

/// Lexicons and tables named by a RunConfig, loaded once per run.
struct Resources {
  language::Lexicon lexicon;
  attack::AttackLexicon attack_lexicon;
  nav::CoOccurrenceTable cooccurrence;
  prompt::PromptAssets prompt_assets;

  static Resources load(const RunConfig& cfg);
};

nlohmann::json read_json(const std::string& path);

}  // namespace trustnav::harness
