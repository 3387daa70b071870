#include "trustnav/harness/config.hpp"

#include <fstream>

namespace trustnav::harness {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

nlohmann::json to_json(const audio::VocalThresholds& t) {
  return {{"loudness_db", t.loudness_db},
          {"pitch_semitones", t.pitch_semitones},
          {"frame_ms", t.frame_ms},
          {"hop_ms", t.hop_ms},
          {"pitch_low_hz", t.pitch_low_hz},
          {"pitch_high_hz", t.pitch_high_hz},
          {"voicing_clarity", t.voicing_clarity},
          {"rate_abs_limit_s", t.rate_abs_limit_s},
          {"rate_rel_limit", t.rate_rel_limit},
          {"median_window", t.median_window},
          {"max_unvoiced_bridge", t.max_unvoiced_bridge}};
}

audio::VocalThresholds thresholds_from_json(const nlohmann::json& j) {
  audio::VocalThresholds t;
  t.loudness_db = j.value("loudness_db", t.loudness_db);
  t.pitch_semitones = j.value("pitch_semitones", t.pitch_semitones);
  t.frame_ms = j.value("frame_ms", t.frame_ms);
  t.hop_ms = j.value("hop_ms", t.hop_ms);
  t.pitch_low_hz = j.value("pitch_low_hz", t.pitch_low_hz);
  t.pitch_high_hz = j.value("pitch_high_hz", t.pitch_high_hz);
  t.voicing_clarity = j.value("voicing_clarity", t.voicing_clarity);
  t.rate_abs_limit_s = j.value("rate_abs_limit_s", t.rate_abs_limit_s);
  t.rate_rel_limit = j.value("rate_rel_limit", t.rate_rel_limit);
  t.median_window = j.value("median_window", t.median_window);
  t.max_unvoiced_bridge = j.value("max_unvoiced_bridge", t.max_unvoiced_bridge);
  return t;
}

void RunConfig::validate() const {
  if (workers < 1 || workers > 256) throw InputError("workers must be in [1, 256]");
  backend.validate();
  thresholds.validate();
  policy.validate();
}

nlohmann::json RunConfig::to_json() const {
  return {{"schema_version", kSchemaVersion},
          {"seed", seed},
          {"workers", workers},
          {"skip_errors", skip_errors},
          {"ablation", {{"no_vocal", ablation.no_vocal}, {"no_vision", ablation.no_vision}}},
          {"backend", backend.to_json()},
          {"thresholds", harness::to_json(thresholds)},
          {"policy", policy.to_json()},
          {"data",
           {{"lexicon", lexicon},
            {"attack_lexicon", attack_lexicon},
            {"cooccurrence", cooccurrence},
            {"prompt_assets", prompt_assets}}}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    if (!j.is_object()) throw InputError("config must be a JSON object");
    if (j.value("schema_version", kSchemaVersion) != kSchemaVersion)
      throw InputError("unsupported config schema_version " + j.at("schema_version").dump());
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.skip_errors = j.value("skip_errors", c.skip_errors);
    if (j.contains("ablation")) {
      c.ablation.no_vocal = j["ablation"].value("no_vocal", false);
      c.ablation.no_vision = j["ablation"].value("no_vision", false);
    }
    if (j.contains("backend")) c.backend = prompt::BackendConfig::from_json(j["backend"]);
    if (j.contains("thresholds")) c.thresholds = thresholds_from_json(j["thresholds"]);
    if (j.contains("policy")) c.policy = nav::PolicyConfig::from_json(j["policy"]);
    if (j.contains("data")) {
      const auto& d = j["data"];
      c.lexicon = d.value("lexicon", "");
      c.attack_lexicon = d.value("attack_lexicon", "");
      c.cooccurrence = d.value("cooccurrence", "");
      c.prompt_assets = d.value("prompt_assets", "");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) { return from_json(read_json(path)); }

Resources Resources::load(const RunConfig& cfg) {
  Resources r{cfg.lexicon.empty() ? language::Lexicon::defaults() : language::Lexicon::load(cfg.lexicon),
              cfg.attack_lexicon.empty() ? attack::AttackLexicon::defaults() : attack::AttackLexicon::load(cfg.attack_lexicon),
              cfg.cooccurrence.empty() ? nav::CoOccurrenceTable::defaults() : nav::CoOccurrenceTable::load(cfg.cooccurrence),
              cfg.prompt_assets.empty() ? prompt::PromptAssets::defaults() : prompt::PromptAssets::load(cfg.prompt_assets)};
  r.attack_lexicon.validate(r.lexicon);
  return r;
}

}  // namespace trustnav::harness
