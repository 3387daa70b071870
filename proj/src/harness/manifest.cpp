#include "trustnav/harness/manifest.hpp"

#include <set>

#include "trustnav/decision/distribution.hpp"
#include "trustnav/harness/config.hpp"

namespace trustnav::harness {

const ClipEntry& DatasetManifest::clip(const std::string& id) const {
  for (const auto& c : clips)
    if (c.id == id) return c;
  throw InputError("no clip " + id + " in manifest");
}

void DatasetManifest::validate() const {
  std::set<std::string> ids;
  for (const auto& c : clips) {
    if (c.id.empty()) throw InputError("manifest: clip with empty id");
    if (!ids.insert(c.id).second) throw InputError("manifest: duplicate clip id " + c.id);
    if (!decision::label_index(c.truth)) throw InputError("manifest: clip " + c.id + " has an invalid label");
    if (c.target.empty()) throw InputError("manifest: clip " + c.id + " has no target");
    if (c.transcript.words.empty()) throw InputError("manifest: clip " + c.id + " has an empty transcript");
    if (!std::filesystem::is_regular_file(c.audio))
      throw InputError("manifest: audio for " + c.id + " not found: " + c.audio.string());
    if (c.environment && !environments.count(*c.environment))
      throw InputError("manifest: clip " + c.id + " references unknown environment " + *c.environment);
  }
  for (const auto& [id, path] : environments)
    if (!std::filesystem::is_regular_file(path)) throw InputError("manifest: environment " + id + " not found: " + path.string());
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  DatasetManifest m;
  try {
    if (j.value("schema_version", 0) != kSchemaVersion) throw InputError("manifest: unsupported or missing schema_version");
    for (const auto& c : j.at("clips")) {
      ClipEntry e;
      e.id = c.at("id").get<std::string>();
      e.audio = base_dir / c.at("audio").get<std::string>();
      e.category = decision::parse_category(c.at("category").get<std::string>());
      e.transcript = language::parse_transcript({{"id", e.id}, {"words", c.at("words")}});
      const auto label = decision::parse_label(c.at("truth").get<std::string>());
      if (!label) throw InputError("manifest: clip " + e.id + " has an invalid label");
      e.truth = *label;
      e.target = c.at("target").get<std::string>();
      if (c.contains("environment") && !c["environment"].is_null()) e.environment = c["environment"].get<std::string>();
      e.pattern = c.value("pattern", "");
      e.planted = c.value("planted", nlohmann::json::object());
      m.clips.push_back(std::move(e));
    }
    const auto envs = j.value("environments", nlohmann::json::object());
    for (const auto& [id, path] : envs.items())
      m.environments[id] = base_dir / path.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("manifest: ") + e.what());
  } catch (const DomainError& e) {
    throw InputError(std::string("manifest: ") + e.what());
  }
  m.validate();
  return m;
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& path) {
  auto m = from_json(read_json(path.string()), path.parent_path());
  m.source = path;
  return m;
}

nlohmann::json DatasetManifest::to_json(const std::filesystem::path& base_dir) const {
  auto rel = [&](const std::filesystem::path& p) { return p.lexically_relative(base_dir).generic_string(); };
  nlohmann::json clips_json = nlohmann::json::array();
  for (const auto& c : clips) {
    nlohmann::json words = nlohmann::json::array();
    for (const auto& w : c.transcript.words) words.push_back({{"text", w.text}, {"start", w.start}, {"end", w.end}});
    nlohmann::json entry = {{"id", c.id},
                            {"audio", rel(c.audio)},
                            {"category", decision::to_string(c.category)},
                            {"words", words},
                            {"truth", std::string(1, c.truth)},
                            {"target", c.target},
                            {"environment", c.environment ? nlohmann::json(*c.environment) : nlohmann::json()},
                            {"pattern", c.pattern}};
    if (!c.planted.empty()) entry["planted"] = c.planted;
    clips_json.push_back(std::move(entry));
  }
  nlohmann::json envs = nlohmann::json::object();
  for (const auto& [id, path] : environments) envs[id] = rel(path);
  return {{"schema_version", kSchemaVersion}, {"clips", clips_json}, {"environments", envs}};
}

}  // namespace trustnav::harness
