#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustnav/harness/manifest.hpp"
#include "trustnav/nav/environment.hpp"

namespace trustnav::harness {

/// Where the uncertainty in a synthetic clip comes from.
enum class Pattern { none, hedge, repair, filler, loudness, pitch, slow, both };

std::string to_string(Pattern p);
Pattern parse_pattern(const std::string& s);
/// Whether clips of this pattern are annotated with the explore option.
bool uncertain(Pattern p);

/// Fixed geometry shared by every scene: start, two waypoints, then the
/// target sits beyond an anchor object on one side with a distractor on the other.
struct SceneNames {
  std::string name;
  std::string first_landmark;
  std::string second_landmark;
  std::string anchor;
  std::string target;
  std::string distractor;
};

const std::vector<SceneNames>& scenes();

/// The 40x40 room for `scene`; mirrored swaps the two sides.
nav::Environment build_scene(const SceneNames& scene, bool mirrored);

struct CorpusSpec {
  std::map<decision::Category, std::map<Pattern, int>> counts;
  bool random_layout = true;          // false: unmirrored, scenes in rotation
  std::optional<std::string> scene;   // force one scene
  double word_seconds = 0.3;
  double slow_word_seconds = 1.15;

  int total() const;
  void validate() const;

  /// {"LU": 285, "VU": 215} spreads each count over the default pattern mix;
  /// {"VU": {"pitch": 1}} gives explicit counts.
  static CorpusSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Default pattern rotation for a category.
const std::vector<Pattern>& default_mix(decision::Category c);

/// Writes audio/, environments/ and manifest.json under `out_dir` and returns
/// the loaded manifest. Identical spec and seed give identical bytes.
DatasetManifest generate_corpus(const CorpusSpec& spec, std::uint64_t seed, const std::filesystem::path& out_dir);

}  // namespace trustnav::harness
