#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustnav/decision/decision.hpp"
#include "trustnav/language/transcript.hpp"

namespace trustnav::harness {

struct ClipEntry {
  std::string id;
  std::filesystem::path audio;  // resolved against the manifest directory
  decision::Category category = decision::Category::LU;
  language::Transcript transcript;
  char truth = 'A';
  std::string target;
  std::optional<std::string> environment;
  std::string pattern;     // generator pattern, informational
  nlohmann::json planted;  // generator ground truth for vocal events, informational
};

/// Clip list plus the environments they reference. Relative paths in the
/// file are relative to the manifest itself.
struct DatasetManifest {
  std::filesystem::path source;  // manifest file, empty when built in memory
  std::vector<ClipEntry> clips;
  std::map<std::string, std::filesystem::path> environments;

  const ClipEntry& clip(const std::string& id) const;

  /// Unique ids, valid labels, nonempty transcripts, known environments and
  /// existing files. Throws InputError.
  void validate() const;

  static DatasetManifest from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static DatasetManifest load(const std::filesystem::path& path);
  /// Paths are written relative to `base_dir`.
  nlohmann::json to_json(const std::filesystem::path& base_dir) const;
};

}  // namespace trustnav::harness
