#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustnav/harness/config.hpp"
#include "trustnav/harness/manifest.hpp"
#include "trustnav/prompt/options.hpp"

namespace trustnav::harness {

struct ClipAnalysis {
  language::Transcript transcript;
  std::vector<language::InstructionSegment> segments;
  audio::VocalCueReport report;
  language::AlignedCueSet cues;
};

/// Vocal and semantic cues for one clip. Speech rate is measured over
/// `rate_spans` when given (the attack keeps the original segmentation),
/// otherwise over the transcript's own segments. With no_vocal the vocal
/// report stays empty.
ClipAnalysis analyze_clip(const audio::AudioClip& clip, const language::Transcript& t, const RunConfig& cfg,
                          const Resources& res, const std::vector<audio::TimeSpan>* rate_spans = nullptr);

nlohmann::json to_json(const audio::VocalCueReport& r);
nlohmann::json to_json(const language::AlignedCueSet& cues, const language::Transcript& t);

struct ClipOutcome {
  std::string id;
  decision::Category category = decision::Category::LU;
  std::string pattern;
  char truth = 'A';
  std::optional<std::string> error;  // backend or plan failure
  decision::Decision decision;
  prompt::CueSummary summary;
  std::vector<prompt::PlanStep> plan;  // plan actually executed
  std::optional<nav::EpisodeResult> episode;
  std::string vocal_report;  // canonical JSON dump

  nlohmann::json row() const;
};

using BackendFactory = std::function<std::unique_ptr<prompt::Backend>()>;

/// Shared, read-only state for a batch run.
struct RunContext {
  RunConfig config;
  Resources resources;
  std::map<std::string, nav::Environment> environments;
  BackendFactory make_backend;

  static RunContext create(const RunConfig& cfg, const DatasetManifest& manifest, bool need_environments);
};

/// The plan to execute for the chosen option. Without vision an explore step
/// cannot use the scene, so a trailing explore_here is replaced by the part
/// of option A after its confident prefix.
std::vector<prompt::PlanStep> executed_plan(const prompt::OptionSet& options, char chosen,
                                            const prompt::Paraphrase& option_a, bool no_vision);

/// Cues -> prompt -> options -> decision, then navigation when `simulate`.
/// Backend and plan errors are recorded on the outcome; everything else throws.
ClipOutcome run_clip(const ClipEntry& entry, const RunContext& ctx, prompt::Backend& backend, bool simulate,
                     bool attacked = false);

/// All clips in manifest order on cfg.workers threads, one backend each.
/// Throws DomainError for an empty manifest.
std::vector<ClipOutcome> run_batch(const DatasetManifest& manifest, const RunContext& ctx, bool simulate,
                                   bool attacked = false);

}  // namespace trustnav::harness
