#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustnav/harness/pipeline.hpp"

namespace trustnav::harness {

nlohmann::json rows_json(const std::vector<ClipOutcome>& outcomes);

/// PSSR/CS by category, plus navigation metrics by category when the rows
/// carry episodes. Rows with an error are left out; `errors` counts them.
/// This is the only place aggregates are computed, so a report can be
/// checked by calling it again on the stored rows.
nlohmann::json aggregate(const nlohmann::json& rows);

/// Rows must not contain errors unless the config allows skipping them.
/// Throws DomainError naming the first failed clip otherwise.
void check_errors(const nlohmann::json& rows, const RunConfig& cfg);

/// {"schema_version", "command", "manifest", "seed", "config", "rows", "aggregates"}
nlohmann::json make_report(const std::string& command, const std::string& manifest, const RunConfig& cfg,
                           const std::vector<ClipOutcome>& outcomes);

/// Baseline and attacked runs for the configured pipeline ("full") and for
/// the same pipeline without vocal cues ("text_only").
struct RobustnessRun {
  nlohmann::json baseline_rows;
  nlohmann::json attacked_rows;
  std::vector<attack::AttackResult> deltas;
};

struct RobustnessResult {
  RobustnessRun full;
  RobustnessRun text_only;
  std::size_t reports_compared = 0;
  std::size_t reports_identical = 0;  // vocal cue reports unchanged by the attack
};

/// Deltas for pssr and, when the rows carry episodes, success_rate, spl and
/// distance_to_target (overall aggregates).
std::vector<attack::AttackResult> attack_deltas(const nlohmann::json& baseline_aggregates,
                                                const nlohmann::json& attacked_aggregates);

RobustnessResult run_robustness(const DatasetManifest& manifest, const RunConfig& cfg);

nlohmann::json make_attack_report(const std::string& manifest, const RunConfig& cfg, const RobustnessResult& result);

/// Every aggregate block recomputed from its rows (and attack deltas from
/// their aggregates). Returns a description of each mismatch.
std::vector<std::string> verify_report(const nlohmann::json& report);

/// report.json (or report.json.gz), rows.csv and summary.csv under `dir`.
void write_report(const nlohmann::json& report, const std::filesystem::path& dir, bool gzip = false);

/// Reads a report written by write_report, gzip or plain.
nlohmann::json read_report(const std::filesystem::path& path);

/// Human-readable tables for a report.
std::string summary_text(const nlohmann::json& report);

}  // namespace trustnav::harness
