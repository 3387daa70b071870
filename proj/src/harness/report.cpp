#include "trustnav/harness/report.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace trustnav::harness {
namespace {

struct Block {
  std::string name;
  const nlohmann::json* rows;
  const nlohmann::json* aggregates;
};

std::vector<Block> blocks(const nlohmann::json& report) {
  std::vector<Block> out;
  if (report.contains("runs")) {
    for (const auto& [run, r] : report.at("runs").items())
      for (const char* phase : {"baseline", "attacked"})
        out.push_back({run + "/" + phase, &r.at(phase).at("rows"), &r.at(phase).at("aggregates")});
  } else {
    out.push_back({report.value("command", "run"), &report.at("rows"), &report.at("aggregates")});
  }
  return out;
}

nlohmann::json score_json(const decision::CategoryScore& s) {
  return {{"clips", s.total}, {"correct", s.correct}, {"pssr", s.pssr}, {"mean_confidence", s.mean_confidence}};
}

nlohmann::json nav_json(const std::vector<nav::EpisodeResult>& episodes) {
  if (episodes.empty()) return nullptr;
  const auto m = nav::episode_metrics(episodes);
  return {{"episodes", m.episodes},
          {"success_rate", m.success_rate},
          {"mean_steps", m.mean_steps},
          {"mean_path_distance", m.mean_path_distance},
          {"mean_distance_to_target", m.mean_distance_to_target},
          {"spl", m.spl}};
}

std::string csv_field(const nlohmann::json& v) {
  std::string s = v.is_null() ? "" : v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

std::string rows_csv(const nlohmann::json& report) {
  static const char* cols[] = {"id",           "category",       "pattern",          "truth",       "chosen",
                               "correct",      "confidence",     "cues",             "plan",        "error",
                               "success",      "steps",          "path_distance",    "distance_to_target",
                               "shortest_path", "spl_term",      "supervisor_calls", "conjectures", "termination"};
  std::ostringstream out;
  out << "run";
  for (const char* c : cols) out << ',' << c;
  for (char l : decision::kLabels) out << ",p_" << l;
  out << '\n';
  for (const auto& b : blocks(report)) {
    for (const auto& row : *b.rows) {
      out << csv_field(b.name);
      for (const char* c : cols) {
        const auto it = row.find(c);
        nlohmann::json v = it == row.end() ? nlohmann::json() : *it;
        if (std::string(c) == "cues" && v.is_array()) {
          std::string joined;
          for (const auto& k : v) joined += (joined.empty() ? "" : " ") + k.get<std::string>();
          v = joined;
        }
        out << ',' << csv_field(v);
      }
      const auto d = row.find("distribution");
      for (std::size_t i = 0; i < decision::kLabels.size(); ++i)
        out << ',' << (d == row.end() ? "" : csv_field((*d)[i]));
      out << '\n';
    }
  }
  return out.str();
}

std::string summary_csv(const nlohmann::json& report) {
  std::ostringstream out;
  out << "run,category,clips,correct,pssr,mean_confidence,episodes,success_rate,mean_steps,mean_path_distance,"
         "mean_distance_to_target,spl\n";
  for (const auto& b : blocks(report)) {
    for (const char* cat : {"overall", "LU", "VU"}) {
      const auto& p = b.aggregates->at("pssr").at(cat);
      out << csv_field(b.name) << ',' << cat << ',' << p.at("clips") << ',' << p.at("correct") << ',' << p.at("pssr")
          << ',' << p.at("mean_confidence");
      const auto nav = b.aggregates->find("navigation");
      if (nav != b.aggregates->end() && !nav->at(cat).is_null()) {
        const auto& n = nav->at(cat);
        for (const char* k : {"episodes", "success_rate", "mean_steps", "mean_path_distance", "mean_distance_to_target", "spl"})
          out << ',' << n.at(k);
      } else {
        out << ",,,,,,";
      }
      out << '\n';
    }
  }
  if (report.contains("runs")) {
    out << "\nrun,metric,baseline,attacked,decrease,relative_decrease\n";
    for (const auto& [run, r] : report.at("runs").items())
      for (const auto& d : r.at("deltas"))
        out << run << ',' << d.at("metric").get<std::string>() << ',' << d.at("baseline") << ',' << d.at("attacked") << ','
            << d.at("decrease") << ',' << d.at("relative_decrease") << '\n';
  }
  return out.str();
}

nlohmann::json deltas_json(const std::vector<attack::AttackResult>& deltas) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& d : deltas) out.push_back(d.to_json());
  return out;
}

}  // namespace

nlohmann::json rows_json(const std::vector<ClipOutcome>& outcomes) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& o : outcomes) rows.push_back(o.row());
  return rows;
}

nlohmann::json aggregate(const nlohmann::json& rows) {
  std::vector<decision::EvaluationRecord> records;
  std::vector<nav::EpisodeResult> all, lu, vu;
  std::size_t errors = 0;
  for (const auto& row : rows) {
    if (!row.at("error").is_null()) {
      ++errors;
      continue;
    }
    decision::EvaluationRecord rec;
    rec.clip_id = row.at("id").get<std::string>();
    rec.category = decision::parse_category(row.at("category").get<std::string>());
    rec.truth = row.at("truth").get<std::string>().at(0);
    rec.decision.clip_id = rec.clip_id;
    rec.decision.chosen = row.at("chosen").get<std::string>().at(0);
    rec.decision.confidence = row.at("confidence").get<double>();
    records.push_back(rec);
    if (row.contains("success")) {
      nav::EpisodeResult e;
      e.success = row.at("success").get<bool>();
      e.steps = row.at("steps").get<int>();
      e.path_distance = row.at("path_distance").get<double>();
      e.distance_to_target = row.at("distance_to_target").get<double>();
      e.shortest_path = row.at("shortest_path").get<double>();
      e.spl_term = row.at("spl_term").get<double>();
      all.push_back(e);
      (rec.category == decision::Category::LU ? lu : vu).push_back(e);
    }
  }
  nlohmann::json out = {{"clips", rows.size()}, {"errors", errors}};
  if (records.empty()) {
    out["pssr"] = nullptr;
    return out;
  }
  const auto p = decision::pssr(records);
  out["pssr"] = {{"overall", score_json(p.overall)}, {"LU", score_json(p.lu)}, {"VU", score_json(p.vu)}};
  if (!all.empty()) out["navigation"] = {{"overall", nav_json(all)}, {"LU", nav_json(lu)}, {"VU", nav_json(vu)}};
  return out;
}

void check_errors(const nlohmann::json& rows, const RunConfig& cfg) {
  std::size_t ok = 0;
  for (const auto& row : rows) {
    if (row.at("error").is_null()) {
      ++ok;
      continue;
    }
    if (!cfg.skip_errors)
      throw DomainError("clip " + row.at("id").get<std::string>() + " failed: " + row.at("error").get<std::string>() +
                        " (use --skip-errors to exclude failed clips)");
  }
  if (ok == 0) throw DomainError("every clip failed");
}

nlohmann::json make_report(const std::string& command, const std::string& manifest, const RunConfig& cfg,
                           const std::vector<ClipOutcome>& outcomes) {
  auto rows = rows_json(outcomes);
  check_errors(rows, cfg);
  auto agg = aggregate(rows);
  return {{"schema_version", kSchemaVersion}, {"command", command},   {"manifest", manifest},      {"seed", cfg.seed},
          {"config", cfg.to_json()},          {"rows", std::move(rows)}, {"aggregates", std::move(agg)}};
}

std::vector<attack::AttackResult> attack_deltas(const nlohmann::json& b, const nlohmann::json& a) {
  std::vector<attack::AttackResult> out;
  out.push_back(attack::compare("pssr", b.at("pssr").at("overall").at("pssr").get<double>(),
                                a.at("pssr").at("overall").at("pssr").get<double>()));
  if (b.contains("navigation") && a.contains("navigation")) {
    const auto& bn = b["navigation"]["overall"];
    const auto& an = a["navigation"]["overall"];
    for (const char* k : {"success_rate", "spl"}) out.push_back(attack::compare(k, bn.at(k).get<double>(), an.at(k).get<double>()));
    out.push_back(attack::compare("distance_to_target", bn.at("mean_distance_to_target").get<double>(),
                                  an.at("mean_distance_to_target").get<double>()));
  }
  return out;
}

RobustnessResult run_robustness(const DatasetManifest& manifest, const RunConfig& cfg) {
  bool simulate = !manifest.clips.empty();
  for (const auto& c : manifest.clips) simulate = simulate && c.environment.has_value();

  RobustnessResult result;
  std::vector<std::string> full_reports[2];
  auto one = [&](const RunConfig& run_cfg, RobustnessRun& run, bool keep_reports) {
    const auto ctx = RunContext::create(run_cfg, manifest, simulate);
    const auto base = run_batch(manifest, ctx, simulate, false);
    const auto att = run_batch(manifest, ctx, simulate, true);
    run.baseline_rows = rows_json(base);
    run.attacked_rows = rows_json(att);
    check_errors(run.baseline_rows, run_cfg);
    check_errors(run.attacked_rows, run_cfg);
    run.deltas = attack_deltas(aggregate(run.baseline_rows), aggregate(run.attacked_rows));
    if (keep_reports)
      for (std::size_t i = 0; i < base.size(); ++i) {
        full_reports[0].push_back(base[i].vocal_report);
        full_reports[1].push_back(att[i].vocal_report);
      }
  };
  one(cfg, result.full, true);
  RunConfig text_only = cfg;
  text_only.ablation.no_vocal = true;
  one(text_only, result.text_only, false);
  result.reports_compared = full_reports[0].size();
  for (std::size_t i = 0; i < full_reports[0].size(); ++i)
    if (full_reports[0][i] == full_reports[1][i]) ++result.reports_identical;
  return result;
}

nlohmann::json make_attack_report(const std::string& manifest, const RunConfig& cfg, const RobustnessResult& result) {
  auto run_json = [](const RobustnessRun& r) {
    return nlohmann::json{{"baseline", {{"rows", r.baseline_rows}, {"aggregates", aggregate(r.baseline_rows)}}},
                          {"attacked", {{"rows", r.attacked_rows}, {"aggregates", aggregate(r.attacked_rows)}}},
                          {"deltas", deltas_json(r.deltas)}};
  };
  return {{"schema_version", kSchemaVersion},
          {"command", "attack"},
          {"manifest", manifest},
          {"seed", cfg.seed},
          {"config", cfg.to_json()},
          {"runs", {{"full", run_json(result.full)}, {"text_only", run_json(result.text_only)}}},
          {"vocal_reports", {{"compared", result.reports_compared}, {"identical", result.reports_identical}}}};
}

std::vector<std::string> verify_report(const nlohmann::json& report) {
  std::vector<std::string> problems;
  try {
    if (report.value("schema_version", 0) != kSchemaVersion) problems.push_back("unsupported schema_version");
    for (const auto& b : blocks(report)) {
      for (const auto& row : *b.rows) {
        if (!row.contains("chosen") || row.at("chosen").is_null()) continue;
        if (row.at("correct").get<bool>() != (row.at("chosen") == row.at("truth")))
          problems.push_back(b.name + ": row " + row.at("id").get<std::string>() + " has an inconsistent correct flag");
      }
      const auto again = aggregate(*b.rows);
      if (again != *b.aggregates) problems.push_back(b.name + ": aggregates do not match the rows");
    }
    if (report.contains("runs")) {
      for (const auto& [run, r] : report.at("runs").items()) {
        const auto again = deltas_json(attack_deltas(r.at("baseline").at("aggregates"), r.at("attacked").at("aggregates")));
        if (again != r.at("deltas")) problems.push_back(run + ": deltas do not match the aggregates");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    problems.push_back(std::string("malformed report: ") + e.what());
  } catch (const Error& e) {
    problems.push_back(std::string("malformed report: ") + e.what());
  }
  return problems;
}

void write_report(const nlohmann::json& report, const std::filesystem::path& dir, bool gzip) {
  std::filesystem::create_directories(dir);
  const std::string text = report.dump(1) + "\n";
  if (gzip) {
    const auto path = (dir / "report.json.gz").string();
    gzFile f = gzopen(path.c_str(), "wb9");
    if (!f) throw InputError("cannot write " + path);
    // gzip stores an mtime in its header; gzopen leaves it zero, so output stays reproducible.
    const int n = gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
    if (gzclose(f) != Z_OK || n != static_cast<int>(text.size())) throw InputError("failed writing " + path);
  } else {
    write_file(dir / "report.json", text);
  }
  write_file(dir / "rows.csv", rows_csv(report));
  write_file(dir / "summary.csv", summary_csv(report));
}

nlohmann::json read_report(const std::filesystem::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");  // reads plain files too
  if (!f) throw InputError("cannot open " + path.string());
  std::string text;
  char buf[1 << 15];
  int n;
  while ((n = gzread(f, buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(n));
  gzclose(f);
  if (n < 0) throw InputError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string summary_text(const nlohmann::json& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %-8s %6s %8s %8s %6s %7s %9s %9s %6s\n", "run", "category", "clips", "PSSR", "CS",
                "SR", "Steps", "PathDist", "DistToTgt", "SPL");
  out << line;
  for (const auto& b : blocks(report)) {
    const auto& agg = *b.aggregates;
    if (agg.at("pssr").is_null()) continue;
    for (const char* cat : {"overall", "LU", "VU"}) {
      const auto& p = agg["pssr"][cat];
      if (p.at("clips").get<int>() == 0) continue;
      std::snprintf(line, sizeof line, "%-20s %-8s %6d %7.2f%% %8.4f", b.name.c_str(), cat, p.at("clips").get<int>(),
                    100.0 * p.at("pssr").get<double>(), p.at("mean_confidence").get<double>());
      out << line;
      if (agg.contains("navigation") && !agg["navigation"][cat].is_null()) {
        const auto& n = agg["navigation"][cat];
        std::snprintf(line, sizeof line, " %5.1f%% %7.2f %9.2f %9.2f %6.3f", 100.0 * n.at("success_rate").get<double>(),
                      n.at("mean_steps").get<double>(), n.at("mean_path_distance").get<double>(),
                      n.at("mean_distance_to_target").get<double>(), n.at("spl").get<double>());
        out << line;
      }
      out << '\n';
    }
    if (agg.at("errors").get<int>() > 0) out << "  (" << agg["errors"].get<int>() << " clips failed and were skipped)\n";
  }
  if (report.contains("runs")) {
    out << '\n';
    std::snprintf(line, sizeof line, "%-10s %-20s %10s %10s %10s %9s\n", "run", "metric", "baseline", "attacked", "decrease",
                  "relative");
    out << line;
    for (const auto& [run, r] : report.at("runs").items())
      for (const auto& d : r.at("deltas")) {
        std::snprintf(line, sizeof line, "%-10s %-20s %10.4f %10.4f %10.4f %8.2f%%\n", run.c_str(),
                      d.at("metric").get<std::string>().c_str(), d.at("baseline").get<double>(),
                      d.at("attacked").get<double>(), d.at("decrease").get<double>(),
                      100.0 * d.at("relative_decrease").get<double>());
        out << line;
      }
    const auto& v = report.at("vocal_reports");
    out << "vocal cue reports unchanged by the attack: " << v.at("identical") << " of " << v.at("compared") << '\n';
  }
  return out.str();
}

}  // namespace trustnav::harness
