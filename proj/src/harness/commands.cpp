#include "trustnav/harness/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "trustnav/audio/wav.hpp"
#include "trustnav/harness/corpus.hpp"
#include "trustnav/harness/report.hpp"

namespace trustnav::harness {
namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backend;
  std::optional<int> workers;
  std::string mock_rules;
  std::string out;
  bool no_vocal = false;
  bool no_vision = false;
  bool skip_errors = false;
  bool gzip = false;
  bool json = false;

  std::string manifest;
  std::string clip;
  std::string audio;
  std::string transcript;
  std::string target;
  std::string spec;
  std::string report;
};

RunConfig resolve_config(const Options& o) {
  RunConfig cfg;
  if (!o.config.empty()) {
    auto j = read_json(o.config);
    // A report works as a config: rerunning from its snapshot repeats the run.
    if (j.is_object() && j.contains("config") && j.contains("command")) j = j["config"];
    cfg = RunConfig::from_json(j);
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.backend) cfg.backend.kind = *o.backend;
  if (o.workers) cfg.workers = *o.workers;
  if (!o.mock_rules.empty()) cfg.backend.mock_rules = o.mock_rules;
  cfg.ablation.no_vocal = cfg.ablation.no_vocal || o.no_vocal;
  cfg.ablation.no_vision = cfg.ablation.no_vision || o.no_vision;
  cfg.skip_errors = cfg.skip_errors || o.skip_errors;
  cfg.validate();
  return cfg;
}

// Batch metrics are only comparable when decoding is greedy.
void require_greedy(const RunConfig& cfg) {
  if (cfg.backend.temperature != 0.0)
    throw InputError("evaluate, simulate and attack need backend temperature 0 (got " +
                     std::to_string(cfg.backend.temperature) + ")");
}

std::string manifest_label(const DatasetManifest& m) { return m.source.generic_string(); }

nlohmann::json read_spec(const std::string& spec) {
  if (!spec.empty() && spec.front() == '{') {
    try {
      return nlohmann::json::parse(spec);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(std::string("--spec: ") + e.what());
    }
  }
  return read_json(spec);
}

void finish_report(const nlohmann::json& report, const Options& o, std::ostream& out) {
  if (!o.out.empty()) write_report(report, o.out, o.gzip);
  if (o.json) out << report.dump(1) << '\n';
  else out << summary_text(report);
}

int cmd_generate(const Options& o, std::ostream& out) {
  const auto cfg = resolve_config(o);
  if (o.out.empty()) throw InputError("generate needs --out");
  const auto spec = CorpusSpec::from_json(read_spec(o.spec));
  const auto m = generate_corpus(spec, cfg.seed, o.out);
  std::size_t lu = 0;
  for (const auto& c : m.clips) lu += c.category == decision::Category::LU;
  out << "wrote " << m.clips.size() << " clips (" << lu << " LU, " << m.clips.size() - lu << " VU) and "
      << m.environments.size() << " environments to " << (std::filesystem::path(o.out) / "manifest.json").generic_string()
      << '\n';
  return kExitOk;
}

// A single clip either from a manifest or from loose files.
struct Single {
  ClipEntry entry;
  std::optional<DatasetManifest> manifest;
  bool has_truth = false;
};

Single single_clip(const Options& o) {
  Single s;
  if (!o.manifest.empty()) {
    if (o.clip.empty()) throw InputError("--manifest needs --clip");
    s.manifest = DatasetManifest::load(o.manifest);
    s.entry = s.manifest->clip(o.clip);
    s.has_truth = true;
    return s;
  }
  if (o.audio.empty() || o.transcript.empty()) throw InputError("give --manifest and --clip, or --audio and --transcript");
  if (!std::filesystem::is_regular_file(o.audio)) throw InputError("audio file not found: " + o.audio);
  s.entry.id = std::filesystem::path(o.audio).stem().string();
  s.entry.audio = o.audio;
  auto tj = read_json(o.transcript);
  if (!tj.contains("id")) tj["id"] = s.entry.id;
  s.entry.transcript = language::parse_transcript(tj);
  s.entry.target = o.target.empty() ? "target" : o.target;
  return s;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const auto cfg = resolve_config(o);
  const auto res = Resources::load(cfg);
  const auto s = single_clip(o);
  const auto clip = audio::load_wav(s.entry.audio);
  const auto a = analyze_clip(clip, s.entry.transcript, cfg, res);
  const auto lines = prompt::render_cues(a.transcript, a.segments, a.cues);
  if (o.json) {
    nlohmann::json signals = nlohmann::json::array();
    for (const auto& l : lines) signals.push_back(l.text);
    out << nlohmann::json{{"clip", s.entry.id},
                          {"transcript", a.transcript.text()},
                          {"vocal_report", to_json(a.report)},
                          {"cues", to_json(a.cues, a.transcript)},
                          {"signals", signals}}
               .dump(1)
        << '\n';
    return kExitOk;
  }
  out << "clip: " << s.entry.id << '\n' << "transcript: " << a.transcript.text() << '\n';
  if (lines.empty()) {
    out << "no signals\n";
  } else {
    out << "signals:\n";
    for (const auto& l : lines) out << "- " << l.text << '\n';
  }
  return kExitOk;
}

int cmd_decide(const Options& o, std::ostream& out) {
  const auto cfg = resolve_config(o);
  const auto s = single_clip(o);
  DatasetManifest one;
  one.clips.push_back(s.entry);
  one.clips.back().environment.reset();  // deciding needs no scene
  const auto ctx = RunContext::create(cfg, one, false);
  auto backend = ctx.make_backend();

  const auto clip = audio::load_wav(s.entry.audio);
  const auto a = analyze_clip(clip, s.entry.transcript, cfg, ctx.resources);
  const auto bundle = prompt::build_prompt(a.transcript, a.segments, a.cues, s.entry.target, ctx.resources.prompt_assets,
                                           ctx.resources.lexicon);
  const auto options = prompt::request_options(bundle, *backend);
  const auto rho = prompt::score_options(bundle, options, *backend);
  const char chosen = decision::select_action(rho);

  if (o.json) {
    nlohmann::json opts = nlohmann::json::array();
    for (const auto& opt : options.options) {
      nlohmann::json plan = nlohmann::json::array();
      for (const auto& st : opt.plan) plan.push_back(st.to_string());
      opts.push_back({{"label", std::string(1, opt.label)}, {"text", opt.text}, {"plan", plan}});
    }
    nlohmann::json j = {{"clip", s.entry.id}, {"options", opts}, {"distribution", rho.probs}, {"chosen", std::string(1, chosen)}};
    if (s.has_truth) {
      j["truth"] = std::string(1, s.entry.truth);
      j["confidence"] = decision::confidence_score(rho, s.entry.truth);
    }
    out << j.dump(1) << '\n';
    return kExitOk;
  }
  out << "clip: " << s.entry.id << '\n' << "instruction: " << bundle.transcript_text << '\n' << "signals:\n"
      << bundle.cue_rendering << '\n' << "options:\n";
  for (std::size_t i = 0; i < options.options.size(); ++i) {
    const auto& opt = options.options[i];
    char p[32];
    std::snprintf(p, sizeof p, "%.4f", rho.probs[i]);
    out << (opt.label == chosen ? "* " : "  ") << opt.label << " (" << p << ") " << opt.text << "  "
        << prompt::to_string(opt.plan) << '\n';
  }
  out << "chosen: " << chosen << '\n';
  if (s.has_truth)
    out << "truth: " << s.entry.truth << "  confidence: " << decision::confidence_score(rho, s.entry.truth) << '\n';
  return kExitOk;
}

int cmd_batch(const Options& o, std::ostream& out, bool simulate) {
  const auto cfg = resolve_config(o);
  require_greedy(cfg);
  if (o.manifest.empty()) throw InputError("--manifest is required");
  const auto m = DatasetManifest::load(o.manifest);
  if (m.clips.empty()) throw InputError("manifest " + o.manifest + " has no clips");
  const auto ctx = RunContext::create(cfg, m, simulate);
  const auto outcomes = run_batch(m, ctx, simulate);
  finish_report(make_report(simulate ? "simulate" : "evaluate", manifest_label(m), cfg, outcomes), o, out);
  return kExitOk;
}

int cmd_attack(const Options& o, std::ostream& out) {
  const auto cfg = resolve_config(o);
  require_greedy(cfg);
  if (o.manifest.empty()) throw InputError("--manifest is required");
  const auto m = DatasetManifest::load(o.manifest);
  if (m.clips.empty()) throw InputError("manifest " + o.manifest + " has no clips");
  finish_report(make_attack_report(manifest_label(m), cfg, run_robustness(m, cfg)), o, out);
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  const auto report = read_report(o.report);
  const auto problems = verify_report(report);
  for (const auto& p : problems) err << "report check failed: " << p << '\n';
  if (!problems.empty()) return kExitFailure;
  if (!o.out.empty()) write_report(report, o.out, o.gzip);
  out << summary_text(report);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Uncertainty-aware spoken navigation: cue extraction, option selection and simulated navigation", "trustnav"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config, "Run configuration JSON (a previous report also works)");
  app.add_option("--seed", o.seed, "Seed for corpus generation; recorded in reports");
  app.add_option("--backend", o.backend, "Decision backend")->check(CLI::IsMember({"mock", "http"}));
  app.add_option("--workers", o.workers, "Clip-level worker threads")->check(CLI::Range(1, 256));
  app.add_option("--mock-rules", o.mock_rules, "Rules file for the mock backend");
  app.add_option("--out", o.out, "Output directory");
  app.add_flag("--no-vocal", o.no_vocal, "Ablation: ignore vocal cues");
  app.add_flag("--no-vision", o.no_vision, "Ablation: no scene conjecture while exploring");
  app.add_flag("--skip-errors", o.skip_errors, "Leave failed clips out of the metrics instead of failing the run");
  app.add_flag("--gzip", o.gzip, "Write report.json.gz instead of report.json");
  app.add_flag("--json", o.json, "Print JSON instead of tables");

  auto* generate = app.add_subcommand("generate", "Synthesize a corpus of clips, transcripts and environments");
  generate->add_option("--spec", o.spec, "Corpus spec: JSON file or inline JSON")->required();

  auto add_single = [&](CLI::App* sub) {
    sub->add_option("--manifest", o.manifest, "Dataset manifest");
    sub->add_option("--clip", o.clip, "Clip id within the manifest");
    sub->add_option("--audio", o.audio, "WAV file");
    sub->add_option("--transcript", o.transcript, "Transcript JSON with timed words");
    sub->add_option("--target", o.target, "Target object name");
  };
  auto* analyze = app.add_subcommand("analyze", "Print the vocal and semantic cues of one clip");
  add_single(analyze);
  auto* decide = app.add_subcommand("decide", "Run option generation and selection for one clip");
  add_single(decide);
  auto* evaluate = app.add_subcommand("evaluate", "PSSR and confidence over a manifest");
  auto* simulate = app.add_subcommand("simulate", "Decide and navigate every clip of a manifest");
  auto* attack = app.add_subcommand("attack", "Compare metrics before and after the token attack");
  for (auto* sub : {evaluate, simulate, attack}) sub->add_option("--manifest", o.manifest, "Dataset manifest")->required();
  auto* report = app.add_subcommand("report", "Check a report's aggregates and print its tables");
  report->add_option("report", o.report, "report.json or report.json.gz")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "trustnav: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (generate->parsed()) return cmd_generate(o, out);
    if (analyze->parsed()) return cmd_analyze(o, out);
    if (decide->parsed()) return cmd_decide(o, out);
    if (evaluate->parsed()) return cmd_batch(o, out, false);
    if (simulate->parsed()) return cmd_batch(o, out, true);
    if (attack->parsed()) return cmd_attack(o, out);
    if (report->parsed()) return cmd_report(o, out, err);
  } catch (const InputError& e) {
    err << "trustnav: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "trustnav: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "trustnav: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitInput;
}

}  // namespace trustnav::harness
