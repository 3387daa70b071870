#include <doctest.h>

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "support/corpora.hpp"
#include "support/synth.hpp"
#include "support/tempdir.hpp"
#include "trustnav/audio/wav.hpp"
#include "trustnav/harness/commands.hpp"
#include "trustnav/harness/pool.hpp"
#include "trustnav/harness/report.hpp"

using namespace trustnav;
using namespace trustnav::harness;
using testsupport::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Every regular file under `dir`, keyed by relative path.
std::map<std::string, std::string> tree(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[e.path().lexically_relative(dir).generic_string()] = slurp(e.path());
  return out;
}

struct Cli {
  int code;
  std::string out, err;
};

Cli cli(std::vector<std::string> args) {
  args.insert(args.begin(), "trustnav");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

/// The 40-clip agreement corpus, generated once.
const DatasetManifest& agreement() {
  static TempDir dir("agreement");
  static const DatasetManifest m = generate_corpus(CorpusSpec::from_json({{"LU", 20}, {"VU", 20}}), 11, dir.path());
  return m;
}

RunConfig config_with_rules(const std::filesystem::path& rules) {
  RunConfig cfg;
  cfg.backend.mock_rules = rules.string();
  return cfg;
}

}  // namespace

TEST_CASE("corpus spec") {
  const auto dnia = CorpusSpec::from_json({{"LU", 285}, {"VU", 215}});
  CHECK(dnia.total() == 500);
  int lu = 0, vu = 0;
  for (const auto& [p, k] : dnia.counts.at(decision::Category::LU)) lu += k;
  for (const auto& [p, k] : dnia.counts.at(decision::Category::VU)) vu += k;
  CHECK(lu == 285);
  CHECK(vu == 215);
  CHECK(dnia.counts.at(decision::Category::VU).at(Pattern::loudness) == 43);

  const auto one = CorpusSpec::from_json({{"LU", 0}, {"VU", {{"pitch-rise-on-final-word", 1}}}});
  CHECK(one.total() == 1);
  CHECK_THROWS_AS(CorpusSpec::from_json({{"LU", 0}}), InputError);
  CHECK_THROWS_AS(CorpusSpec::from_json({{"LU", -3}}), InputError);
  CHECK_THROWS_AS(CorpusSpec::from_json({{"VU", {{"shouting", 2}}}}), InputError);
  CHECK_THROWS_AS(CorpusSpec::from_json({{"VU", 2}, {"layout", "spiral"}}), InputError);
  CHECK_THROWS_AS(CorpusSpec::from_json({{"VU", 2}, {"scene", "garage"}}), InputError);
  CHECK(CorpusSpec::from_json(dnia.to_json()).to_json() == dnia.to_json());
}

TEST_CASE("generated pitch clip yields a pitch event on its last word") {
  TempDir dir("pitch");
  const auto m = generate_corpus(CorpusSpec::from_json({{"LU", 0}, {"VU", {{"pitch-rise-on-final-word", 1}}}}), 5, dir.path());
  REQUIRE(m.clips.size() == 1);
  const auto& c = m.clips[0];
  CHECK(c.truth == 'B');
  const auto a = analyze_clip(audio::load_wav(c.audio), c.transcript, RunConfig{}, Resources::load(RunConfig{}));
  REQUIRE(a.cues.pitch_word);
  CHECK(*a.cues.pitch_word == c.transcript.size() - 1);
  CHECK_FALSE(a.cues.loudness_word);
  CHECK(a.cues.hesitant_segments.empty());
  CHECK(a.cues.semantic.empty());
}

TEST_CASE("generation is deterministic per seed") {
  TempDir a("det-a"), b("det-b"), c("det-c");
  const auto spec = CorpusSpec::from_json({{"LU", 4}, {"VU", 5}});
  generate_corpus(spec, 99, a.path());
  generate_corpus(spec, 99, b.path());
  generate_corpus(spec, 100, c.path());
  const auto ta = tree(a.path());
  CHECK(ta.count("manifest.json") == 1);
  CHECK(std::count_if(ta.begin(), ta.end(), [](const auto& kv) { return kv.first.starts_with("audio/"); }) == 9);
  CHECK(ta == tree(b.path()));
  CHECK(ta.at("manifest.json") != tree(c.path()).at("manifest.json"));
}

TEST_CASE("property: generated cues match the planted pattern exactly") {
  TempDir dir("patterns");
  const auto m = generate_corpus(CorpusSpec::from_json({{"LU", 16}, {"VU", 20}}), 23, dir.path());
  const RunConfig cfg;
  const auto res = Resources::load(cfg);
  for (const auto& c : m.clips) {
    CAPTURE(c.id);
    CAPTURE(c.pattern);
    const auto a = analyze_clip(audio::load_wav(c.audio), c.transcript, cfg, res);
    const Pattern p = parse_pattern(c.pattern);
    CHECK(a.cues.loudness_word.has_value() == (p == Pattern::loudness));
    CHECK(a.cues.pitch_word.has_value() == (p == Pattern::pitch || p == Pattern::both));
    CHECK(!a.cues.hesitant_segments.empty() == (p == Pattern::slow));
    CHECK(!a.cues.semantic.ambiguous.empty() == (p == Pattern::hedge || p == Pattern::both));
    CHECK(!a.cues.semantic.repairs.empty() == (p == Pattern::repair));
    CHECK(!a.cues.semantic.hesitations.empty() == (p == Pattern::filler));
    for (const char* kind : {"loudness", "pitch"}) {
      if (!c.planted.contains(kind)) continue;
      const auto& ev = std::string(kind) == "loudness" ? a.report.loudness_event : a.report.pitch_event;
      REQUIRE(ev);
      CHECK(std::abs(ev->time - c.planted[kind]["time"].get<double>()) <= 0.02);
      CHECK(ev->change > 0.0);
    }
  }
}

TEST_CASE("manifest validation") {
  TempDir dir("manifest");
  const auto m = generate_corpus(CorpusSpec::from_json({{"LU", 2}, {"VU", 1}}), 3, dir.path());
  auto j = m.to_json(dir.path());
  CHECK(DatasetManifest::from_json(j, dir.path()).to_json(dir.path()) == j);

  auto dup = j;
  dup["clips"][1]["id"] = dup["clips"][0]["id"];
  CHECK_THROWS_AS(DatasetManifest::from_json(dup, dir.path()), InputError);
  auto missing = j;
  missing["clips"][0]["audio"] = "audio/nope.wav";
  CHECK_THROWS_AS(DatasetManifest::from_json(missing, dir.path()), InputError);
  auto env = j;
  env["clips"][0]["environment"] = "attic";
  CHECK_THROWS_AS(DatasetManifest::from_json(env, dir.path()), InputError);
  auto label = j;
  label["clips"][0]["truth"] = "F";
  CHECK_THROWS_AS(DatasetManifest::from_json(label, dir.path()), InputError);
  auto overlap = j;
  overlap["clips"][0]["words"][1]["start"] = 0.0;
  CHECK_THROWS_AS(DatasetManifest::from_json(overlap, dir.path()), InputError);
  auto version = j;
  version["schema_version"] = 2;
  CHECK_THROWS_AS(DatasetManifest::from_json(version, dir.path()), InputError);
}

TEST_CASE("run config round trip and validation") {
  RunConfig cfg;
  cfg.seed = 1234;
  cfg.workers = 3;
  cfg.ablation.no_vision = true;
  cfg.thresholds.loudness_db = 7.5;
  cfg.policy.vision_distance = 2.0;
  cfg.backend.mock_rules = "rules.json";
  CHECK(RunConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
  auto j = cfg.to_json();
  j["workers"] = 0;
  CHECK_THROWS_AS(RunConfig::from_json(j), InputError);
  j = cfg.to_json();
  j["schema_version"] = 9;
  CHECK_THROWS_AS(RunConfig::from_json(j), InputError);
  j = cfg.to_json();
  j["thresholds"]["hop_ms"] = -1.0;
  CHECK_THROWS_AS(RunConfig::from_json(j), InputError);
}

TEST_CASE("run_ordered emits in index order and surfaces the first failure") {
  for (int workers : {1, 2, 5}) {
    std::vector<std::size_t> seen;
    run_ordered(
        50, workers,
        [](std::size_t i, int) {
          std::this_thread::sleep_for(std::chrono::microseconds((i * 7919) % 300));
          return i * i;
        },
        [&](std::size_t i, std::size_t v) {
          CHECK(v == i * i);
          seen.push_back(i);
        });
    REQUIRE(seen.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) CHECK(seen[i] == i);

    seen.clear();
    CHECK_THROWS_WITH(run_ordered(
                          40, workers,
                          [](std::size_t i, int) {
                            if (i == 17 || i == 30) throw std::runtime_error("item " + std::to_string(i));
                            return i;
                          },
                          [&](std::size_t i, std::size_t) { seen.push_back(i); }),
                      "item 17");
    REQUIRE(seen.size() == 17);
    for (std::size_t i = 0; i < 17; ++i) CHECK(seen[i] == i);
  }
}

TEST_CASE("executed_plan without vision follows the instruction") {
  prompt::OptionSet options;
  const char labels[] = "ABCDE";
  for (int i = 0; i < 5; ++i) options.options[static_cast<std::size_t>(i)].label = labels[i];
  options.options[0].plan = {{"move_to", "sofa"}, {"turn", "left"}, {"move_to", "lamp"}};
  options.options[1].plan = {{"move_to", "sofa"}, {"explore_here", ""}};
  options.options[4].plan = {{"ask_person", ""}};
  prompt::Paraphrase a{"", options.options[0].plan, {{"move_to", "sofa"}}};
  CHECK(executed_plan(options, 'B', a, false) == options.options[1].plan);
  CHECK(executed_plan(options, 'B', a, true) ==
        std::vector<prompt::PlanStep>{{"move_to", "sofa"}, {"turn", "left"}, {"move_to", "lamp"}});
  CHECK(executed_plan(options, 'E', a, true) == options.options[4].plan);
  prompt::Paraphrase all_certain{"", options.options[0].plan, options.options[0].plan};
  CHECK(executed_plan(options, 'B', all_certain, true) == options.options[1].plan);
}

TEST_CASE("evaluate: agreement corpus and designed mismatches") {
  const auto& m = agreement();
  CHECK(m.clips.size() == 40);
  CHECK(testsupport::count_pattern(m, {"loudness"}) == 4);

  const RunConfig cfg;
  const auto report = make_report("evaluate", "agreement", cfg, run_batch(m, RunContext::create(cfg, m, false), false));
  CHECK(report["aggregates"]["pssr"]["overall"]["pssr"].get<double>() == 1.0);
  CHECK(verify_report(report).empty());

  TempDir dir("mismatch");
  testsupport::write_json(dir / "rules.json", testsupport::mismatch_rules());
  const auto mcfg = config_with_rules(dir / "rules.json");
  const auto mismatched = make_report("evaluate", "agreement", mcfg, run_batch(m, RunContext::create(mcfg, m, false), false));
  CHECK(mismatched["aggregates"]["pssr"]["overall"]["pssr"].get<double>() == 0.9);
  CHECK(mismatched["aggregates"]["pssr"]["VU"]["correct"] == 16);
  for (const auto& row : mismatched["rows"])
    CHECK((row["chosen"] == "E") == (row["pattern"] == "loudness"));

  CHECK_THROWS_AS(run_batch(DatasetManifest{}, RunContext::create(cfg, DatasetManifest{}, false), false), DomainError);
}

TEST_CASE("simulate: confident corpus, scene replica, ablations") {
  TempDir dir("simulate");
  const auto confident = generate_corpus(CorpusSpec::from_json({{"LU", {{"none", 6}}}}), 8, dir / "confident");
  const RunConfig cfg;
  const auto rows = rows_json(run_batch(confident, RunContext::create(cfg, confident, true), true));
  const auto agg = aggregate(rows);
  CHECK(agg["navigation"]["overall"]["success_rate"].get<double>() == 1.0);
  CHECK(agg["navigation"]["overall"]["spl"].get<double>() > 0.9);

  const auto scene = generate_corpus(
      CorpusSpec::from_json({{"VU", {{"pitch", 1}}}, {"layout", "fixed"}, {"scene", "living-room"}}), 1, dir / "scene");
  const auto full = run_batch(scene, RunContext::create(cfg, scene, true), true);
  REQUIRE(full[0].episode);
  CHECK(full[0].decision.chosen == 'B');
  CHECK(full[0].episode->success);
  CHECK(full[0].episode->distance_to_target <= 1.5 + 1e-9);
  CHECK(full[0].episode->conjectures >= 1);

  RunConfig blind = cfg;
  blind.ablation.no_vision = true;
  const auto no_vision = run_batch(scene, RunContext::create(blind, scene, true), true);
  CHECK(no_vision[0].decision.chosen == 'B');
  CHECK_FALSE(no_vision[0].episode->success);

  RunConfig deaf = cfg;
  deaf.ablation.no_vocal = true;
  const auto no_vocal = run_batch(scene, RunContext::create(deaf, scene, true), true);
  CHECK(no_vocal[0].decision.chosen == 'A');
  CHECK_FALSE(no_vocal[0].episode->success);

  DatasetManifest no_env = confident;
  no_env.clips[0].environment.reset();
  CHECK_THROWS_AS(RunContext::create(cfg, no_env, true), InputError);
}

TEST_CASE("reports: determinism, worker independence, snapshot rerun, tamper detection") {
  const auto& m = agreement();
  RunConfig one;
  RunConfig three;
  three.workers = 3;
  const auto r1 = make_report("simulate", "m", one, run_batch(m, RunContext::create(one, m, true), true));
  const auto r2 = make_report("simulate", "m", one, run_batch(m, RunContext::create(one, m, true), true));
  const auto r3 = make_report("simulate", "m", three, run_batch(m, RunContext::create(three, m, true), true));
  CHECK(r1.dump() == r2.dump());
  CHECK(r1["rows"] == r3["rows"]);
  CHECK(r1["aggregates"] == r3["aggregates"]);

  const auto snap = RunConfig::from_json(r3["config"]);
  const auto again = make_report("simulate", "m", snap, run_batch(m, RunContext::create(snap, m, true), true));
  CHECK(again.dump() == r3.dump());

  CHECK(verify_report(r1).empty());
  auto tampered = r1;
  tampered["rows"][0]["chosen"] = "C";
  tampered["rows"][0]["correct"] = false;
  CHECK(verify_report(tampered).size() == 1);
  auto tampered_agg = r1;
  tampered_agg["aggregates"]["navigation"]["overall"]["spl"] = 0.99;
  CHECK_FALSE(verify_report(tampered_agg).empty());

  TempDir dir("report");
  write_report(r1, dir.path());
  write_report(r1, dir / "gz", true);
  CHECK(read_report(dir / "report.json") == r1);
  CHECK(read_report(dir / "gz/report.json.gz") == r1);
  CHECK(slurp(dir / "rows.csv") == slurp(dir / "gz/rows.csv"));
  const auto csv = slurp(dir / "rows.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);
}

TEST_CASE("property: report aggregates recompute from rows under random error masks") {
  const auto& m = agreement();
  RunConfig cfg;
  cfg.skip_errors = true;
  const auto base = rows_json(run_batch(m, RunContext::create(cfg, m, true), true));
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    auto rows = base;
    for (auto& row : rows)
      if (rng() % 5 == 0) row = nlohmann::json{{"id", row["id"]}, {"category", row["category"]}, {"pattern", row["pattern"]},
                                               {"truth", row["truth"]}, {"cues", row["cues"]}, {"error", "backend: down"}};
    std::size_t ok = 0, correct = 0;
    for (const auto& row : rows)
      if (row["error"].is_null()) {
        ++ok;
        correct += row["correct"].get<bool>();
      }
    if (ok == 0) continue;
    const auto agg = aggregate(rows);
    CHECK(agg["errors"].get<std::size_t>() == rows.size() - ok);
    CHECK(agg["pssr"]["overall"]["pssr"].get<double>() == static_cast<double>(correct) / static_cast<double>(ok));
    nlohmann::json report = {{"schema_version", 1}, {"command", "simulate"}, {"rows", rows}, {"aggregates", agg}};
    CHECK(verify_report(report).empty());
  }
}

TEST_CASE("attack: vocal corpus unaffected, textual corpus loses its textual clips") {
  TempDir dir("attack");
  const RunConfig cfg;
  const auto vu = generate_corpus(CorpusSpec::from_json({{"VU", {{"loudness", 3}, {"pitch", 3}, {"slow", 2}, {"none", 2}}}}), 4,
                                  dir / "vu");
  const auto rv = run_robustness(vu, cfg);
  CHECK(rv.full.deltas[0].metric == "pssr");
  CHECK(rv.full.deltas[0].decrease == 0.0);
  CHECK(rv.reports_identical == rv.reports_compared);
  CHECK(rv.reports_compared == 10);

  const auto lu = generate_corpus(CorpusSpec::from_json({{"LU", 12}}), 4, dir / "lu");
  const auto rl = run_robustness(lu, cfg);
  const double textual = static_cast<double>(testsupport::count_pattern(lu, {"hedge", "repair", "filler"})) / 12.0;
  CHECK(rl.text_only.deltas[0].decrease == doctest::Approx(textual).epsilon(1e-12));
  CHECK(rl.text_only.deltas[0].decrease > 0.0);
  const auto report = make_attack_report("lu", cfg, rl);
  CHECK(report["runs"]["full"].contains("baseline"));
  CHECK(report["runs"]["full"].contains("attacked"));
  CHECK(verify_report(report).empty());
}

TEST_CASE("property: the full pipeline never loses more PSSR to the attack than the text-only one") {
  TempDir dir("ordering");
  const RunConfig cfg;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    const int lu = 2 + static_cast<int>(rng() % 6), vu = 2 + static_cast<int>(rng() % 6);
    const auto m = generate_corpus(CorpusSpec::from_json({{"LU", lu}, {"VU", vu}}), seed, dir / std::to_string(seed));
    const auto r = run_robustness(m, cfg);
    CHECK(r.full.deltas[0].decrease <= r.text_only.deltas[0].decrease + 1e-12);
    CHECK(r.reports_identical == r.reports_compared);
  }
}

TEST_CASE("cli: exit codes and outputs") {
  TempDir dir("cli");
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({}).code == 2);
  CHECK(cli({"evaluate"}).code == 2);
  CHECK(cli({"evaluate", "--manifest", (dir / "missing.json").string()}).code == 2);
  CHECK(cli({"evaluate", "--manifest", "x", "--backend", "carrier-pigeon"}).code == 2);

  const auto gen = cli({"generate", "--spec", R"({"LU": 4, "VU": 2})", "--out", (dir / "c").string(), "--seed", "5"});
  REQUIRE(gen.code == 0);
  CHECK(gen.out.find("wrote 6 clips") != std::string::npos);
  const auto manifest = (dir / "c/manifest.json").string();

  // Silence with a clean transcript.
  audio::save_wav(dir / "silence.wav", testsupport::silence(2.0));
  testsupport::write_json(dir / "clean.json", language::to_json(testsupport::words("go to the sofa", 0.4)));
  const auto quiet = cli({"analyze", "--audio", (dir / "silence.wav").string(), "--transcript", (dir / "clean.json").string()});
  CHECK(quiet.code == 0);
  CHECK(quiet.out.find("no signals") != std::string::npos);
  CHECK(cli({"analyze", "--audio", (dir / "nope.wav").string(), "--transcript", (dir / "clean.json").string()}).code == 2);

  const auto hedge = cli({"analyze", "--manifest", manifest, "--clip", "lu-0002"});
  CHECK(hedge.code == 0);
  CHECK(hedge.out.find("ambiguous word") != std::string::npos);

  const auto decide = cli({"decide", "--manifest", manifest, "--clip", "lu-0002", "--json"});
  REQUIRE(decide.code == 0);
  CHECK(nlohmann::json::parse(decide.out)["chosen"] == "B");

  const auto eval = cli({"evaluate", "--manifest", manifest, "--out", (dir / "eval").string()});
  CHECK(eval.code == 0);
  CHECK(cli({"report", (dir / "eval/report.json").string()}).code == 0);
  auto report = read_report(dir / "eval/report.json");
  report["aggregates"]["pssr"]["overall"]["pssr"] = 0.5;
  testsupport::write_json(dir / "bad.json", report);
  const auto bad = cli({"report", (dir / "bad.json").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("aggregates do not match") != std::string::npos);

  // Rerunning from the report's own config snapshot reproduces it.
  CHECK(cli({"evaluate", "--manifest", manifest, "--config", (dir / "eval/report.json").string(), "--out",
             (dir / "again").string()})
            .code == 0);
  CHECK(slurp(dir / "again/report.json") == slurp(dir / "eval/report.json"));

  // Rules that only cover clean prompts: uncertain clips fail in the backend.
  auto rules = nlohmann::json::parse(assets::mock_rules_json());
  nlohmann::json clean_only = nlohmann::json::array();
  for (const auto& r : rules["rules"])
    if (r["name"] == "clean") clean_only.push_back(r);
  rules["rules"] = clean_only;
  testsupport::write_json(dir / "clean_rules.json", rules);
  const auto failing = cli({"evaluate", "--manifest", manifest, "--mock-rules", (dir / "clean_rules.json").string()});
  CHECK(failing.code == 1);
  CHECK(failing.err.find("--skip-errors") != std::string::npos);
  const auto skipping =
      cli({"evaluate", "--manifest", manifest, "--mock-rules", (dir / "clean_rules.json").string(), "--skip-errors", "--json"});
  REQUIRE(skipping.code == 0);
  const auto skipped = nlohmann::json::parse(skipping.out);
  CHECK(skipped["aggregates"]["errors"].get<int>() == 5);
  CHECK(skipped["aggregates"]["pssr"]["overall"]["clips"].get<int>() == 1);

  auto hot = RunConfig{}.to_json();
  hot["backend"]["temperature"] = 0.7;
  testsupport::write_json(dir / "hot.json", hot);
  CHECK(cli({"evaluate", "--manifest", manifest, "--config", (dir / "hot.json").string()}).code == 2);
}
