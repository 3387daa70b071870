// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/corpora.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"
#include "support/tempdir.hpp"
#include "trustnav/audio/wav.hpp"
#include "trustnav/decision/decision.hpp"
#include "trustnav/harness/commands.hpp"
#include "trustnav/harness/report.hpp"

using namespace trustnav;
using namespace trustnav::harness;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome vocal_event_recovery() {
  Outcome o;
  const auto t0 = Clock::now();
  testsupport::TempDir dir("accept-events");
  const auto m = generate_corpus(CorpusSpec::from_json({{"VU", {{"loudness", 25}, {"pitch", 25}}}}), 2024, dir.path());
  const RunConfig cfg;
  int planted = 0, found = 0;
  for (const auto& c : m.clips) {
    const auto clip = audio::load_wav(c.audio);
    const auto spans = language::segment_spans(language::segment_instructions(c.transcript));
    const auto report = audio::extract_vocal_cues(clip, spans, cfg.thresholds);
    for (const char* kind : {"loudness", "pitch"}) {
      if (!c.planted.contains(kind)) continue;
      ++planted;
      const auto& ev = std::string(kind) == "loudness" ? report.loudness_event : report.pitch_event;
      if (ev && std::abs(ev->time - c.planted[kind]["time"].get<double>()) <= 0.02 + 1e-9) ++found;
    }
  }
  const double rate = planted ? static_cast<double>(found) / planted : 0.0;
  const double elapsed = seconds_since(t0);
  o.require(planted == 50, "expected 50 planted events, got " + std::to_string(planted));
  o.require(rate >= 0.95, "recovery " + fmt("%.3f", rate) + " < 0.95");
  o.require(elapsed < 10.0, "took " + fmt("%.2f", elapsed) + " s");
  o.detail = std::to_string(found) + "/" + std::to_string(planted) + " events within 20 ms, " + fmt("%.2f s", elapsed) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome loudness_calibration() {
  Outcome o;
  audio::VocalThresholds cfg;
  const auto full = audio::loudness_track(testsupport::sine(1000.0, 1.0), cfg);
  const double expected = 20.0 * std::log10(1.0 / std::sqrt(2.0));
  double worst = 0.0;
  for (const auto& v : full.values) worst = std::max(worst, v ? std::abs(*v - expected) : 1e9);
  o.require(worst <= 0.1, "full-scale frames off by " + fmt("%.4f", worst) + " dB");
  double worst_gain = 0.0;
  for (double g : {0.1, 0.5, std::pow(2.0, -0.5)}) {
    const auto scaled = audio::loudness_track(testsupport::sine(1000.0, 1.0, g), cfg);
    const double shift = 20.0 * std::log10(g);
    for (std::size_t i = 0; i < full.values.size(); ++i) {
      const double err = std::abs((*scaled.values[i] - *full.values[i]) - shift);
      worst_gain = std::max(worst_gain, err);
      if (err > 0.01) {
        o.require(false, "gain " + fmt("%.4f", g) + " frame " + std::to_string(i) + " off by " + fmt("%.4f", err) + " dB");
        break;
      }
    }
  }
  o.detail = "full scale " + fmt("%.4f dBFS", *full.values[full.values.size() / 2]) + ", worst gain error " +
             fmt("%.2e dB", worst_gain) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome confidence_score() {
  Outcome o;
  const double c = decision::confidence_score(decision::TokenDistribution::uniform(), 'A');
  o.require(std::abs(c - 1.0 / std::log(5.0)) <= 1e-6 && std::abs(c - 0.6213) <= 1e-4, "C(uniform) = " + fmt("%.8f", c));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, double>> pts;  // (rho[true], C)
  for (int i = 0; i < 1000; ++i) {
    std::array<double, 5> w{};
    double sum = 0.0;
    for (auto& x : w) sum += x = -std::log(1.0 - u(rng));  // flat Dirichlet
    decision::TokenDistribution rho;
    for (std::size_t k = 0; k < 5; ++k) rho.probs[k] = w[k] / sum;
    const char truth = decision::kLabels[rng() % 5];
    pts.emplace_back(rho.at(truth), decision::confidence_score(rho, truth));
  }
  std::size_t violations = 0, pairs = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (!(pts[i].first < pts[j].first)) continue;
      ++pairs;
      if (!(pts[i].second < pts[j].second)) ++violations;
    }
  o.require(violations == 0, std::to_string(violations) + " monotonicity violations");
  o.detail = "C(uniform) = " + fmt("%.7f", c) + ", " + std::to_string(pairs) + " ordered pairs checked" +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome spl_oracle() {
  Outcome o;
  std::mt19937_64 rng(8);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testsupport::random_grid(rng);
    const int steps = testsupport::enumerate_paths(g.blocked, g.from.x, g.from.y, g.to.x, g.to.y);
    const double got = nav::shortest_path(g.env, g.from, g.to);
    const bool ok = steps < 0 ? got == nav::kUnreachable : got == steps * 0.25;
    mismatches += !ok;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " grids disagree with enumeration");
  auto ep = [](bool s, double p, double l) {
    nav::EpisodeResult r;
    r.success = s;
    r.path_distance = p;
    r.shortest_path = l;
    r.spl_term = nav::spl_term(s, p, l);
    return r;
  };
  const double a = nav::episode_metrics({ep(true, 2.0, 2.0)}).spl;
  const double b = nav::episode_metrics({ep(true, 4.0, 2.0)}).spl;
  const auto mixed = nav::episode_metrics({ep(true, 2.0, 2.0), ep(false, 3.0, 2.0)});
  o.require(std::abs(a - 1.0) <= 1e-9, "optimal episode SPL " + fmt("%.12f", a));
  o.require(std::abs(b - 0.5) <= 1e-9, "double-length episode SPL " + fmt("%.12f", b));
  o.require(std::abs(mixed.spl - 0.5) <= 1e-9 && std::abs(mixed.success_rate - 0.5) <= 1e-9,
            "mixed SPL " + fmt("%.12f", mixed.spl) + " SR " + fmt("%.12f", mixed.success_rate));
  o.detail = std::to_string(100 - mismatches) + "/100 grids match, SPL examples " + fmt("%g", a) + ", " + fmt("%g", b) + ", " +
             fmt("%g", mixed.spl) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome scene_reproduction() {
  Outcome o;
  testsupport::TempDir dir("accept-scene");
  const auto m = generate_corpus(
      CorpusSpec::from_json({{"VU", {{"pitch", 1}}}, {"layout", "fixed"}, {"scene", "living-room"}}), 1, dir.path());
  const auto t0 = Clock::now();
  const RunConfig full;
  RunConfig blind;
  blind.ablation.no_vision = true;
  const auto with_vision = aggregate(rows_json(run_batch(m, RunContext::create(full, m, true), true)));
  const auto without = aggregate(rows_json(run_batch(m, RunContext::create(blind, m, true), true)));
  const double elapsed = seconds_since(t0);
  const auto& nv = with_vision["navigation"]["overall"];
  const auto& nb = without["navigation"]["overall"];
  const double sr = nv["success_rate"].get<double>(), dist = nv["mean_distance_to_target"].get<double>();
  const double sr_blind = nb["success_rate"].get<double>();
  o.require(m.clips[0].target == "remote control", "scene target is " + m.clips[0].target);
  o.require(sr == 1.0, "full pipeline SR " + fmt("%.2f", sr));
  o.require(dist <= 1.5 + 1e-9, "distance to target " + fmt("%.3f", dist));
  o.require(sr_blind == 0.0, "--no-vision SR " + fmt("%.2f", sr_blind));
  o.require(elapsed < 1.0, "took " + fmt("%.3f", elapsed) + " s");
  o.detail = "full SR " + fmt("%.0f", sr) + " at " + fmt("%.2f m", dist) + ", no-vision SR " + fmt("%.0f", sr_blind) + ", " +
             fmt("%.3f s", elapsed) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome attack_ordering() {
  Outcome o;
  testsupport::TempDir dir("accept-attack");
  const auto m = generate_corpus(CorpusSpec::from_json({{"LU", 50}, {"VU", 50}}), 77, dir.path());
  const RunConfig cfg;  // shipped rules weight vocal cues
  const auto r = run_robustness(m, cfg);
  const double full = r.full.deltas.at(0).decrease, text = r.text_only.deltas.at(0).decrease;
  o.require(m.clips.size() == 100, "corpus has " + std::to_string(m.clips.size()) + " clips");
  o.require(full <= text, "full decrease " + fmt("%.4f", full) + " > text-only " + fmt("%.4f", text));
  o.require(r.reports_compared == 100 && r.reports_identical == 100,
            std::to_string(r.reports_identical) + "/" + std::to_string(r.reports_compared) + " vocal reports identical");
  o.detail = "PSSR decrease full " + fmt("%.4f", full) + " <= text-only " + fmt("%.4f", text) + ", vocal reports identical " +
             std::to_string(r.reports_identical) + "/" + std::to_string(r.reports_compared) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "trustnav");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome end_to_end_determinism() {
  Outcome o;
  testsupport::TempDir dir("accept-det");
  const auto manifest = (dir / "corpus/manifest.json").string();
  o.require(cli({"generate", "--spec", R"({"LU": 12, "VU": 12})", "--seed", "31", "--out", (dir / "corpus").string()}) == 0,
            "generate failed");
  for (const char* cmd : {"evaluate", "simulate"}) {
    std::vector<std::string> reports;
    for (int run = 0; run < 3; ++run) {
      const auto out = dir / (std::string(cmd) + std::to_string(run));
      const int code = cli({cmd, "--manifest", manifest, "--seed", "31", "--backend", "mock", "--workers",
                            std::to_string(1 + run), "--out", out.string()});
      o.require(code == 0, std::string(cmd) + " run " + std::to_string(run) + " exited " + std::to_string(code));
      reports.push_back(slurp(out / "report.json") + slurp(out / "rows.csv") + slurp(out / "summary.csv"));
    }
    // Worker count is part of the recorded config, so compare with it masked.
    for (auto& r : reports)
      for (char w : {'1', '2', '3'}) {
        const std::string key = std::string("\"workers\": ") + w;
        if (auto pos = r.find(key); pos != std::string::npos) r.replace(pos, key.size(), "\"workers\": N");
      }
    o.require(!reports[0].empty() && reports[0] == reports[1] && reports[1] == reports[2],
              std::string(cmd) + " reports differ across runs");
  }
  o.detail = "evaluate and simulate reports byte-identical across 3 runs (1, 2 and 3 workers)" +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome construction_exact_pssr() {
  Outcome o;
  testsupport::TempDir dir("accept-pssr");
  const auto m = generate_corpus(CorpusSpec::from_json({{"LU", 20}, {"VU", 20}}), 11, dir / "corpus");
  const RunConfig agree;
  const auto a = aggregate(rows_json(run_batch(m, RunContext::create(agree, m, false), false)));
  testsupport::write_json(dir / "rules.json", testsupport::mismatch_rules());
  RunConfig mismatch;
  mismatch.backend.mock_rules = (dir / "rules.json").string();
  const auto b = aggregate(rows_json(run_batch(m, RunContext::create(mismatch, m, false), false)));
  const double pa = a["pssr"]["overall"]["pssr"].get<double>(), pb = b["pssr"]["overall"]["pssr"].get<double>();
  o.require(m.clips.size() == 40, "corpus has " + std::to_string(m.clips.size()) + " clips");
  o.require(testsupport::count_pattern(m, {"loudness"}) == 4, "expected 4 designed mismatches");
  o.require(pa == 1.0, "agreement PSSR " + fmt("%.6f", pa));
  o.require(pb == 0.9, "mismatch PSSR " + fmt("%.6f", pb));
  o.detail = "agreement PSSR " + fmt("%.4f", pa) + ", 4-mismatch PSSR " + fmt("%.4f", pb) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"vocal event recovery", vocal_event_recovery},
      {"loudness calibration", loudness_calibration},
      {"confidence score", confidence_score},
      {"SPL oracle equivalence", spl_oracle},
      {"TV/remote scene reproduction", scene_reproduction},
      {"attack robustness ordering", attack_ordering},
      {"end-to-end determinism", end_to_end_determinism},
      {"construction-exact PSSR", construction_exact_pssr},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
