#include "trustnav/harness/corpus.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "trustnav/audio/wav.hpp"
#include "trustnav/harness/config.hpp"

namespace trustnav::harness {
namespace {

constexpr int kRate = 16000;
constexpr int kGrid = 40;

struct Names {
  Pattern p;
  const char* name;
};
constexpr Names kPatternNames[] = {{Pattern::none, "none"},         {Pattern::hedge, "hedge"},
                                   {Pattern::repair, "repair"},     {Pattern::filler, "filler"},
                                   {Pattern::loudness, "loudness"}, {Pattern::pitch, "pitch"},
                                   {Pattern::slow, "slow"},         {Pattern::both, "both"}};

// Portable generator: mt19937_64 output is specified by the standard, the
// std distributions are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct Script {
  std::vector<std::string> words;
  std::size_t last_clause_begin = 0;
};

// "Go straight to the {L1}, turn {d1} and move to the {L2}, <final clause>"
Script script(const SceneNames& scene, Pattern p, const std::string& turn_dir, const std::string& said_dir,
              const std::string& true_dir, Rng& rng) {
  Script s;
  auto add = [&](const std::string& text) {
    for (auto& w : split(text)) s.words.push_back(std::move(w));
  };
  add("Go straight to the " + scene.first_landmark + ",");
  add("turn " + turn_dir + " and move to the " + scene.second_landmark + ",");
  s.last_clause_begin = s.words.size();
  const std::string subject = "the " + scene.target;
  switch (p) {
    case Pattern::none: add(subject + " is on your " + true_dir); break;
    case Pattern::hedge: {
      static const char* forms[] = {"%s is maybe on your %d", "I think %s is on your %d", "%s is probably on your %d"};
      std::string form = forms[rng.below(3)];
      form.replace(form.find("%s"), 2, subject);
      form.replace(form.find("%d"), 2, said_dir);
      add(form);
      break;
    }
    case Pattern::filler:
      if (rng.coin()) add(subject + " is umm on your " + said_dir);
      else add("uh " + subject + " is on your " + said_dir);
      break;
    case Pattern::repair: add(subject + " is on your " + true_dir + " no I mean " + said_dir); break;
    case Pattern::both: add(subject + " is maybe on your " + said_dir); break;
    case Pattern::loudness:
    case Pattern::pitch:
    case Pattern::slow: add(subject + " is on your " + said_dir); break;
  }
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

struct Generated {
  ClipEntry entry;
  audio::AudioClip clip;
  std::string environment;
  nav::Environment env;
};

Generated generate_clip(const std::string& id, decision::Category category, Pattern pattern, const CorpusSpec& spec,
                        std::uint64_t seed, std::size_t index) {
  Rng rng(mix(seed, index));
  const auto& all = scenes();
  const SceneNames* scene = &all[index % all.size()];
  if (spec.scene) {
    for (const auto& s : all)
      if (s.name == *spec.scene) scene = &s;
  } else if (spec.random_layout) {
    scene = &all[rng.below(all.size())];
  }
  const bool mirrored = spec.random_layout && rng.coin();
  const std::string turn_dir = mirrored ? "right" : "left";
  const std::string true_dir = mirrored ? "left" : "right";
  const std::string wrong_dir = mirrored ? "right" : "left";
  const Script s = script(*scene, pattern, turn_dir, wrong_dir, true_dir, rng);

  // Word lengths in whole samples so the transcript times are exact.
  std::vector<std::size_t> bounds{0};
  for (std::size_t w = 0; w < s.words.size(); ++w) {
    const bool slow = pattern == Pattern::slow && w >= s.last_clause_begin;
    const double seconds = slow ? spec.slow_word_seconds : spec.word_seconds * rng.uniform(0.85, 1.15);
    bounds.push_back(bounds.back() + static_cast<std::size_t>(std::lround(seconds * kRate)));
  }
  std::vector<language::WordToken> words;
  for (std::size_t w = 0; w < s.words.size(); ++w)
    words.push_back({s.words[w], static_cast<double>(bounds[w]) / kRate, static_cast<double>(bounds[w + 1]) / kRate, w});

  // Tone proxy: a phase-continuous carrier whose pitch and level drift a
  // little per word, well under the event thresholds.
  const double f0 = rng.uniform(110.0, 200.0);
  const double a0 = rng.uniform(0.04, 0.07);
  std::vector<double> semis(s.words.size()), gains(s.words.size());
  for (std::size_t w = 0; w < s.words.size(); ++w) {
    semis[w] = rng.uniform(-0.5, 0.5);
    gains[w] = rng.uniform(-1.0, 1.0);
  }
  const std::size_t last = s.words.size() - 1;
  const double event_time = words[last].start + 0.3 * (words[last].end - words[last].start);
  const double glide = 0.02;
  double step_db = 0.0, step_semis = 0.0;
  nlohmann::json planted = nlohmann::json::object();
  if (pattern == Pattern::loudness) {
    step_db = rng.uniform(16.0, 20.0);
    planted["loudness"] = {{"time", event_time}, {"db", step_db}, {"word", last}};
  }
  if (pattern == Pattern::pitch || pattern == Pattern::both) {
    step_semis = rng.uniform(3.0, 5.0);
    planted["pitch"] = {{"time", event_time + glide / 2}, {"semitones", step_semis}, {"word", last}};
  }
  if (pattern == Pattern::slow) planted["slow_segment"] = 2;

  audio::AudioClip clip;
  clip.sample_rate = kRate;
  clip.samples.resize(bounds.back());
  double phase = 0.0;
  std::size_t w = 0;
  for (std::size_t n = 0; n < clip.samples.size(); ++n) {
    while (n >= bounds[w + 1]) ++w;
    const double t = static_cast<double>(n) / kRate;
    double semi = semis[w], db = gains[w];
    if (t >= event_time) {
      db += step_db;
      semi += step_semis * std::min(1.0, (t - event_time) / glide);
    }
    const double f = f0 * std::pow(2.0, semi / 12.0);
    phase += 2.0 * std::numbers::pi * f / kRate;
    if (phase > 2.0 * std::numbers::pi) phase -= 2.0 * std::numbers::pi;
    clip.samples[n] = a0 * std::pow(10.0, db / 20.0) * std::sin(phase);
  }

  Generated g;
  g.entry.id = id;
  g.entry.category = category;
  g.entry.transcript = language::make_transcript(id, std::move(words));
  g.entry.truth = uncertain(pattern) ? 'B' : 'A';
  g.entry.target = scene->target;
  g.environment = scene->name + (mirrored ? "-mirrored" : "");
  g.entry.environment = g.environment;
  g.entry.pattern = to_string(pattern);
  g.entry.planted = planted;
  g.clip = std::move(clip);
  g.env = build_scene(*scene, mirrored);
  return g;
}

}  // namespace

std::string to_string(Pattern p) {
  for (const auto& n : kPatternNames)
    if (n.p == p) return n.name;
  return "none";
}

Pattern parse_pattern(const std::string& s) {
  for (const auto& n : kPatternNames)
    if (s == n.name) return n.p;
  if (s == "pitch-rise-on-final-word") return Pattern::pitch;
  throw InputError("unknown pattern \"" + s + "\"");
}

bool uncertain(Pattern p) { return p != Pattern::none; }

const std::vector<SceneNames>& scenes() {
  static const std::vector<SceneNames> all = {
      {"living-room", "drawer", "garbage can", "television", "remote control", "houseplant"},
      {"kitchen", "dining table", "fridge", "coffee machine", "mug", "garbage can"},
      {"bedroom", "bed", "dresser", "nightstand", "alarm clock", "towel"},
  };
  return all;
}

nav::Environment build_scene(const SceneNames& scene, bool mirrored) {
  nav::Environment env(scene.name + (mirrored ? "-mirrored" : ""), kGrid, kGrid, 0.25);
  for (int i = 0; i < kGrid; ++i) {
    env.set_occupied({i, 0});
    env.set_occupied({i, kGrid - 1});
    env.set_occupied({0, i});
    env.set_occupied({kGrid - 1, i});
  }
  auto cell = [&](int x, int y) { return nav::Cell{mirrored ? kGrid - 1 - x : x, y}; };
  auto place = [&](const std::string& name, int x, int y) { env.add_object({name, name, env.position_of(cell(x, y))}); };
  place(scene.first_landmark, 20, 30);
  place(scene.second_landmark, 4, 24);
  place(scene.anchor, 10, 28);
  place(scene.distractor, 10, 20);
  place(scene.target, 10, 31);
  env.target_id = scene.target;
  env.start = {cell(20, 2), 90};
  env.validate();
  return env;
}

const std::vector<Pattern>& default_mix(decision::Category c) {
  static const std::vector<Pattern> lu = {Pattern::hedge, Pattern::repair, Pattern::filler, Pattern::none};
  static const std::vector<Pattern> vu = {Pattern::loudness, Pattern::pitch, Pattern::slow, Pattern::both, Pattern::none};
  return c == decision::Category::LU ? lu : vu;
}

int CorpusSpec::total() const {
  int n = 0;
  for (const auto& [cat, m] : counts)
    for (const auto& [p, k] : m) n += k;
  return n;
}

void CorpusSpec::validate() const {
  for (const auto& [cat, m] : counts)
    for (const auto& [p, k] : m)
      if (k < 0) throw InputError("corpus spec: negative count for " + to_string(p));
  if (total() == 0) throw InputError("corpus spec: no clips requested");
  if (total() > 100000) throw InputError("corpus spec: more than 100000 clips");
  if (!(word_seconds >= 0.15 && word_seconds <= 2.0)) throw InputError("corpus spec: word_seconds must be in [0.15, 2]");
  if (!(slow_word_seconds >= word_seconds && slow_word_seconds <= 5.0))
    throw InputError("corpus spec: slow_word_seconds must be in [word_seconds, 5]");
  if (scene) {
    bool known = false;
    for (const auto& s : scenes()) known = known || s.name == *scene;
    if (!known) throw InputError("corpus spec: unknown scene " + *scene);
  }
}

CorpusSpec CorpusSpec::from_json(const nlohmann::json& j) {
  CorpusSpec spec;
  try {
    if (!j.is_object()) throw InputError("corpus spec must be a JSON object");
    for (auto cat : {decision::Category::LU, decision::Category::VU}) {
      const std::string key = decision::to_string(cat);
      if (!j.contains(key)) continue;
      const auto& v = j[key];
      auto& m = spec.counts[cat];
      if (v.is_number_integer()) {
        const int n = v.get<int>();
        if (n < 0) throw InputError("corpus spec: negative count for " + key);
        const auto& mix_list = default_mix(cat);
        for (int i = 0; i < n; ++i) ++m[mix_list[static_cast<std::size_t>(i) % mix_list.size()]];
      } else {
        for (const auto& [name, k] : v.items()) m[parse_pattern(name)] += k.get<int>();
      }
    }
    if (j.contains("layout")) {
      const auto layout = j["layout"].get<std::string>();
      if (layout != "random" && layout != "fixed") throw InputError("corpus spec: layout must be random or fixed");
      spec.random_layout = layout == "random";
    }
    if (j.contains("scene")) spec.scene = j["scene"].get<std::string>();
    spec.word_seconds = j.value("word_seconds", spec.word_seconds);
    spec.slow_word_seconds = j.value("slow_word_seconds", spec.slow_word_seconds);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("corpus spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json CorpusSpec::to_json() const {
  nlohmann::json j = {{"schema_version", kSchemaVersion},
                      {"layout", random_layout ? "random" : "fixed"},
                      {"word_seconds", word_seconds},
                      {"slow_word_seconds", slow_word_seconds}};
  for (const auto& [cat, m] : counts) {
    nlohmann::json c = nlohmann::json::object();
    for (const auto& [p, k] : m) c[to_string(p)] = k;
    j[decision::to_string(cat)] = c;
  }
  if (scene) j["scene"] = *scene;
  return j;
}

DatasetManifest generate_corpus(const CorpusSpec& spec, std::uint64_t seed, const std::filesystem::path& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir / "audio");
  std::filesystem::create_directories(out_dir / "environments");

  DatasetManifest m;
  std::size_t index = 0;
  for (const auto& [cat, patterns] : spec.counts) {
    // Interleave patterns so any prefix of the corpus is mixed.
    std::vector<Pattern> order;
    auto remaining = patterns;
    for (bool any = true; any;) {
      any = false;
      for (auto& [p, k] : remaining)
        if (k > 0) {
          order.push_back(p);
          --k;
          any = true;
        }
    }
    int n = 0;
    for (Pattern p : order) {
      char id[32];
      std::snprintf(id, sizeof id, "%s-%04d", cat == decision::Category::LU ? "lu" : "vu", ++n);
      auto g = generate_clip(id, cat, p, spec, seed, index++);
      g.entry.audio = out_dir / "audio" / (std::string(id) + ".wav");
      audio::save_wav(g.entry.audio, g.clip);
      if (!m.environments.count(g.environment)) {
        const auto path = out_dir / "environments" / (g.environment + ".json");
        write_text(path, g.env.to_json().dump(1) + "\n");
        m.environments[g.environment] = path;
      }
      m.clips.push_back(std::move(g.entry));
    }
  }
  nlohmann::json j = m.to_json(out_dir);
  j["generator"] = {{"seed", seed}, {"spec", spec.to_json()}};
  write_text(out_dir / "manifest.json", j.dump(1) + "\n");
  return DatasetManifest::load(out_dir / "manifest.json");
}

}  // namespace trustnav::harness
