#include "trustnav/harness/pipeline.hpp"

#include "trustnav/audio/wav.hpp"
#include "trustnav/harness/pool.hpp"

namespace trustnav::harness {
namespace {

nlohmann::json event_json(const std::optional<audio::ChangeEvent>& e) {
  if (!e) return nullptr;
  return {{"time", e->time}, {"magnitude", e->magnitude}, {"change", e->change}};
}

nlohmann::json range_json(const language::WordRange& r) { return {r.first, r.last}; }

std::string flat(const std::vector<prompt::PlanStep>& plan) {
  std::string out;
  for (const auto& s : plan) out += (out.empty() ? "" : " ") + s.to_string();
  return out;
}

}  // namespace

nlohmann::json to_json(const audio::VocalCueReport& r) {
  nlohmann::json rates = nlohmann::json::array();
  for (const auto& s : r.segment_rates)
    rates.push_back({{"index", s.index},
                     {"start", s.span.start},
                     {"end", s.span.end},
                     {"duration", s.duration},
                     {"hesitant", s.hesitant}});
  return {{"loudness_event", event_json(r.loudness_event)}, {"pitch_event", event_json(r.pitch_event)}, {"segment_rates", rates}};
}

nlohmann::json to_json(const language::AlignedCueSet& cues, const language::Transcript& t) {
  auto word = [&](std::optional<std::size_t> w, const std::optional<audio::ChangeEvent>& e) -> nlohmann::json {
    if (!w || !e) return nullptr;
    return {{"word", *w}, {"text", t.words.at(*w).text}, {"time", e->time}, {"change", e->change}};
  };
  nlohmann::json ambiguous = nlohmann::json::array(), hesitations = nlohmann::json::array(),
                 repairs = nlohmann::json::array();
  for (const auto& h : cues.semantic.ambiguous) ambiguous.push_back({{"phrase", h.phrase}, {"words", range_json(h.words)}});
  for (const auto& h : cues.semantic.hesitations)
    hesitations.push_back({{"phrase", h.phrase}, {"words", range_json(h.words)}});
  for (const auto& r : cues.semantic.repairs)
    repairs.push_back({{"retracted", range_json(r.retracted)},
                       {"trigger", range_json(r.trigger)},
                       {"replacement", range_json(r.replacement)}});
  return {{"loudness", word(cues.loudness_word, cues.loudness_event)},
          {"pitch", word(cues.pitch_word, cues.pitch_event)},
          {"hesitant_segments", cues.hesitant_segments},
          {"ambiguous", ambiguous},
          {"repairs", repairs},
          {"hesitations", hesitations}};
}

ClipAnalysis analyze_clip(const audio::AudioClip& clip, const language::Transcript& t, const RunConfig& cfg,
                          const Resources& res, const std::vector<audio::TimeSpan>* rate_spans) {
  ClipAnalysis a;
  a.transcript = t;
  a.segments = language::segment_instructions(t, res.lexicon);
  if (!cfg.ablation.no_vocal) {
    const auto spans = rate_spans ? *rate_spans : language::segment_spans(a.segments);
    a.report = audio::extract_vocal_cues(clip, spans, cfg.thresholds);
  }
  a.cues = language::align(t, a.segments, a.report, language::detect_semantic_flags(t, res.lexicon));
  return a;
}

nlohmann::json ClipOutcome::row() const {
  nlohmann::json r = {{"id", id},
                      {"category", decision::to_string(category)},
                      {"pattern", pattern},
                      {"truth", std::string(1, truth)}};
  nlohmann::json cues = nlohmann::json::array();
  for (auto k : summary.kinds) cues.push_back(prompt::to_string(k));
  r["cues"] = cues;
  if (error) {
    r["error"] = *error;
    return r;
  }
  r["error"] = nullptr;
  r["chosen"] = std::string(1, decision.chosen);
  r["correct"] = decision.chosen == truth;
  r["confidence"] = decision.confidence;
  r["distribution"] = decision.distribution.probs;
  r["plan"] = flat(plan);
  if (episode) {
    const auto& e = *episode;
    r["success"] = e.success;
    r["steps"] = e.steps;
    r["path_distance"] = e.path_distance;
    r["distance_to_target"] = e.distance_to_target;
    r["shortest_path"] = e.shortest_path;
    r["spl_term"] = e.spl_term;
    r["supervisor_calls"] = e.supervisor_calls;
    r["conjectures"] = e.conjectures;
    r["termination"] = nav::to_string(e.termination);
  }
  return r;
}

RunContext RunContext::create(const RunConfig& cfg, const DatasetManifest& manifest, bool need_environments) {
  cfg.validate();
  RunContext ctx{cfg, Resources::load(cfg), {}, [backend = cfg.backend] { return prompt::make_backend(backend); }};
  for (const auto& c : manifest.clips) {
    if (!c.environment) {
      if (need_environments) throw InputError("clip " + c.id + " has no environment to simulate in");
      continue;
    }
    if (!ctx.environments.count(*c.environment))
      ctx.environments.emplace(*c.environment, nav::Environment::load(manifest.environments.at(*c.environment)));
  }
  return ctx;
}

std::vector<prompt::PlanStep> executed_plan(const prompt::OptionSet& options, char chosen,
                                            const prompt::Paraphrase& option_a, bool no_vision) {
  auto plan = options.at(chosen).plan;
  const std::size_t k = option_a.certain_prefix.size();
  if (no_vision && !plan.empty() && plan.back().verb == "explore_here" && option_a.plan.size() > k) {
    plan.pop_back();
    plan.insert(plan.end(), option_a.plan.begin() + static_cast<std::ptrdiff_t>(k), option_a.plan.end());
  }
  return plan;
}

ClipOutcome run_clip(const ClipEntry& entry, const RunContext& ctx, prompt::Backend& backend, bool simulate,
                     bool attacked) {
  const auto& cfg = ctx.config;
  const auto& res = ctx.resources;
  ClipOutcome out;
  out.id = entry.id;
  out.category = entry.category;
  out.pattern = entry.pattern;
  out.truth = entry.truth;

  const auto clip = audio::load_wav(entry.audio);
  language::Transcript t = entry.transcript;
  std::vector<audio::TimeSpan> original_spans;
  if (attacked) {
    original_spans = language::segment_spans(language::segment_instructions(entry.transcript, res.lexicon));
    t = attack::token_attack(entry.transcript, res.attack_lexicon, res.lexicon);
    if (t.words.empty()) {
      out.error = "the attack removed every word";
      return out;
    }
  }
  const ClipAnalysis a = analyze_clip(clip, t, cfg, res, attacked ? &original_spans : nullptr);
  out.vocal_report = to_json(a.report).dump();
  const auto bundle = prompt::build_prompt(a.transcript, a.segments, a.cues, entry.target, res.prompt_assets, res.lexicon);
  out.summary = bundle.summary;

  try {
    const auto options = prompt::request_options(bundle, backend);
    const auto rho = prompt::score_options(bundle, options, backend);
    out.decision = decision::decide(entry.id, rho, entry.truth);
    out.plan = executed_plan(options, out.decision.chosen, bundle.option_a, simulate && cfg.ablation.no_vision);
    if (simulate) {
      nav::PolicyConfig policy = cfg.policy;
      if (cfg.ablation.no_vision) policy.use_conjecture = false;
      const auto& env = ctx.environments.at(*entry.environment);
      out.episode = nav::execute(nav::compile_plan(out.plan), env, policy, res.cooccurrence).result;
    }
  } catch (const prompt::BackendError& e) {
    out.error = std::string("backend: ") + e.what();
  } catch (const prompt::PlanError& e) {
    out.error = std::string("plan: ") + e.what();
  }
  return out;
}

std::vector<ClipOutcome> run_batch(const DatasetManifest& manifest, const RunContext& ctx, bool simulate, bool attacked) {
  if (manifest.clips.empty()) throw DomainError("manifest has no clips");
  const int workers = ctx.config.workers;
  std::vector<std::unique_ptr<prompt::Backend>> backends;
  for (int w = 0; w < std::min<int>(workers, static_cast<int>(manifest.clips.size())); ++w)
    backends.push_back(ctx.make_backend());
  std::vector<ClipOutcome> out;
  out.reserve(manifest.clips.size());
  run_ordered(
      manifest.clips.size(), workers,
      [&](std::size_t i, int w) { return run_clip(manifest.clips[i], ctx, *backends[static_cast<std::size_t>(w)], simulate, attacked); },
      [&](std::size_t, ClipOutcome o) { out.push_back(std::move(o)); });
  return out;
}

}  // namespace trustnav::harness
