#include "trustnav/prompt/bundle.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "trustnav/assets.hpp"
#include "trustnav/decision/distribution.hpp"
#include "trustnav/language/rewrite.hpp"

namespace trustnav::prompt {
namespace {

using nlohmann::json;

std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string word_ref(const language::WordRange& r) {
  if (r.first == r.last) return "word " + std::to_string(r.first);
  return "words " + std::to_string(r.first) + "-" + std::to_string(r.last);
}

std::string range_ref(const language::WordRange& r) {
  return r.first == r.last ? std::to_string(r.first) : std::to_string(r.first) + "-" + std::to_string(r.last);
}

std::string plain_text(const language::Transcript& t, const language::WordRange& r) {
  std::string out;
  for (std::size_t w = r.first; w <= r.last; ++w) {
    if (!out.empty()) out += ' ';
    out += language::normalize_token(t.words[w].text);
  }
  return out;
}

std::string get_string(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) throw InputError(std::string("prompt assets: missing string \"") + key + "\"");
  return j.at(key).get<std::string>();
}

}  // namespace

std::string to_string(ExampleKind k) {
  switch (k) {
    case ExampleKind::textual: return "textual";
    case ExampleKind::vocal: return "vocal";
    case ExampleKind::both: return "both";
  }
  return "textual";
}

std::string to_string(CueKind k) {
  switch (k) {
    case CueKind::slow_segment: return "slow_segment";
    case CueKind::filler: return "filler";
    case CueKind::repair: return "repair";
    case CueKind::ambiguous: return "ambiguous";
    case CueKind::loudness: return "loudness";
    case CueKind::pitch: return "pitch";
  }
  return "pitch";
}

CueKind parse_cue_kind(const std::string& s) {
  for (auto k : {CueKind::slow_segment, CueKind::filler, CueKind::repair, CueKind::ambiguous, CueKind::loudness,
                 CueKind::pitch})
    if (to_string(k) == s) return k;
  throw InputError("unknown cue kind \"" + s + "\"");
}

PromptAssets PromptAssets::from_json(const json& j) {
  if (!j.is_object()) throw InputError("prompt assets must be a JSON object");
  PromptAssets a;
  a.template_version = get_string(j, "template_version");
  a.system_preamble = get_string(j, "system_preamble");
  a.no_signal_sentence = get_string(j, "no_signal_sentence");
  a.fallback_option_text = get_string(j, "fallback_option_text");
  a.option_request_instruction = get_string(j, "option_request_instruction");
  a.answer_instruction = get_string(j, "answer_instruction");
  if (!j.contains("examples") || !j.at("examples").is_array()) throw InputError("prompt assets: missing examples");
  for (const auto& e : j.at("examples")) {
    InContextExample ex;
    const auto kind = get_string(e, "kind");
    if (kind == "textual") ex.kind = ExampleKind::textual;
    else if (kind == "vocal") ex.kind = ExampleKind::vocal;
    else if (kind == "both") ex.kind = ExampleKind::both;
    else throw InputError("prompt assets: unknown example kind \"" + kind + "\"");
    ex.prompt = get_string(e, "prompt");
    ex.reasoning = get_string(e, "reasoning");
    const auto label = decision::parse_label(get_string(e, "answer"));
    if (!label) throw InputError("prompt assets: example answer must be one of A-E");
    ex.answer = *label;
    a.examples.push_back(std::move(ex));
  }
  a.validate();
  return a;
}

PromptAssets PromptAssets::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open prompt assets " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw InputError("prompt assets " + path + ": " + e.what());
  }
}

const PromptAssets& PromptAssets::defaults() {
  static const PromptAssets assets = from_json(json::parse(assets::prompt_assets_json()));
  return assets;
}

void PromptAssets::validate() const {
  if (examples.size() != 3) throw InputError("prompt assets need exactly three examples");
  std::set<ExampleKind> kinds;
  for (const auto& e : examples) kinds.insert(e.kind);
  if (kinds.size() != 3) throw InputError("prompt examples must cover textual, vocal and both exactly once");
}

CueSummary summarize(const language::AlignedCueSet& cues) {
  CueSummary s;
  if (cues.loudness_word) s.kinds.insert(CueKind::loudness);
  if (cues.pitch_word) s.kinds.insert(CueKind::pitch);
  if (!cues.hesitant_segments.empty()) s.kinds.insert(CueKind::slow_segment);
  if (!cues.semantic.ambiguous.empty()) s.kinds.insert(CueKind::ambiguous);
  if (!cues.semantic.repairs.empty()) s.kinds.insert(CueKind::repair);
  if (!cues.semantic.hesitations.empty()) s.kinds.insert(CueKind::filler);
  return s;
}

std::vector<CueLine> render_cues(const language::Transcript& t,
                                 const std::vector<language::InstructionSegment>& segments,
                                 const language::AlignedCueSet& cues) {
  std::vector<CueLine> lines;
  auto word_text = [&](std::size_t w) { return quoted(language::normalize_token(t.words.at(w).text)); };

  if (cues.loudness_word) {
    const double mag = cues.loudness_event ? cues.loudness_event->magnitude : 0.0;
    lines.push_back({CueKind::loudness, *cues.loudness_word,
                     "loudness change of " + fixed1(mag) + " dB on " + word_text(*cues.loudness_word) + " (word " +
                         std::to_string(*cues.loudness_word) + ")"});
  }
  if (cues.pitch_word) {
    const double mag = cues.pitch_event ? cues.pitch_event->magnitude : 0.0;
    lines.push_back({CueKind::pitch, *cues.pitch_word,
                     "pitch shift of " + fixed1(mag) + " semitones on " + word_text(*cues.pitch_word) + " (word " +
                         std::to_string(*cues.pitch_word) + ")"});
  }
  for (std::size_t s : cues.hesitant_segments) {
    const auto& seg = segments.at(s);
    lines.push_back({CueKind::slow_segment, seg.words.first,
                     "slow speech in segment " + std::to_string(s) + " (" + fixed1(seg.end - seg.start) + " s)"});
  }
  for (const auto& h : cues.semantic.ambiguous)
    lines.push_back({CueKind::ambiguous, h.words.first, "ambiguous word " + quoted(h.phrase) + " (" + word_ref(h.words) + ")"});
  for (const auto& r : cues.semantic.repairs)
    lines.push_back({CueKind::repair, r.retracted.first,
                     "speech repair replacing " + quoted(plain_text(t, r.retracted)) + " with " +
                         quoted(plain_text(t, r.replacement)) + " (words " + range_ref(r.retracted) + " -> " +
                         range_ref(r.replacement) + ")"});
  for (const auto& h : cues.semantic.hesitations)
    lines.push_back({CueKind::filler, h.words.first, "filler " + quoted(h.phrase) + " (" + word_ref(h.words) + ")"});

  std::stable_sort(lines.begin(), lines.end(), [](const CueLine& a, const CueLine& b) {
    if (a.word != b.word) return a.word < b.word;
    return a.kind < b.kind;
  });
  return lines;
}

Paraphrase paraphrase(const language::Transcript& t, const language::AlignedCueSet& cues, const std::string& target,
                      const language::Lexicon& lex) {
  auto cleaned = language::rewrite(t, cues.semantic, {}, true);
  // Deleting "uh" from "I uh think" exposes a new hedge; repeat until clean.
  for (auto flags = language::detect_semantic_flags(cleaned.transcript, lex); !flags.empty();
       flags = language::detect_semantic_flags(cleaned.transcript, lex)) {
    auto next = language::rewrite(cleaned.transcript, flags, {}, true);
    for (auto& i : next.source_index) i = cleaned.source_index[i];
    cleaned = std::move(next);
  }

  // Earliest word carrying any cue; clauses ending before it are trusted.
  std::size_t first_cue = std::numeric_limits<std::size_t>::max();
  auto note = [&](std::size_t w) { first_cue = std::min(first_cue, w); };
  if (cues.loudness_word) note(*cues.loudness_word);
  if (cues.pitch_word) note(*cues.pitch_word);
  if (!cues.hesitant_segments.empty()) {
    const auto segs = language::segment_instructions(t, lex);
    for (std::size_t s : cues.hesitant_segments) note(segs.at(s).words.first);
  }
  for (const auto& h : cues.semantic.ambiguous) note(h.words.first);
  for (const auto& h : cues.semantic.hesitations) note(h.words.first);
  for (const auto& r : cues.semantic.repairs) note(r.retracted.first);

  Paraphrase p;
  p.text = cleaned.transcript.text();
  bool trusted = true;
  for (const auto& seg : language::segment_instructions(cleaned.transcript, lex)) {
    std::vector<std::string> tokens;
    for (std::size_t w = seg.words.first; w <= seg.words.last; ++w) {
      auto norm = language::normalize_token(cleaned.transcript.words[w].text);
      if (!norm.empty()) tokens.push_back(std::move(norm));
    }
    const auto steps = parse_clause(tokens, target);
    trusted = trusted && cleaned.source_index[seg.words.last] < first_cue;
    if (trusted) p.certain_prefix.insert(p.certain_prefix.end(), steps.begin(), steps.end());
    p.plan.insert(p.plan.end(), steps.begin(), steps.end());
  }
  if (p.plan.empty()) p.plan.push_back({"move_to", target});
  if (p.text.empty()) p.text = "go to the " + target;
  return p;
}

std::string PromptBundle::query_text() const {
  std::string out = "Instruction: " + quoted(transcript_text) + "\nSignals:\n";
  out += cue_rendering;
  return out;
}

std::string PromptBundle::examples_text() const {
  std::string out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& e = examples[i];
    out += "Example " + std::to_string(i + 1) + " (" + to_string(e.kind) + " uncertainty)\n";
    out += e.prompt + "\nReasoning: " + e.reasoning + "\nAnswer: " + std::string(1, e.answer) + "\n\n";
  }
  return out;
}

PromptBundle build_prompt(const language::Transcript& t, const std::vector<language::InstructionSegment>& segments,
                          const language::AlignedCueSet& cues, const std::string& target, const PromptAssets& assets,
                          const language::Lexicon& lex) {
  PromptBundle b;
  b.template_version = assets.template_version;
  b.system_preamble = assets.system_preamble;
  b.examples = assets.examples;
  b.transcript_text = t.text();
  b.cues = render_cues(t, segments, cues);
  if (b.cues.empty()) {
    b.cue_rendering = assets.no_signal_sentence;
  } else {
    for (const auto& line : b.cues) {
      if (!b.cue_rendering.empty()) b.cue_rendering += '\n';
      b.cue_rendering += "- " + line.text;
    }
  }
  b.summary = summarize(cues);
  b.target = target;
  b.option_a = paraphrase(t, cues, target, lex);
  b.fallback_option_text = assets.fallback_option_text;
  b.option_request_instruction = assets.option_request_instruction;
  b.answer_instruction = assets.answer_instruction;
  return b;
}

}  // namespace trustnav::prompt
