#include "trustnav/prompt/mock_backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "trustnav/assets.hpp"
#include "trustnav/decision/distribution.hpp"

namespace trustnav::prompt {
namespace {

using nlohmann::json;

std::set<CueKind> kind_set(const json& j, const char* key) {
  std::set<CueKind> out;
  if (!j.contains(key)) return out;
  for (const auto& k : j.at(key)) out.insert(parse_cue_kind(k.get<std::string>()));
  return out;
}

OptionTemplate parse_template(const json& j) {
  OptionTemplate t{j.at("text").get<std::string>(), {}};
  for (const auto& s : j.at("plan")) {
    auto step = s.get<std::string>();
    if (step != "$prefix") validate_step(parse_step(step));
    t.plan.push_back(std::move(step));
  }
  if (t.plan.empty() || (t.plan.back() != "explore_here" && t.plan.back() != "ask_person"))
    throw InputError("mock option templates must end with explore_here or ask_person");
  return t;
}

std::array<OptionTemplate, 3> parse_templates(const json& j) {
  std::array<OptionTemplate, 3> out;
  const char* labels[] = {"B", "C", "D"};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j.contains(labels[i])) throw InputError(std::string("mock rules: option template ") + labels[i] + " missing");
    out[i] = parse_template(j.at(labels[i]));
  }
  return out;
}

std::string substitute(std::string text, const std::string& target) {
  const std::string key = "{target}";
  for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + target.size()))
    text.replace(pos, key.size(), target);
  return text;
}

}  // namespace

bool CuePredicate::matches(const CueSummary& s) const {
  if (clean && *clean != s.clean()) return false;
  if (!any_of.empty() && std::none_of(any_of.begin(), any_of.end(), [&](CueKind k) { return s.has(k); })) return false;
  for (auto k : all_of)
    if (!s.has(k)) return false;
  for (auto k : none_of)
    if (s.has(k)) return false;
  return true;
}

MockRules MockRules::from_json(const json& j) {
  try {
    MockRules r;
    r.name = j.value("name", std::string("mock"));
    r.default_options = parse_templates(j.at("default_options"));
    for (const auto& jr : j.at("rules")) {
      MockRule rule;
      rule.name = jr.value("name", std::string());
      const auto& w = jr.at("when");
      rule.when.any_of = kind_set(w, "any_of");
      rule.when.all_of = kind_set(w, "all_of");
      rule.when.none_of = kind_set(w, "none_of");
      if (w.contains("clean")) rule.when.clean = w.at("clean").get<bool>();

      const bool has_probs = jr.contains("probs"), has_lp = jr.contains("logprobs");
      if (has_probs == has_lp) throw InputError("mock rule \"" + rule.name + "\" needs exactly one of probs/logprobs");
      for (const auto& [key, value] : (has_probs ? jr.at("probs") : jr.at("logprobs")).items()) {
        const auto label = decision::parse_label(key);
        if (!label) throw InputError("mock rule \"" + rule.name + "\": bad label " + key);
        const double v = value.get<double>();
        if (has_probs && (v <= 0.0 || v > 1.0))
          throw InputError("mock rule \"" + rule.name + "\": probabilities must lie in (0, 1]");
        if (has_lp && !(v <= 0.0)) throw InputError("mock rule \"" + rule.name + "\": logprobs must be <= 0");
        rule.logprobs[*decision::label_index(*label)] = has_probs ? std::log(v) : v;
      }
      if (jr.contains("options")) rule.options = parse_templates(jr.at("options"));
      r.rules.push_back(std::move(rule));
    }
    if (r.rules.empty()) throw InputError("mock rules: no rules");
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("mock rules: ") + e.what());
  } catch (const PlanError& e) {
    throw InputError(std::string("mock rules: ") + e.what());
  }
}

MockRules MockRules::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mock rules " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("mock rules " + path + ": " + e.what());
  }
  return from_json(j);
}

const MockRules& MockRules::defaults() {
  static const MockRules rules = from_json(json::parse(assets::mock_rules_json()));
  return rules;
}

const MockRule& MockBackend::match(const CueSummary& s) const {
  for (const auto& r : rules_.rules)
    if (r.when.matches(s)) return r;
  std::string kinds;
  for (auto k : s.kinds) kinds += (kinds.empty() ? "" : ",") + to_string(k);
  throw UnmatchedBundleError("unmatched bundle: no mock rule for cues {" + kinds + "}");
}

ChatReply MockBackend::complete(const ChatRequest& request) {
  const MockRule& rule = match(request.context.cues);
  ChatReply reply;

  if (request.kind == RequestKind::options) {
    const auto& templates = rule.options ? *rule.options : rules_.default_options;
    json options = json::array();
    for (std::size_t i = 0; i < 3; ++i) {
      json plan = json::array();
      for (const auto& step : templates[i].plan) {
        if (step == "$prefix") {
          for (const auto& p : request.context.certain_prefix) plan.push_back(p.to_string());
        } else {
          plan.push_back(step);
        }
      }
      options.push_back({{"label", std::string(1, static_cast<char>('B' + i))},
                         {"text", substitute(templates[i].text, request.context.target)},
                         {"plan", plan}});
    }
    reply.text = json{{"options", options}}.dump();
    return reply;
  }

  std::size_t best = 5;
  TokenLogprobs tok;
  for (std::size_t i = 0; i < 5; ++i) {
    if (!rule.logprobs[i]) continue;
    const double lp = *rule.logprobs[i];
    tok.top.push_back({std::string(1, decision::kLabels[i]), lp});
    if (best == 5 || lp > *rule.logprobs[best]) best = i;
  }
  if (best == 5) throw BackendError("mock rule \"" + rule.name + "\" reports no labels");
  tok.token = std::string(1, decision::kLabels[best]);
  tok.logprob = *rule.logprobs[best];
  reply.text = tok.token;
  reply.tokens.push_back(std::move(tok));
  return reply;
}

}  // namespace trustnav::prompt
