#include "trustnav/prompt/options.hpp"

#include <algorithm>
#include <cmath>

namespace trustnav::prompt {
namespace {

using nlohmann::json;

bool ends_uncertain(const std::vector<PlanStep>& plan) {
  return !plan.empty() && (plan.back().verb == "explore_here" || plan.back().verb == "ask_person");
}

std::string option_listing(const OptionSet& options) {
  std::string out;
  for (const auto& o : options.options) {
    out += std::string(1, o.label) + ") " + o.text + "  [plan: " + to_string(o.plan) + "]\n";
  }
  return out;
}

RequestContext context_of(const PromptBundle& b) { return {b.summary, b.option_a.certain_prefix, b.target}; }

template <class F>
auto with_retry(F&& attempt) {
  try {
    return attempt();
  } catch (const UnmatchedBundleError&) {
    throw;
  } catch (const BackendError&) {
    return attempt();
  }
}

}  // namespace

const ActionOption& OptionSet::at(char label) const {
  const auto idx = decision::label_index(label);
  if (!idx) throw DomainError(std::string("invalid option label '") + label + "'");
  return options[*idx];
}

void OptionSet::validate() const {
  for (std::size_t i = 0; i < options.size(); ++i) {
    const auto& o = options[i];
    if (o.label != decision::kLabels[i]) throw DomainError("option labels must be A-E in order");
    if (o.plan.empty()) throw DomainError(std::string("option ") + o.label + " has an empty plan");
    for (const auto& s : o.plan) validate_step(s);
    if (i > 0 && !ends_uncertain(o.plan))
      throw DomainError(std::string("option ") + o.label + " must end with explore_here or ask_person");
  }
}

std::vector<ChatMessage> option_messages(const PromptBundle& b) {
  return {{"system", b.system_preamble},
          {"user", b.query_text() + "\nTarget object: " + b.target + "\nOption A (given): " + b.option_a.text +
                       "  [plan: " + to_string(b.option_a.plan) + "]\n\n" + b.option_request_instruction}};
}

std::vector<ChatMessage> answer_messages(const PromptBundle& b, const OptionSet& options) {
  return {{"system", b.system_preamble},
          {"user", b.examples_text() + b.query_text() + "\nTarget object: " + b.target + "\nOptions:\n" +
                       option_listing(options) + "\n" + b.answer_instruction + "\nAnswer:"}};
}

std::array<ActionOption, 3> parse_option_reply(const std::string& text) {
  const auto open = text.find('{');
  const auto close = text.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw BackendError("option reply contains no JSON object", text);
  json j;
  try {
    j = json::parse(text.substr(open, close - open + 1));
  } catch (const json::exception& e) {
    throw BackendError(std::string("option reply is not valid JSON: ") + e.what(), text);
  }
  if (!j.contains("options") || !j.at("options").is_array()) throw BackendError("option reply lacks \"options\"", text);

  std::array<ActionOption, 3> out;
  std::array<bool, 3> seen{};
  try {
    for (const auto& o : j.at("options")) {
      const auto label = decision::parse_label(o.at("label").get<std::string>());
      if (!label || *label < 'B' || *label > 'D') continue;
      const std::size_t slot = static_cast<std::size_t>(*label - 'B');
      if (seen[slot]) throw BackendError(std::string("duplicate option ") + *label, text);
      ActionOption opt{*label, o.at("text").get<std::string>(), {}};
      for (const auto& s : o.at("plan")) opt.plan.push_back(parse_step(s.get<std::string>()));
      if (!ends_uncertain(opt.plan))
        throw BackendError(std::string("option ") + *label + " does not end with explore_here or ask_person", text);
      out[slot] = std::move(opt);
      seen[slot] = true;
    }
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed option entry: ") + e.what(), text);
  } catch (const PlanError& e) {
    throw BackendError(std::string("bad plan step: ") + e.what(), text);
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool s) { return s; }))
    throw BackendError("option reply must contain B, C and D", text);
  return out;
}

OptionSet request_options(const PromptBundle& bundle, Backend& backend) {
  const ChatRequest request{RequestKind::options, option_messages(bundle), context_of(bundle)};
  const auto bcd = with_retry([&] { return parse_option_reply(backend.complete(request).text); });

  OptionSet set;
  set.options[0] = {'A', bundle.option_a.text, bundle.option_a.plan};
  for (std::size_t i = 0; i < 3; ++i) set.options[i + 1] = bcd[i];
  set.options[4] = {'E', bundle.fallback_option_text, {{"ask_person", ""}}};
  set.validate();
  return set;
}

decision::TokenDistribution distribution_from_reply(const ChatReply& reply) {
  // The answer token is the first label token after "Answer:" when the
  // model echoes that cue, otherwise the first label token at all.
  std::string full;
  for (const auto& t : reply.tokens) full += t.token;
  const bool has_cue = full.find("Answer:") != std::string::npos;

  std::string prefix;
  const TokenLogprobs* answer = nullptr;
  for (const auto& t : reply.tokens) {
    const bool after_cue = !has_cue || prefix.find("Answer:") != std::string::npos;
    if (after_cue && decision::parse_label(t.token)) {
      answer = &t;
      break;
    }
    prefix += t.token;
  }
  if (!answer) throw BackendError("reply has no answer token with logprobs", reply.text);

  std::array<double, 5> mass{};
  auto add = [&](const std::string& token, double lp) {
    const auto label = decision::parse_label(token);
    if (!label || std::isnan(lp) || lp == std::numeric_limits<double>::infinity()) return;
    mass[*decision::label_index(*label)] += std::exp(std::min(lp, 0.0));
  };
  if (answer->top.empty()) {
    add(answer->token, answer->logprob);
  } else {
    for (const auto& alt : answer->top) add(alt.token, alt.logprob);
  }

  decision::TokenDistribution d;
  double total = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    d.probs[i] = std::max(std::min(mass[i], 1.0), kLabelFloor);
    total += d.probs[i];
  }
  for (auto& p : d.probs) p /= total;
  return d;
}

decision::TokenDistribution score_options(const PromptBundle& bundle, const OptionSet& options, Backend& backend) {
  options.validate();
  const ChatRequest request{RequestKind::answer, answer_messages(bundle, options), context_of(bundle)};
  return with_retry([&] { return distribution_from_reply(backend.complete(request)); });
}

}  // namespace trustnav::prompt
