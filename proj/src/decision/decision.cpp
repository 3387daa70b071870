#include "trustnav/decision/decision.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace trustnav::decision {

std::optional<std::size_t> label_index(char label) {
  if (label >= 'A' && label <= 'E') return static_cast<std::size_t>(label - 'A');
  return std::nullopt;
}

std::optional<char> parse_label(const std::string& token) {
  std::string core;
  for (char c : token) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '.' || c == ':' || c == '[' ||
        c == ']' || c == '"' || c == '\'')
      continue;
    core += c;
  }
  if (core.size() != 1) return std::nullopt;
  const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(core[0])));
  if (label_index(c)) return c;
  return std::nullopt;
}

double TokenDistribution::at(char label) const {
  const auto idx = label_index(label);
  return idx ? probs[*idx] : 0.0;
}

double TokenDistribution::sum() const {
  double s = 0.0;
  for (double p : probs) s += p;
  return s;
}

bool TokenDistribution::valid() const {
  for (double p : probs)
    if (!std::isfinite(p) || p < 0.0) return false;
  return std::abs(sum() - 1.0) <= 1e-9;
}

std::string to_string(Category c) { return c == Category::LU ? "LU" : "VU"; }

Category parse_category(const std::string& s) {
  if (s == "LU") return Category::LU;
  if (s == "VU") return Category::VU;
  throw InputError("category must be \"LU\" or \"VU\", got \"" + s + "\"");
}

char select_action(const TokenDistribution& rho) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rho.probs.size(); ++i)
    if (rho.probs[i] > rho.probs[best]) best = i;
  return kLabels[best];
}

double confidence_score(const TokenDistribution& rho, char true_label) {
  if (!label_index(true_label)) throw DomainError(std::string("invalid label '") + true_label + "'");
  const double p = std::clamp(rho.at(true_label), kProbabilityClamp, 1.0 - kProbabilityClamp);
  return 1.0 / -std::log(p);
}

Decision decide(std::string clip_id, const TokenDistribution& rho, char true_label) {
  return Decision{std::move(clip_id), select_action(rho), rho, confidence_score(rho, true_label)};
}

PssrReport pssr(const std::vector<EvaluationRecord>& records) {
  if (records.empty()) throw DomainError("cannot compute PSSR over an empty record list");
  PssrReport report;
  double conf_all = 0.0, conf_lu = 0.0, conf_vu = 0.0;
  for (const auto& r : records) {
    if (!label_index(r.truth)) throw DomainError("record " + r.clip_id + " has an invalid ground-truth label");
    auto& cat = r.category == Category::LU ? report.lu : report.vu;
    auto& conf = r.category == Category::LU ? conf_lu : conf_vu;
    ++report.overall.total;
    ++cat.total;
    if (r.correct()) {
      ++report.overall.correct;
      ++cat.correct;
    }
    conf_all += r.decision.confidence;
    conf += r.decision.confidence;
  }
  auto finish = [](CategoryScore& s, double conf) {
    if (s.total == 0) return;
    s.pssr = static_cast<double>(s.correct) / static_cast<double>(s.total);
    s.mean_confidence = conf / static_cast<double>(s.total);
  };
  finish(report.overall, conf_all);
  finish(report.lu, conf_lu);
  finish(report.vu, conf_vu);
  return report;
}

}  // namespace trustnav::decision
