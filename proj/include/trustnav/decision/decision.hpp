#pragma once

#include <string>
#include <vector>

#include "trustnav/decision/distribution.hpp"
#include "trustnav/error.hpp"

namespace trustnav::decision {

enum class Category { LU, VU };

std::string to_string(Category c);
Category parse_category(const std::string& s);

/// Argmax label; exact ties go to the earliest label.
char select_action(const TokenDistribution& rho);

inline constexpr double kProbabilityClamp = 1e-9;

/// Inverse KL divergence between a point mass on `true_label` and rho,
/// i.e. 1 / -ln rho[true], with rho[true] clamped into [1e-9, 1 - 1e-9].
double confidence_score(const TokenDistribution& rho, char true_label);

struct Decision {
  std::string clip_id;
  char chosen = 'A';
  TokenDistribution distribution;
  double confidence = 0.0;  // against the ground-truth label
};

Decision decide(std::string clip_id, const TokenDistribution& rho, char true_label);

struct EvaluationRecord {
  std::string clip_id;
  Category category = Category::LU;
  char truth = 'A';
  Decision decision;

  bool correct() const { return decision.chosen == truth; }
};

struct CategoryScore {
  std::size_t total = 0;
  std::size_t correct = 0;
  double pssr = 0.0;
  double mean_confidence = 0.0;
};

struct PssrReport {
  CategoryScore overall;
  CategoryScore lu;
  CategoryScore vu;
};

/// Fraction of records whose chosen label matches the annotation, overall
/// and per category, plus mean confidence. Throws DomainError on an empty list.
PssrReport pssr(const std::vector<EvaluationRecord>& records);

}  // namespace trustnav::decision
