#pragma once

#include <array>
#include <optional>
#include <string>

namespace trustnav::decision {

inline constexpr std::array<char, 5> kLabels = {'A', 'B', 'C', 'D', 'E'};

/// Index of 'A'..'E', or nullopt.
std::optional<std::size_t> label_index(char label);
/// Accepts "A", " A", "(A", "A)", "a." etc. Returns nullopt for anything else.
std::optional<char> parse_label(const std::string& token);

/// Probability vector over the five option labels.
struct TokenDistribution {
  std::array<double, 5> probs{0.2, 0.2, 0.2, 0.2, 0.2};

  double at(char label) const;
  double sum() const;
  /// Sums to one within 1e-9, all entries finite and non-negative.
  bool valid() const;

  static TokenDistribution uniform() { return {}; }
  bool operator==(const TokenDistribution&) const = default;
};

}  // namespace trustnav::decision
