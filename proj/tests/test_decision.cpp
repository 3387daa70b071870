#include <doctest.h>

#include <cmath>
#include <random>

#include "trustnav/decision/decision.hpp"

using namespace trustnav::decision;

namespace {

TokenDistribution dist(std::array<double, 5> p) { return TokenDistribution{p}; }

TokenDistribution random_dist(std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  TokenDistribution d;
  double s = 0.0;
  for (auto& p : d.probs) s += (p = e(rng));
  for (auto& p : d.probs) p /= s;
  return d;
}

EvaluationRecord record(std::string id, Category c, char truth, char chosen) {
  TokenDistribution d;
  d.probs.fill(0.1);
  d.probs[*label_index(chosen)] = 0.6;
  return {id, c, truth, decide(id, d, truth)};
}

}  // namespace

TEST_CASE("select_action") {
  CHECK(select_action(dist({0.1, 0.6, 0.1, 0.1, 0.1})) == 'B');
  CHECK(select_action(TokenDistribution::uniform()) == 'A');
  CHECK(select_action(dist({0.05, 0.05, 0.05, 0.05, 0.8})) == 'E');
  CHECK(select_action(dist({0.1, 0.35, 0.1, 0.35, 0.1})) == 'B');
}

TEST_CASE("confidence_score") {
  CHECK(confidence_score(TokenDistribution::uniform(), 'C') == doctest::Approx(1.0 / std::log(5.0)).epsilon(1e-12));
  CHECK(std::abs(confidence_score(TokenDistribution::uniform(), 'A') - 0.6213349) < 1e-6);
  CHECK(confidence_score(dist({0.1, 0.6, 0.1, 0.1, 0.1}), 'B') == doctest::Approx(1.0 / -std::log(0.6)));
  CHECK(std::abs(confidence_score(dist({0.1, 0.6, 0.1, 0.1, 0.1}), 'B') - 1.9576) < 1e-4);
  const double capped = confidence_score(dist({1.0, 0.0, 0.0, 0.0, 0.0}), 'A');
  CHECK(std::isfinite(capped));
  CHECK(capped == doctest::Approx(1.0 / -std::log1p(-1e-9)).epsilon(1e-6));
  CHECK(capped == doctest::Approx(1e9).epsilon(1e-6));
  CHECK(std::isfinite(confidence_score(dist({1.0, 0.0, 0.0, 0.0, 0.0}), 'B')));
  CHECK_THROWS_AS(confidence_score(TokenDistribution::uniform(), 'F'), trustnav::DomainError);
}

TEST_CASE("property: confidence is strictly increasing in the true-label probability") {
  std::mt19937_64 rng(17);
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 1000; ++i) {
    const auto d = random_dist(rng);
    pts.emplace_back(d.at('D'), confidence_score(d, 'D'));
  }
  for (const auto& [p, c] : pts)
    for (const auto& [q, k] : pts)
      if (p < q) REQUIRE(c < k);
}

TEST_CASE("property: argmax is invariant under positive rescaling") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int i = 0; i < 2000; ++i) {
    const auto d = random_dist(rng);
    const double k = scale(rng);
    TokenDistribution e;
    double s = 0.0;
    for (std::size_t j = 0; j < 5; ++j) s += (e.probs[j] = d.probs[j] * k);
    for (auto& p : e.probs) p /= s;
    CHECK(select_action(e) == select_action(d));
  }
}

TEST_CASE("label parsing") {
  CHECK(parse_label("A") == 'A');
  CHECK(parse_label(" b") == 'B');
  CHECK(parse_label("(E)") == 'E');
  CHECK_FALSE(parse_label("F"));
  CHECK_FALSE(parse_label("AB"));
  CHECK_FALSE(parse_label(""));
}

TEST_CASE("pssr") {
  std::vector<EvaluationRecord> four = {record("1", Category::LU, 'B', 'B'), record("2", Category::LU, 'B', 'A'),
                                        record("3", Category::VU, 'E', 'E'), record("4", Category::VU, 'A', 'A')};
  const auto r = pssr(four);
  CHECK(r.overall.pssr == 0.75);
  CHECK(r.lu.pssr == 0.5);
  CHECK(r.vu.pssr == 1.0);
  CHECK(r.lu.total == 2);

  four[1] = record("2", Category::LU, 'A', 'A');
  CHECK(pssr(four).overall.pssr == 1.0);
  CHECK_THROWS_AS(pssr({}), trustnav::DomainError);
}

TEST_CASE("property: overall PSSR is the count-weighted mean of the category scores") {
  std::mt19937_64 rng(29);
  std::vector<EvaluationRecord> recs;
  for (int i = 0; i < 500; ++i) {
    const auto cat = i < 285 ? Category::LU : Category::VU;
    recs.push_back(record(std::to_string(i), cat, kLabels[rng() % 5], kLabels[rng() % 5]));
  }
  const auto r = pssr(recs);
  CHECK(r.lu.total == 285);
  CHECK(r.vu.total == 215);
  CHECK(r.overall.pssr >= 0.0);
  CHECK(r.overall.pssr <= 1.0);
  const double weighted = (285.0 * r.lu.pssr + 215.0 * r.vu.pssr) / 500.0;
  CHECK(std::abs(r.overall.pssr - weighted) < 1e-15);
  CHECK(r.overall.correct == r.lu.correct + r.vu.correct);
}
