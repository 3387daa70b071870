#include "trustnav/nav/perception.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>

#include "trustnav/assets.hpp"

namespace trustnav::nav {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::pair<std::string, std::string> key_of(const std::string& a, const std::string& b) {
  auto x = lower(a), y = lower(b);
  if (y < x) std::swap(x, y);
  return {x, y};
}

}  // namespace

std::string to_string(RelDir d) {
  switch (d) {
    case RelDir::front: return "front";
    case RelDir::left: return "left";
    case RelDir::right: return "right";
    case RelDir::back: return "back";
  }
  return "front";
}

double relative_bearing(const Environment& env, const RobotPose& pose, Vec2 p) {
  const Vec2 r = env.position_of(pose.cell);
  const double angle = std::atan2(p.y - r.y, p.x - r.x) * 180.0 / std::numbers::pi;
  double rel = std::fmod(static_cast<double>(pose.heading) - angle, 360.0);
  if (rel <= -180.0) rel += 360.0;
  if (rel > 180.0) rel -= 360.0;
  return rel;
}

bool line_of_sight(const Environment& env, Vec2 from, Vec2 to) {
  const Cell a = env.cell_of(from), b = env.cell_of(to);
  const double len = distance(from, to);
  const int samples = std::max(1, static_cast<int>(std::ceil(len / (env.cell_size() / 8.0))));
  for (int i = 1; i < samples; ++i) {
    const double f = static_cast<double>(i) / samples;
    const Cell c = env.cell_of({from.x + f * (to.x - from.x), from.y + f * (to.y - from.y)});
    if (c == a || c == b) continue;
    if (env.occupied(c)) return false;
  }
  return true;
}

Buckets visible_buckets(const Environment& env, const RobotPose& pose, double vision_distance) {
  Buckets out;
  const Vec2 here = env.position_of(pose.cell);
  for (const auto& obj : env.objects()) {
    if (distance(here, obj.position) > vision_distance + 1e-9) continue;
    const double b = relative_bearing(env, pose, obj.position);
    if (b <= -135.0 || b > 135.0) continue;
    if (!line_of_sight(env, here, obj.position)) continue;
    if (b <= -45.0) out.left.push_back(&obj);
    else if (b <= 45.0) out.front.push_back(&obj);
    else out.right.push_back(&obj);
  }
  return out;
}

double CoOccurrenceTable::affinity(const std::string& a, const std::string& b) const {
  if (lower(a) == lower(b)) return 1.0;
  const auto it = scores_.find(key_of(a, b));
  return it == scores_.end() ? 0.0 : it->second;
}

void CoOccurrenceTable::set(const std::string& a, const std::string& b, double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw InputError("affinity for (" + a + ", " + b + ") must lie in [0, 1]");
  if (lower(a) == lower(b)) {
    if (score != 1.0) throw InputError("self-affinity of " + a + " must be 1");
    return;
  }
  const auto key = key_of(a, b);
  if (const auto it = scores_.find(key); it != scores_.end() && it->second != score)
    throw InputError("conflicting affinities for (" + a + ", " + b + ")");
  scores_[key] = score;
}

CoOccurrenceTable CoOccurrenceTable::from_json(const nlohmann::json& j) {
  CoOccurrenceTable t;
  try {
    for (const auto& p : j.at("pairs")) {
      if (!p.is_array() || p.size() != 3) throw InputError("co-occurrence pairs must be [a, b, score]");
      t.set(p.at(0).get<std::string>(), p.at(1).get<std::string>(), p.at(2).get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("co-occurrence table: ") + e.what());
  }
  return t;
}

CoOccurrenceTable CoOccurrenceTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open co-occurrence table " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("co-occurrence table " + path + ": " + e.what());
  }
}

const CoOccurrenceTable& CoOccurrenceTable::defaults() {
  static const CoOccurrenceTable table = from_json(nlohmann::json::parse(assets::cooccurrence_json()));
  return table;
}

std::optional<RelDir> conjecture_direction(const Buckets& buckets, const std::string& target_category,
                                           const CoOccurrenceTable& table, const ConjectureConfig& cfg) {
  if (buckets.total() < cfg.k_min) return std::nullopt;
  auto score = [&](const std::vector<const SceneObject*>& objs) {
    double best = 0.0;
    for (const auto* o : objs) best = std::max(best, table.affinity(o->category, target_category));
    return best;
  };
  std::optional<RelDir> choice;
  double best = -1.0;
  for (const auto& [dir, objs] : {std::pair{RelDir::front, &buckets.front}, std::pair{RelDir::left, &buckets.left},
                                  std::pair{RelDir::right, &buckets.right}}) {
    const double s = score(*objs);
    if (s >= cfg.affinity_threshold && s > best) {
      best = s;
      choice = dir;
    }
  }
  return choice;
}

RelDir supervisor_hint(const Environment& env, const RobotPose& pose) {
  const Cell target = env.cell_of(env.target().position);
  const auto dist = bfs_steps(env, target, true);
  auto at = [&](Cell c) {
    return env.in_bounds(c) ? dist[static_cast<std::size_t>(c.y) * static_cast<std::size_t>(env.width()) + static_cast<std::size_t>(c.x)] : -1;
  };
  const int here = at(pose.cell);
  if (here < 0) throw DomainError("target " + env.target_id + " is unreachable from (" + std::to_string(pose.cell.x) + ", " +
                                  std::to_string(pose.cell.y) + ")");
  if (here == 0) return RelDir::front;
  for (const auto& [dir, turn] : {std::pair{RelDir::front, 0}, std::pair{RelDir::left, 90}, std::pair{RelDir::right, -90},
                                  std::pair{RelDir::back, 180}}) {
    const Cell s = step_of(pose.heading + turn);
    if (at({pose.cell.x + s.x, pose.cell.y + s.y}) == here - 1) return dir;
  }
  throw DomainError("supervisor found no descending neighbour");  // unreachable with a consistent BFS field
}

}  // namespace trustnav::nav
