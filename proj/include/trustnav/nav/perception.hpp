#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trustnav/nav/environment.hpp"

namespace trustnav::nav {

enum class RelDir { front, left, right, back };

std::string to_string(RelDir d);

struct Buckets {
  std::vector<const SceneObject*> left;
  std::vector<const SceneObject*> front;
  std::vector<const SceneObject*> right;

  std::size_t total() const { return left.size() + front.size() + right.size(); }
};

/// Bearing of `p` from the pose, degrees in (-180, 180], clockwise positive
/// (so +90 is to the robot's right).
double relative_bearing(const Environment& env, const RobotPose& pose, Vec2 p);

/// True when no occupied cell other than the two endpoint cells lies on the segment.
bool line_of_sight(const Environment& env, Vec2 from, Vec2 to);

/// Objects within `vision_distance` and +-135 degrees of the heading, with
/// a clear line of sight: left (-135, -45], front (-45, 45], right (45, 135].
Buckets visible_buckets(const Environment& env, const RobotPose& pose, double vision_distance);

class CoOccurrenceTable {
 public:
  /// 1 for identical categories, the stored score otherwise, 0 when unknown.
  double affinity(const std::string& a, const std::string& b) const;
  void set(const std::string& a, const std::string& b, double score);
  std::size_t size() const { return scores_.size(); }

  static const CoOccurrenceTable& defaults();
  static CoOccurrenceTable from_json(const nlohmann::json& j);
  static CoOccurrenceTable load(const std::string& path);

 private:
  std::map<std::pair<std::string, std::string>, double> scores_;
};

struct ConjectureConfig {
  double affinity_threshold = 0.5;
  std::size_t k_min = 2;
};

/// Direction whose best object affinity to the target is highest, if it
/// reaches the threshold and at least k_min objects are visible. Ties go
/// front, then left, then right.
std::optional<RelDir> conjecture_direction(const Buckets& buckets, const std::string& target_category,
                                           const CoOccurrenceTable& table, const ConjectureConfig& cfg = {});

/// First move of a BFS shortest path from the pose to the target's cell,
/// relative to the heading. Ties go front, left, right, back. Throws
/// DomainError when the target cannot be reached.
RelDir supervisor_hint(const Environment& env, const RobotPose& pose);

}  // namespace trustnav::nav
