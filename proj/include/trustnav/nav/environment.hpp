#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustnav/error.hpp"

namespace trustnav::nav {

struct Cell {
  int x = 0;
  int y = 0;

  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell&) const = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

double distance(Vec2 a, Vec2 b);

struct SceneObject {
  std::string id;
  std::string category;
  Vec2 position;        // meters
  bool blocking = true; // occupies its cell

  bool operator==(const SceneObject&) const = default;
};

/// Heading in degrees: 0 = +x (east), 90 = +y (north). Turning left adds 90.
struct RobotPose {
  Cell cell;
  int heading = 90;

  bool operator==(const RobotPose&) const = default;
};

/// Unit step for a heading that is a multiple of 90.
Cell step_of(int heading);
int normalize_heading(int degrees);

/// Occupancy grid at `cell_size` pitch plus named objects. Cell (x, y) sits
/// at (x * cell_size, y * cell_size) meters.
class Environment {
 public:
  Environment() = default;
  Environment(std::string id, int width, int height, double cell_size);

  const std::string& id() const { return id_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  /// Out-of-bounds cells count as occupied.
  bool occupied(Cell c) const;
  void set_occupied(Cell c, bool value = true);

  Vec2 position_of(Cell c) const { return {c.x * cell_size_, c.y * cell_size_}; }
  Cell cell_of(Vec2 p) const;

  const std::vector<SceneObject>& objects() const { return objects_; }
  /// Adds the object and, when blocking, marks its cell occupied.
  void add_object(SceneObject obj);
  const SceneObject* find_object(const std::string& id) const;
  /// Objects whose id or category equals `name` (case-insensitive).
  std::vector<const SceneObject*> find_by_name(const std::string& name) const;

  RobotPose start;
  std::string target_id;

  const SceneObject& target() const;
  /// Target exists and has a free 4-neighbour, start cell free and heading valid.
  void validate() const;

  static Environment from_json(const nlohmann::json& j);
  static Environment load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

 private:
  std::string id_;
  int width_ = 0;
  int height_ = 0;
  double cell_size_ = 0.25;
  std::vector<char> occ_;
  std::vector<SceneObject> objects_;
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// BFS step counts from `source` over free cells (4-connected); -1 where
/// unreachable. When `enter_source_occupied` is set the source itself may be
/// occupied (used to measure distance to an object standing on its cell).
std::vector<int> bfs_steps(const Environment& env, Cell source, bool enter_source_occupied = false);

/// 4-connected BFS length in meters between free cells; kUnreachable when
/// disconnected. Throws DomainError on occupied or out-of-bounds endpoints.
double shortest_path(const Environment& env, Cell from, Cell to);

}  // namespace trustnav::nav
