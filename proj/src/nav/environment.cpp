#include "trustnav/nav/environment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <deque>
#include <fstream>

namespace trustnav::nav {
namespace {

using nlohmann::json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Vec2 vec_of(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InputError("positions must be [x, y] in meters");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

constexpr std::array<Cell, 4> kNeighbours = {Cell{1, 0}, Cell{0, 1}, Cell{-1, 0}, Cell{0, -1}};

}  // namespace

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

int normalize_heading(int degrees) { return ((degrees % 360) + 360) % 360; }

Cell step_of(int heading) {
  switch (normalize_heading(heading)) {
    case 0: return {1, 0};
    case 90: return {0, 1};
    case 180: return {-1, 0};
    case 270: return {0, -1};
  }
  throw DomainError("heading must be a multiple of 90 degrees, got " + std::to_string(heading));
}

Environment::Environment(std::string id, int width, int height, double cell_size)
    : id_(std::move(id)), width_(width), height_(height), cell_size_(cell_size) {
  if (width <= 0 || height <= 0) throw InputError("environment dimensions must be positive");
  if (!(cell_size > 0.0)) throw InputError("cell size must be positive");
  occ_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

bool Environment::occupied(Cell c) const {
  if (!in_bounds(c)) return true;
  return occ_[static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x)] != 0;
}

void Environment::set_occupied(Cell c, bool value) {
  if (!in_bounds(c)) throw DomainError("cell (" + std::to_string(c.x) + ", " + std::to_string(c.y) + ") is out of bounds");
  occ_[static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x)] = value ? 1 : 0;
}

Cell Environment::cell_of(Vec2 p) const {
  return {static_cast<int>(std::lround(p.x / cell_size_)), static_cast<int>(std::lround(p.y / cell_size_))};
}

void Environment::add_object(SceneObject obj) {
  const Cell c = cell_of(obj.position);
  if (!in_bounds(c)) throw InputError("object " + obj.id + " lies outside the grid");
  if (find_object(obj.id)) throw InputError("duplicate object id " + obj.id);
  if (obj.blocking) set_occupied(c);
  objects_.push_back(std::move(obj));
}

const SceneObject* Environment::find_object(const std::string& id) const {
  for (const auto& o : objects_)
    if (o.id == id) return &o;
  return nullptr;
}

std::vector<const SceneObject*> Environment::find_by_name(const std::string& name) const {
  const auto key = lower(name);
  std::vector<const SceneObject*> out;
  for (const auto& o : objects_)
    if (lower(o.id) == key || lower(o.category) == key) out.push_back(&o);
  return out;
}

const SceneObject& Environment::target() const {
  const auto* t = find_object(target_id);
  if (!t) throw InputError("environment " + id_ + ": target object \"" + target_id + "\" does not exist");
  return *t;
}

void Environment::validate() const {
  const Cell tc = cell_of(target().position);
  const bool reachable_side = std::any_of(kNeighbours.begin(), kNeighbours.end(), [&](Cell d) {
    return !occupied({tc.x + d.x, tc.y + d.y});
  });
  if (!reachable_side) throw InputError("environment " + id_ + ": target has no free neighbouring cell");
  if (occupied(start.cell)) throw InputError("environment " + id_ + ": start cell is occupied");
  if (start.heading % 90 != 0) throw InputError("environment " + id_ + ": start heading must be a multiple of 90");
}

Environment Environment::from_json(const json& j) {
  try {
    Environment env(j.at("id").get<std::string>(), j.at("width").get<int>(), j.at("height").get<int>(),
                    j.value("cell_size", 0.25));
    if (j.contains("rows")) {
      const auto& rows = j.at("rows");
      if (rows.size() != static_cast<std::size_t>(env.height_)) throw InputError("rows must have one entry per grid row");
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto row = rows[r].get<std::string>();
        if (row.size() != static_cast<std::size_t>(env.width_)) throw InputError("every row must be width characters long");
        const int y = env.height_ - 1 - static_cast<int>(r);
        for (int x = 0; x < env.width_; ++x)
          if (row[static_cast<std::size_t>(x)] == '#') env.set_occupied({x, y});
      }
    }
    if (j.contains("occupied"))
      for (const auto& c : j.at("occupied")) {
        const Cell cell{c.at(0).get<int>(), c.at(1).get<int>()};
        if (!env.in_bounds(cell)) throw InputError("occupied cell out of bounds");
        env.set_occupied(cell);
      }
    for (const auto& o : j.at("objects"))
      env.add_object({o.at("id").get<std::string>(), o.at("category").get<std::string>(), vec_of(o.at("position")),
                       o.value("blocking", true)});
    const auto& s = j.at("start");
    env.start = {env.cell_of(vec_of(s.at("position"))), normalize_heading(s.value("heading", 90))};
    env.target_id = j.at("target").get<std::string>();
    env.validate();
    return env;
  } catch (const json::exception& e) {
    throw InputError(std::string("environment: ") + e.what());
  }
}

Environment Environment::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open environment " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("environment " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

json Environment::to_json() const {
  // Object cells are rebuilt from the object list, so they are left out of rows.
  std::vector<char> bare = occ_;
  for (const auto& o : objects_)
    if (o.blocking) {
      const Cell c = cell_of(o.position);
      bare[static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x)] = 0;
    }
  json rows = json::array();
  for (int y = height_ - 1; y >= 0; --y) {
    std::string row(static_cast<std::size_t>(width_), '.');
    for (int x = 0; x < width_; ++x)
      if (bare[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)]) row[static_cast<std::size_t>(x)] = '#';
    rows.push_back(row);
  }
  json objects = json::array();
  for (const auto& o : objects_) {
    json jo = {{"id", o.id}, {"category", o.category}, {"position", {o.position.x, o.position.y}}};
    if (!o.blocking) jo["blocking"] = false;
    objects.push_back(jo);
  }
  const Vec2 sp = position_of(start.cell);
  return {{"schema_version", 1}, {"id", id_},       {"width", width_},
          {"height", height_},   {"cell_size", cell_size_}, {"rows", rows},
          {"objects", objects},  {"start", {{"position", {sp.x, sp.y}}, {"heading", start.heading}}},
          {"target", target_id}};
}

std::vector<int> bfs_steps(const Environment& env, Cell source, bool enter_source_occupied) {
  std::vector<int> dist(static_cast<std::size_t>(env.width()) * static_cast<std::size_t>(env.height()), -1);
  auto idx = [&](Cell c) { return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(env.width()) + static_cast<std::size_t>(c.x); };
  if (!env.in_bounds(source) || (env.occupied(source) && !enter_source_occupied)) return dist;
  std::deque<Cell> queue{source};
  dist[idx(source)] = 0;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (const Cell d : kNeighbours) {
      const Cell n{c.x + d.x, c.y + d.y};
      if (env.occupied(n) || dist[idx(n)] >= 0) continue;
      dist[idx(n)] = dist[idx(c)] + 1;
      queue.push_back(n);
    }
  }
  return dist;
}

double shortest_path(const Environment& env, Cell from, Cell to) {
  for (const Cell c : {from, to})
    if (env.occupied(c))
      throw DomainError("shortest_path endpoint (" + std::to_string(c.x) + ", " + std::to_string(c.y) + ") is occupied");
  const auto dist = bfs_steps(env, from);
  const int d = dist[static_cast<std::size_t>(to.y) * static_cast<std::size_t>(env.width()) + static_cast<std::size_t>(to.x)];
  return d < 0 ? kUnreachable : d * env.cell_size();
}

}  // namespace trustnav::nav
