#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "trustnav/nav/perception.hpp"
#include "trustnav/prompt/plan.hpp"

namespace trustnav::nav {

struct ActionCommand {
  enum class Verb { move_forward, move_forward_to_target, turn_left, turn_right, explore_here, ask_person, stop };
  Verb verb = Verb::stop;
  std::string landmark;  // move_forward_to_target only
  int cells = 0;         // move_forward only

  std::string to_string() const;
  bool operator==(const ActionCommand&) const = default;
};

/// One command per plan step. Throws prompt::PlanError on unknown verbs or
/// missing arguments.
std::vector<ActionCommand> compile_plan(const std::vector<prompt::PlanStep>& plan);

struct PolicyConfig {
  double vision_distance = 1.5;  // meters; also the success radius
  ConjectureConfig conjecture;
  bool use_conjecture = true;    // off = no visual reasoning, Γ only
  int step_budget = 200;
  int supervisor_penalty = 2;    // steps charged per Γ call

  void validate() const;
  nlohmann::json to_json() const;
  static PolicyConfig from_json(const nlohmann::json& j);
};

struct TrajectoryEvent {
  std::size_t after_primitive = 0;  // number of primitives executed so far
  std::string what;
};

struct Trajectory {
  std::vector<RobotPose> poses;            // start pose, then one per primitive
  std::vector<ActionCommand> commands;     // commands actually started
  std::vector<TrajectoryEvent> events;     // conjectures, Γ calls, collisions
  std::size_t primitives = 0;

  nlohmann::json to_json(const Environment& env) const;
};

enum class Termination { target_found, stop, budget, plan_end };

std::string to_string(Termination t);

struct EpisodeResult {
  bool success = false;
  int steps = 0;                  // primitives plus Γ penalties
  double path_distance = 0.0;     // meters travelled
  double distance_to_target = 0.0;
  double shortest_path = 0.0;     // start to the success region
  double spl_term = 0.0;
  int supervisor_calls = 0;
  int conjectures = 0;
  Termination termination = Termination::plan_end;
};

/// Optimal path length from the start to any free cell within the vision
/// distance of the target.
double optimal_path_length(const Environment& env, double vision_distance);

/// Straight-line distance from `from` to the target in meters. Matches the
/// success test, so success implies distance_to_target <= vision distance.
double distance_to_target(const Environment& env, Cell from);

/// S * l / max(p, l); S when both are zero.
double spl_term(bool success, double path, double shortest);

struct Episode {
  Trajectory trajectory;
  EpisodeResult result;
};

Episode execute(const std::vector<ActionCommand>& commands, const Environment& env, const PolicyConfig& cfg,
                const CoOccurrenceTable& table = CoOccurrenceTable::defaults());

struct EpisodeAggregate {
  std::size_t episodes = 0;
  double success_rate = 0.0;
  double mean_steps = 0.0;
  double mean_path_distance = 0.0;
  double mean_distance_to_target = 0.0;
  double spl = 0.0;
};

/// Throws DomainError on an empty list.
EpisodeAggregate episode_metrics(const std::vector<EpisodeResult>& results);

}  // namespace trustnav::nav
