#include "trustnav/nav/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace trustnav::nav {
namespace {

using nlohmann::json;
using Verb = ActionCommand::Verb;

constexpr double kEps = 1e-9;

int cell_count(const std::string& arg) {
  if (arg.empty()) return prompt::kDefaultForwardCells;
  return std::stoi(arg);
}

class Runner {
 public:
  Runner(const Environment& env, const PolicyConfig& cfg, const CoOccurrenceTable& table)
      : env_(env), cfg_(cfg), table_(table), pose_(env.start), target_(env.target()) {
    ep_.trajectory.poses.push_back(pose_);
    if (found()) finish(Termination::target_found);
  }

  void run(const std::vector<ActionCommand>& commands) {
    for (const auto& cmd : commands) {
      if (done_) break;
      ep_.trajectory.commands.push_back(cmd);
      switch (cmd.verb) {
        case Verb::move_forward:
          for (int i = 0; i < cmd.cells && !done_; ++i)
            if (!forward()) break;
          break;
        case Verb::move_forward_to_target: move_to(cmd.landmark); break;
        case Verb::turn_left: turn(90); break;
        case Verb::turn_right: turn(-90); break;
        case Verb::explore_here: explore(); break;
        case Verb::ask_person: ask(); break;
        case Verb::stop: finish(Termination::stop); break;
      }
    }
    if (!done_) finish(Termination::plan_end);
  }

  Episode result() {
    auto& r = ep_.result;
    r.success = found();
    r.distance_to_target = distance_to_target(env_, pose_.cell);
    r.shortest_path = optimal_path_length(env_, cfg_.vision_distance);
    r.spl_term = spl_term(r.success, r.path_distance, r.shortest_path);
    return ep_;
  }

 private:
  Vec2 here() const { return env_.position_of(pose_.cell); }
  bool found() const { return distance(here(), target_.position) <= cfg_.vision_distance + kEps; }

  void finish(Termination t) {
    if (done_) return;
    done_ = true;
    ep_.result.termination = t;
  }

  void note(std::string what) { ep_.trajectory.events.push_back({ep_.trajectory.primitives, std::move(what)}); }

  // Called after every primitive and penalty.
  void check() {
    if (found()) finish(Termination::target_found);
    else if (ep_.result.steps >= cfg_.step_budget) finish(Termination::budget);
  }

  void primitive(const RobotPose& next, double moved) {
    pose_ = next;
    ep_.trajectory.poses.push_back(pose_);
    ++ep_.trajectory.primitives;
    ++ep_.result.steps;
    ep_.result.path_distance += moved;
    check();
  }

  Cell ahead() const {
    const Cell s = step_of(pose_.heading);
    return {pose_.cell.x + s.x, pose_.cell.y + s.y};
  }

  bool forward() {
    const Cell next = ahead();
    if (env_.occupied(next)) {
      note("blocked");
      return false;
    }
    primitive({next, pose_.heading}, env_.cell_size());
    return true;
  }

  void turn(int degrees) { primitive({pose_.cell, normalize_heading(pose_.heading + degrees)}, 0.0); }

  // Turn toward `dir` (if needed) and step once. False when blocked.
  bool go(RelDir dir) {
    switch (dir) {
      case RelDir::front: break;
      case RelDir::left: turn(90); break;
      case RelDir::right: turn(-90); break;
      case RelDir::back:
        turn(90);
        if (!done_) turn(90);
        break;
    }
    if (done_) return true;
    return forward();
  }

  bool blocked(RelDir dir) const {
    const int rel = dir == RelDir::front ? 0 : dir == RelDir::left ? 90 : dir == RelDir::right ? -90 : 180;
    const Cell s = step_of(pose_.heading + rel);
    return env_.occupied({pose_.cell.x + s.x, pose_.cell.y + s.y});
  }

  std::optional<RelDir> consult_supervisor(bool charge) {
    try {
      const RelDir d = supervisor_hint(env_, pose_);
      if (charge) {
        ++ep_.result.supervisor_calls;
        ep_.result.steps += cfg_.supervisor_penalty;
        note("supervisor: " + to_string(d));
        check();
      }
      return d;
    } catch (const DomainError& e) {
      note(std::string("supervisor failed: ") + e.what());
      finish(Termination::plan_end);
      return std::nullopt;
    }
  }

  void move_to(const std::string& landmark) {
    const auto candidates = env_.find_by_name(landmark);
    if (candidates.empty()) {
      note("unknown landmark: " + landmark);
      return;
    }
    const SceneObject* goal = *std::min_element(candidates.begin(), candidates.end(), [&](auto* a, auto* b) {
      return distance(here(), a->position) < distance(here(), b->position);
    });
    while (!done_) {
      const double d = distance(here(), goal->position);
      if (d <= cfg_.vision_distance + kEps) break;
      // Never walk past the point of closest approach.
      if (distance(env_.position_of(ahead()), goal->position) >= d) break;
      if (!forward()) break;
    }
  }

  void explore() {
    while (!done_) {
      std::optional<RelDir> dir;
      if (cfg_.use_conjecture) {
        const auto buckets = visible_buckets(env_, pose_, cfg_.vision_distance);
        dir = conjecture_direction(buckets, target_.category, table_, cfg_.conjecture);
        if (dir) {
          ++ep_.result.conjectures;
          note("conjecture: " + to_string(*dir));
          if (blocked(*dir)) dir.reset();
        }
      }
      if (!dir) {
        dir = consult_supervisor(true);
        if (!dir || done_) return;
      }
      if (!go(*dir) && !done_) {
        note("explore stalled");
        return;
      }
    }
  }

  void ask() {
    if (!consult_supervisor(true)) return;
    while (!done_) {
      const auto dir = consult_supervisor(false);
      if (!dir) return;
      if (!go(*dir) && !done_) return;
    }
  }

  const Environment& env_;
  const PolicyConfig& cfg_;
  const CoOccurrenceTable& table_;
  RobotPose pose_;
  const SceneObject& target_;
  Episode ep_;
  bool done_ = false;
};

}  // namespace

std::string ActionCommand::to_string() const {
  switch (verb) {
    case Verb::move_forward: return "move_forward(" + std::to_string(cells) + ")";
    case Verb::move_forward_to_target: return "move_forward_to_target(" + landmark + ")";
    case Verb::turn_left: return "turn_left()";
    case Verb::turn_right: return "turn_right()";
    case Verb::explore_here: return "explore_here()";
    case Verb::ask_person: return "ask_person()";
    case Verb::stop: return "stop()";
  }
  return "stop()";
}

std::vector<ActionCommand> compile_plan(const std::vector<prompt::PlanStep>& plan) {
  std::vector<ActionCommand> out;
  for (const auto& step : plan) {
    prompt::validate_step(step);
    ActionCommand c;
    if (step.verb == "move_to") {
      c.verb = Verb::move_forward_to_target;
      c.landmark = step.argument;
    } else if (step.verb == "turn") {
      c.verb = step.argument == "left" ? Verb::turn_left : Verb::turn_right;
    } else if (step.verb == "move_forward") {
      c.verb = Verb::move_forward;
      c.cells = cell_count(step.argument);
    } else if (step.verb == "explore_here") {
      c.verb = Verb::explore_here;
    } else if (step.verb == "ask_person") {
      c.verb = Verb::ask_person;
    } else if (step.verb == "stop") {
      c.verb = Verb::stop;
    } else {
      throw prompt::PlanError("no command for verb " + step.verb);
    }
    out.push_back(std::move(c));
  }
  return out;
}

void PolicyConfig::validate() const {
  if (!(vision_distance > 0.0)) throw InputError("policy.vision_distance must be positive");
  if (!(conjecture.affinity_threshold >= 0.0 && conjecture.affinity_threshold <= 1.0))
    throw InputError("policy.affinity_threshold must lie in [0, 1]");
  if (step_budget <= 0) throw InputError("policy.step_budget must be positive");
  if (supervisor_penalty < 0) throw InputError("policy.supervisor_penalty must be non-negative");
}

json PolicyConfig::to_json() const {
  return {{"vision_distance", vision_distance},      {"affinity_threshold", conjecture.affinity_threshold},
          {"k_min", conjecture.k_min},                {"use_conjecture", use_conjecture},
          {"step_budget", step_budget},               {"supervisor_penalty", supervisor_penalty}};
}

PolicyConfig PolicyConfig::from_json(const json& j) {
  PolicyConfig c;
  try {
    c.vision_distance = j.value("vision_distance", c.vision_distance);
    c.conjecture.affinity_threshold = j.value("affinity_threshold", c.conjecture.affinity_threshold);
    c.conjecture.k_min = j.value("k_min", c.conjecture.k_min);
    c.use_conjecture = j.value("use_conjecture", c.use_conjecture);
    c.step_budget = j.value("step_budget", c.step_budget);
    c.supervisor_penalty = j.value("supervisor_penalty", c.supervisor_penalty);
  } catch (const json::exception& e) {
    throw InputError(std::string("policy config: ") + e.what());
  }
  c.validate();
  return c;
}

json Trajectory::to_json(const Environment& env) const {
  json poses = json::array();
  for (const auto& p : this->poses) {
    const Vec2 v = env.position_of(p.cell);
    poses.push_back({v.x, v.y, p.heading});
  }
  json cmds = json::array();
  for (const auto& c : commands) cmds.push_back(c.to_string());
  json evs = json::array();
  for (const auto& e : events) evs.push_back({{"after", e.after_primitive}, {"event", e.what}});
  return {{"environment", env.id()}, {"poses", poses}, {"commands", cmds}, {"events", evs}, {"primitives", primitives}};
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::target_found: return "target_found";
    case Termination::stop: return "stop";
    case Termination::budget: return "budget";
    case Termination::plan_end: return "plan_end";
  }
  return "plan_end";
}

double optimal_path_length(const Environment& env, double vision_distance) {
  const auto dist = bfs_steps(env, env.start.cell);
  const Vec2 target = env.target().position;
  int best = -1;
  for (int y = 0; y < env.height(); ++y)
    for (int x = 0; x < env.width(); ++x) {
      const int d = dist[static_cast<std::size_t>(y) * static_cast<std::size_t>(env.width()) + static_cast<std::size_t>(x)];
      if (d < 0 || (best >= 0 && d >= best)) continue;
      if (distance(env.position_of({x, y}), target) <= vision_distance + kEps) best = d;
    }
  return best < 0 ? kUnreachable : best * env.cell_size();
}

double distance_to_target(const Environment& env, Cell from) {
  return distance(env.position_of(from), env.target().position);
}

double spl_term(bool success, double path, double shortest) {
  if (!success) return 0.0;
  const double denom = std::max(path, shortest);
  if (denom <= 0.0) return 1.0;
  if (!std::isfinite(shortest)) return 0.0;
  return shortest / denom;
}

Episode execute(const std::vector<ActionCommand>& commands, const Environment& env, const PolicyConfig& cfg,
                const CoOccurrenceTable& table) {
  cfg.validate();
  env.validate();
  Runner runner(env, cfg, table);
  runner.run(commands);
  return runner.result();
}

EpisodeAggregate episode_metrics(const std::vector<EpisodeResult>& results) {
  if (results.empty()) throw DomainError("episode_metrics needs at least one episode");
  EpisodeAggregate a;
  a.episodes = results.size();
  for (const auto& r : results) {
    a.success_rate += r.success ? 1.0 : 0.0;
    a.mean_steps += r.steps;
    a.mean_path_distance += r.path_distance;
    a.mean_distance_to_target += r.distance_to_target;
    a.spl += r.spl_term;
  }
  const double n = static_cast<double>(results.size());
  a.success_rate /= n;
  a.mean_steps /= n;
  a.mean_path_distance /= n;
  a.mean_distance_to_target /= n;
  a.spl /= n;
  return a;
}

}  // namespace trustnav::nav
