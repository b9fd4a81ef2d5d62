#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "saynav/house_sim/simulator.hpp"
#include "saynav/low_planner/astar.hpp"

namespace saynav {

struct PointGoal {
  Vec2 target;
  double success_radius = 1.5;
  int max_steps = 300;
};

struct NavResult {
  bool success = false;
  int steps_taken = 0;
  double path_length = 0.0;
  std::vector<Action> actions;
  /// Cell after each action, parallel to `actions`.
  std::vector<Cell> trajectory;
  AgentState terminal;
  /// Length of the optimal path to the resolved goal cell; 0 without a path.
  double optimal_length = 0.0;
  bool no_path = false;
};

/// Cell the planner drives to for a metric target: the target cell when it
/// is reachable, else the nearest reachable cell by Euclidean distance
/// (lowest index on ties). nullopt when nothing is reachable from `from`.
std::optional<Cell> resolve_goal_cell(const OccupancyGrid& grid, Cell from, Vec2 target);

/// Turn and move primitives that follow `path` starting from `heading`.
std::vector<Action> path_to_actions(Heading heading, const std::vector<Cell>& path);

/// Oracle PointNav: already within the success radius means no motion;
/// otherwise the full A* path to the resolved goal cell is executed,
/// truncated at max_steps.
NavResult navigate_ornav(const House& house, const AgentState& start, const PointGoal& goal);

struct SurrogateParams {
  double sr_same_room = 0.985;
  double spl_same_room = 0.930;
  double sr_global = 0.845;
  double spl_global = 0.782;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Stochastic stand-in for a learned PointNav policy, calibrated to target
/// success rate and SPL. Each call draws from a generator keyed on
/// (rng_seed, invocation index).
class PNavSurrogate {
 public:
  explicit PNavSurrogate(SurrogateParams params);

  NavResult navigate(const House& house, const AgentState& start, const PointGoal& goal);

  std::uint64_t invocations() const { return invocations_; }
  const SurrogateParams& params() const { return params_; }

 private:
  SurrogateParams params_;
  std::uint64_t invocations_ = 0;
};

enum class LowLevelKind { OrNav, PNavS };

std::string_view to_string(LowLevelKind k);

/// Uniform front over both planners so callers never branch on the kind.
class LowLevelPlanner {
 public:
  static LowLevelPlanner oracle() { return LowLevelPlanner(LowLevelKind::OrNav, {}); }
  static LowLevelPlanner surrogate(SurrogateParams p) { return LowLevelPlanner(LowLevelKind::PNavS, p); }

  NavResult navigate(const House& house, const AgentState& start, const PointGoal& goal);
  LowLevelKind kind() const { return kind_; }

 private:
  LowLevelPlanner(LowLevelKind kind, SurrogateParams p);

  LowLevelKind kind_;
  std::optional<PNavSurrogate> surrogate_;
};

}  // namespace saynav
