#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "saynav/core/geometry.hpp"
#include "saynav/house_sim/house.hpp"

namespace saynav {

enum class Action : std::uint8_t { MoveForward, TurnLeft, TurnRight, Stop };

std::string_view to_string(Action a);

struct AgentState {
  Cell cell;
  Heading heading = Heading::East;
  int step_count = 0;
  double path_length = 0.0;

  Vec2 position() const { return cell_center(cell); }
  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct StepResult {
  AgentState state;
  bool collided = false;
};

/// Applies one primitive action. Turns rotate by 90 degrees in place; a
/// forward move into a non-traversable cell leaves the pose unchanged and
/// reports a collision. step_count always advances by one.
StepResult step(const House& house, const AgentState& state, Action action);
StepResult step(const OccupancyGrid& grid, const AgentState& state, Action action);

/// Primitive steps charged for one look_around (one quarter-turn capture per facing).
inline constexpr int kLookAroundCost = 4;

enum class EntityKind : std::uint8_t { Object, Door, Wall };

std::string_view to_string(EntityKind k);

struct Percept {
  EntityKind kind = EntityKind::Object;
  std::string category;
  Vec3 position;
  /// Estimated largest extent, meters.
  double size = 0.0;
  std::optional<bool> door_open;
  /// Which of the four captures saw it (0 = current heading, counter-clockwise).
  int capture = 0;
  /// Ground-truth entity id. Only metrics and tests read this; the scene
  /// graph never does.
  int truth_id = -1;

  friend bool operator==(const Percept&, const Percept&) = default;
};

struct Observation {
  AgentState pose;
  std::vector<Percept> percepts;
  /// Set only by ground-truth perception.
  std::optional<int> gt_room;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct PerceptionConfig {
  double fov_degrees = 90.0;
  double max_range = 5.0;
  double min_angular_size = 0.02;
  double position_noise_sigma = 0.05;
  bool gt_mode = false;
  std::uint64_t noise_seed = 0;
  /// Rays per degree used to detect wall surfaces.
  int wall_rays_per_degree = 1;
};

/// Full 360 degree sweep made of four captures at the current pose. Charges
/// kLookAroundCost steps to `state`.
Observation look_around(const House& house, AgentState& state, const PerceptionConfig& cfg);

/// True when the straight segment a->b crosses no wall or closed-door cell.
/// The cells containing a and b are not tested.
bool line_of_sight(const OccupancyGrid& grid, Vec2 a, Vec2 b);

}  // namespace saynav
