#include "saynav/low_planner/point_nav.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "saynav/core/rng.hpp"

namespace saynav {
namespace {

Heading heading_between(Cell a, Cell b) {
  if (b.x > a.x) return Heading::East;
  if (b.x < a.x) return Heading::West;
  if (b.y > a.y) return Heading::North;
  return Heading::South;
}

// Runs actions through the simulator, stopping at max_steps.
void execute(const House& house, const std::vector<Action>& actions, int max_steps,
             NavResult& out) {
  AgentState s = out.terminal;
  const double start_len = s.path_length;
  for (Action a : actions) {
    if (out.steps_taken >= max_steps) break;
    s = step(house, s, a).state;
    out.actions.push_back(a);
    out.trajectory.push_back(s.cell);
    ++out.steps_taken;
  }
  out.terminal = s;
  out.path_length = s.path_length - start_len;
}

bool within(const AgentState& s, const PointGoal& goal) {
  return distance(s.position(), goal.target) <= goal.success_radius + 1e-9;
}

}  // namespace

std::optional<Cell> resolve_goal_cell(const OccupancyGrid& grid, Cell from, Vec2 target) {
  Cell t = cell_of(target);
  auto reach = reachable_cells(grid, from);
  if (reach.empty()) return std::nullopt;
  if (std::binary_search(reach.begin(), reach.end(), t)) return t;
  std::optional<Cell> best;
  double best_d = 0;
  std::size_t best_i = 0;
  for (Cell c : reach) {
    double d = distance(cell_center(c), target);
    std::size_t i = grid.index(c);
    if (!best || d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && i < best_i)) {
      best = c;
      best_d = d;
      best_i = i;
    }
  }
  return best;
}

std::vector<Action> path_to_actions(Heading heading, const std::vector<Cell>& path) {
  std::vector<Action> actions;
  for (std::size_t i = 1; i < path.size(); ++i) {
    Heading want = heading_between(path[i - 1], path[i]);
    int diff = (static_cast<int>(want) - static_cast<int>(heading) + 4) % 4;
    if (diff == 1) {
      actions.push_back(Action::TurnLeft);
    } else if (diff == 3) {
      actions.push_back(Action::TurnRight);
    } else if (diff == 2) {
      actions.push_back(Action::TurnLeft);
      actions.push_back(Action::TurnLeft);
    }
    heading = want;
    actions.push_back(Action::MoveForward);
  }
  return actions;
}

NavResult navigate_ornav(const House& house, const AgentState& start, const PointGoal& goal) {
  NavResult r;
  r.terminal = start;
  if (within(start, goal)) {
    r.success = true;
    return r;
  }
  auto cell = resolve_goal_cell(house.grid(), start.cell, goal.target);
  auto path = cell ? astar_path(house.grid(), start.cell, *cell) : std::nullopt;
  if (!path) {
    r.no_path = true;
    return r;
  }
  r.optimal_length = path->length();
  execute(house, path_to_actions(start.heading, path->cells), goal.max_steps, r);
  r.success = within(r.terminal, goal);
  return r;
}

void SurrogateParams::validate() const {
  for (double v : {sr_same_room, spl_same_room, sr_global, spl_global}) {
    if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("surrogate rates must lie in (0,1]");
  }
  if (spl_same_room > sr_same_room || spl_global > sr_global) {
    throw std::invalid_argument("surrogate SPL cannot exceed its success rate");
  }
}

PNavSurrogate::PNavSurrogate(SurrogateParams params) : params_(params) { params_.validate(); }

NavResult PNavSurrogate::navigate(const House& house, const AgentState& start,
                                  const PointGoal& goal) {
  Rng rng = make_rng(params_.rng_seed, {invocations_++});
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  NavResult r;
  r.terminal = start;
  if (within(start, goal)) {
    r.success = true;
    return r;
  }
  auto cell = resolve_goal_cell(house.grid(), start.cell, goal.target);
  auto path = cell ? astar_path(house.grid(), start.cell, *cell) : std::nullopt;
  if (!path) {
    r.no_path = true;
    return r;
  }
  r.optimal_length = path->length();

  auto start_room = house.room_at(start.cell);
  auto goal_room = house.room_at(*cell);
  const bool same_room = start_room && goal_room && *start_room == *goal_room;
  const double sr = same_room ? params_.sr_same_room : params_.sr_global;
  const double spl = same_room ? params_.spl_same_room : params_.spl_global;

  if (unit(rng) >= sr) {
    // Failed sub-task: wander, then give up.
    const int n = std::uniform_int_distribution<int>(20, 100)(rng);
    std::vector<Action> walk;
    for (int i = 0; i < n; ++i) {
      double u = unit(rng);
      walk.push_back(u < 0.5 ? Action::MoveForward : (u < 0.75 ? Action::TurnLeft : Action::TurnRight));
    }
    execute(house, walk, goal.max_steps, r);
    r.success = false;
    return r;
  }

  // Successful sub-task: pad the optimal path with back-and-forth detours so
  // that E[optimal / actual] equals spl / sr. Each detour adds two cells; the
  // count is randomized between its two nearest integers to hit the ratio
  // exactly in expectation.
  const int l = path->edges();
  int detours = 0;
  if (l > 0) {
    const double ratio = std::min(1.0, spl / sr);
    const double wanted = (l / ratio - l) / 2.0;
    const int lo = static_cast<int>(std::floor(wanted));
    const int hi = lo + 1;
    const double r_lo = static_cast<double>(l) / (l + 2.0 * lo);
    const double r_hi = static_cast<double>(l) / (l + 2.0 * hi);
    const double q = r_lo == r_hi ? 1.0 : std::clamp((ratio - r_hi) / (r_lo - r_hi), 0.0, 1.0);
    detours = unit(rng) < q ? lo : hi;
  }
  std::vector<int> at;
  for (int k = 0; k < detours; ++k) at.push_back(std::uniform_int_distribution<int>(1, l)(rng));
  std::sort(at.begin(), at.end());

  std::vector<Cell> cells{path->cells.front()};
  std::size_t next = 0;
  for (int i = 1; i <= l; ++i) {
    cells.push_back(path->cells[static_cast<std::size_t>(i)]);
    while (next < at.size() && at[next] == i) {
      cells.push_back(path->cells[static_cast<std::size_t>(i - 1)]);
      cells.push_back(path->cells[static_cast<std::size_t>(i)]);
      ++next;
    }
  }
  const auto actions = path_to_actions(start.heading, cells);
  execute(house, actions, goal.max_steps, r);
  r.success = within(r.terminal, goal);
  return r;
}

std::string_view to_string(LowLevelKind k) {
  return k == LowLevelKind::OrNav ? "ornav" : "pnavs";
}

LowLevelPlanner::LowLevelPlanner(LowLevelKind kind, SurrogateParams p) : kind_(kind) {
  if (kind == LowLevelKind::PNavS) surrogate_.emplace(p);
}

NavResult LowLevelPlanner::navigate(const House& house, const AgentState& start,
                                    const PointGoal& goal) {
  if (surrogate_) return surrogate_->navigate(house, start, goal);
  return navigate_ornav(house, start, goal);
}

}  // namespace saynav
