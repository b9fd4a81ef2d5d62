#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "saynav/core/rng.hpp"
#include "saynav/house_sim/simulator.hpp"

namespace saynav {
namespace {

constexpr double kPi = std::numbers::pi;

// Walks the grid cells crossed by segment a->b (Amanatides-Woo). `visit`
// receives each cell after the start cell together with the parametric
// distance at which the segment enters it; returning false stops the walk.
// When the segment passes exactly through a corner both side cells are
// visited.
template <class Visit>
void walk_cells(Vec2 a, Vec2 b, Visit&& visit) {
  Cell c = cell_of(a);
  const Cell end = cell_of(b);
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const int sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const double inf = std::numeric_limits<double>::infinity();
  const double len = std::hypot(dx, dy);

  double tmax_x = inf;
  double tmax_y = inf;
  double tdelta_x = inf;
  double tdelta_y = inf;
  if (sx != 0) {
    double boundary = (sx > 0 ? c.x + 1 : c.x) * kCellSize;
    tmax_x = (boundary - a.x) / dx;
    tdelta_x = kCellSize / std::abs(dx);
  }
  if (sy != 0) {
    double boundary = (sy > 0 ? c.y + 1 : c.y) * kCellSize;
    tmax_y = (boundary - a.y) / dy;
    tdelta_y = kCellSize / std::abs(dy);
  }

  while (c != end) {
    double t;
    if (tmax_x < tmax_y - 1e-12) {
      t = tmax_x;
      c.x += sx;
      tmax_x += tdelta_x;
    } else if (tmax_y < tmax_x - 1e-12) {
      t = tmax_y;
      c.y += sy;
      tmax_y += tdelta_y;
    } else {
      t = tmax_x;
      if (t > 1.0) break;
      if (!visit(Cell{c.x + sx, c.y}, t * len)) return;
      if (!visit(Cell{c.x, c.y + sy}, t * len)) return;
      c.x += sx;
      c.y += sy;
      tmax_x += tdelta_x;
      tmax_y += tdelta_y;
    }
    if (t > 1.0 + 1e-12) break;
    if (!visit(c, t * len)) return;
  }
}

double truncated_normal(Rng& rng, double sigma) {
  if (sigma <= 0) return 0.0;
  std::normal_distribution<double> n(0.0, sigma);
  while (true) {
    double v = n(rng);
    if (std::abs(v) <= 3.0 * sigma) return v;
  }
}

Vec3 noisy(Vec3 p, const PerceptionConfig& cfg, const AgentState& pose, EntityKind kind,
           int id) {
  if (cfg.gt_mode || cfg.position_noise_sigma <= 0) return p;
  Rng rng = make_rng(cfg.noise_seed,
                     {static_cast<std::uint64_t>(pose.step_count),
                      static_cast<std::uint64_t>(pose.cell.x),
                      static_cast<std::uint64_t>(pose.cell.y),
                      static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(id)});
  double sx = truncated_normal(rng, cfg.position_noise_sigma);
  double sy = truncated_normal(rng, cfg.position_noise_sigma);
  double sz = truncated_normal(rng, cfg.position_noise_sigma);
  return {p.x + sx, p.y + sy, p.z + sz};
}

// Capture index whose field of view contains the bearing, or -1.
int capture_for(double bearing, const AgentState& pose, double fov_degrees) {
  const double heading = heading_degrees(pose.heading) * kPi / 180.0;
  const double half = std::min(fov_degrees, 360.0) * kPi / 360.0;
  for (int k = 0; k < 4; ++k) {
    double rel = std::remainder(bearing - heading - k * kPi / 2.0, 2.0 * kPi);
    if (std::abs(rel) <= half + 1e-9) return k;
  }
  return -1;
}

}  // namespace

bool line_of_sight(const OccupancyGrid& grid, Vec2 a, Vec2 b) {
  const Cell target = cell_of(b);
  bool clear = true;
  walk_cells(a, b, [&](Cell c, double) {
    if (c == target) return false;
    if (grid.blocks_sight(c)) {
      clear = false;
      return false;
    }
    return true;
  });
  return clear;
}

Observation look_around(const House& house, AgentState& state, const PerceptionConfig& cfg) {
  Observation obs;
  obs.pose = state;
  const Vec2 eye = state.position();
  const auto& grid = house.grid();

  auto bearing_to = [&](Vec2 p) { return std::atan2(p.y - eye.y, p.x - eye.x); };

  if (cfg.gt_mode) {
    std::optional<int> room = house.room_at(state.cell);
    if (!room) {
      // Standing in a doorway: take the room being faced.
      Cell d = step_of(state.heading);
      room = house.room_at({state.cell.x + d.x, state.cell.y + d.y});
      if (!room) {
        for (const auto& door : house.doors()) {
          if (door.cell == state.cell) room = std::min(door.room_a, door.room_b);
        }
      }
    }
    obs.gt_room = room;
    if (room) {
      const Rect b = house.room(*room).bounds();
      int corner = 0;
      for (Vec2 p : {Vec2{b.min_x, b.min_y}, Vec2{b.max_x, b.min_y}, Vec2{b.max_x, b.max_y},
                     Vec2{b.min_x, b.max_y}}) {
        int cap = capture_for(bearing_to(p), state, 360.0);
        obs.percepts.push_back({EntityKind::Wall, "wall", {p.x, p.y, 0.0}, 0.0, std::nullopt,
                                cap, -(++corner)});
      }
      for (const auto& door : house.doors()) {
        if (door.room_a != *room && door.room_b != *room) continue;
        Vec2 p = door.position();
        obs.percepts.push_back({EntityKind::Door, "door", {p.x, p.y, 0.0}, kDoorWidth, door.open,
                                capture_for(bearing_to(p), state, 360.0), door.id});
      }
      for (const auto& o : house.objects()) {
        if (o.room_id != *room) continue;
        obs.percepts.push_back({EntityKind::Object, o.category, o.position, o.max_dimension,
                                std::nullopt, capture_for(bearing_to(o.position.xy()), state, 360.0),
                                o.id});
      }
    }
  } else {
    // Wall surfaces of the enclosing room: rays stop at the first opaque
    // cell and stop contributing once they pass through a doorway.
    const int rays = std::max(1, static_cast<int>(std::lround(360.0 * cfg.wall_rays_per_degree)));
    std::set<std::size_t> seen_walls;
    for (int i = 0; i < rays; ++i) {
      const double theta = 2.0 * kPi * i / rays;
      const int cap = capture_for(theta, state, cfg.fov_degrees);
      if (cap < 0) continue;
      const Vec2 end{eye.x + cfg.max_range * std::cos(theta), eye.y + cfg.max_range * std::sin(theta)};
      walk_cells(eye, end, [&](Cell c, double dist) {
        CellType t = grid.at(c);
        if (t == CellType::Door) return false;
        if (t == CellType::ClosedDoor) return false;
        if (t == CellType::Wall) {
          if (grid.in_bounds(c) && seen_walls.insert(grid.index(c)).second) {
            Vec2 hit{eye.x + dist * std::cos(theta), eye.y + dist * std::sin(theta)};
            int id = static_cast<int>(grid.in_bounds(c) ? grid.index(c) : 0);
            Vec3 p = noisy({hit.x, hit.y, 0.0}, cfg, state, EntityKind::Wall, id);
            obs.percepts.push_back({EntityKind::Wall, "wall", p, kCellSize, std::nullopt, cap, -1 - id});
          }
          return false;
        }
        return true;
      });
    }

    auto visible = [&](Vec2 p, double size) -> int {
      const double dist = distance(eye, p);
      if (dist > cfg.max_range) return -1;
      if (dist > 1e-9 && size / dist < cfg.min_angular_size) return -1;
      int cap = dist > 1e-9 ? capture_for(bearing_to(p), state, cfg.fov_degrees) : 0;
      if (cap < 0) return -1;
      if (!line_of_sight(grid, eye, p)) return -1;
      return cap;
    };

    // A doorway is one cell in the wall row, so oblique rays to its centre
    // often clip the neighbouring wall cell. Any inset corner will do.
    for (const auto& door : house.doors()) {
      Vec2 p = door.position();
      int cap = visible(p, kDoorWidth);
      constexpr double kInset = 0.45 * kCellSize;
      for (Vec2 off : {Vec2{-kInset, -kInset}, Vec2{kInset, -kInset}, Vec2{-kInset, kInset}, Vec2{kInset, kInset}}) {
        if (cap >= 0) break;
        if (visible({p.x + off.x, p.y + off.y}, kDoorWidth) >= 0) cap = capture_for(bearing_to(p), state, cfg.fov_degrees);
      }
      if (cap < 0) continue;
      Vec3 est = noisy({p.x, p.y, 0.0}, cfg, state, EntityKind::Door, door.id);
      obs.percepts.push_back({EntityKind::Door, "door", est, kDoorWidth, door.open, cap, door.id});
    }
    for (const auto& o : house.objects()) {
      int cap = visible(o.position.xy(), o.max_dimension);
      if (cap < 0) continue;
      Vec3 est = noisy(o.position, cfg, state, EntityKind::Object, o.id);
      obs.percepts.push_back({EntityKind::Object, o.category, est, o.max_dimension, std::nullopt, cap, o.id});
    }
  }

  // Stable order: by capture, then distance, then kind and truth id.
  std::stable_sort(obs.percepts.begin(), obs.percepts.end(), [&](const Percept& a, const Percept& b) {
    if (a.capture != b.capture) return a.capture < b.capture;
    double da = distance(eye, a.position.xy());
    double db = distance(eye, b.position.xy());
    if (da != db) return da < db;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.truth_id < b.truth_id;
  });

  state.step_count += kLookAroundCost;
  return obs;
}

}  // namespace saynav
