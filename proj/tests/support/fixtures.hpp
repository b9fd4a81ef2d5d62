#pragma once

// Small hand-built houses and episodes for unit tests.

#include <stdexcept>
#include <string>
#include <vector>

#include "saynav/agent/episode.hpp"
#include "saynav/core/knowledge_base.hpp"
#include "saynav/house_sim/house.hpp"

namespace fixture {

using namespace saynav;

/// First traversable interior cell of room 0. Room centres may hold furniture.
inline Cell first_free_cell(const House& h) {
  const CellRect r = h.rooms().front().interior;
  for (int y = r.y0; y <= r.y1; ++y) {
    for (int x = r.x0; x <= r.x1; ++x) {
      if (h.grid().traversable({x, y})) return {x, y};
    }
  }
  throw std::logic_error("room 0 has no free cell");
}

/// Room interiors are `rw` x `rh` cells. Room 0 spans x in [1, rw], room 1
/// (when present) x in [rw + 2, 2 rw + 1]; the shared wall holds door 0 at
/// mid height. Door char: 'D' open, 'X' closed.
inline OccupancyGrid rooms_grid(int rooms, int rw, int rh, char door = 'D') {
  const int w = rooms * (rw + 1) + 1;
  const int h = rh + 2;
  std::vector<std::string> rows(static_cast<std::size_t>(h), std::string(static_cast<std::size_t>(w), '#'));
  for (int y = 1; y <= rh; ++y) {
    for (int r = 0; r < rooms; ++r) {
      for (int x = 0; x < rw; ++x) rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(1 + r * (rw + 1) + x)] = '.';
    }
  }
  if (rooms == 2) rows[static_cast<std::size_t>(1 + rh / 2)][static_cast<std::size_t>(rw + 1)] = door;
  return OccupancyGrid::from_ascii(rows);
}

inline ObjectInstance object(int id, const std::string& category, Vec2 p, int room) {
  const auto* info = KnowledgeBase::builtin().find(category);
  return {id, category, {p.x, p.y, info ? info->z : 0.0}, info ? info->max_dimension : 0.3, room};
}

inline House two_rooms(std::vector<ObjectInstance> objects, char door = 'D', int rw = 16, int rh = 12) {
  std::vector<Room> rooms{{0, {1, 1, rw, rh}, "bedroom"}, {1, {rw + 2, 1, 2 * rw + 1, rh}, "kitchen"}};
  std::vector<Door> doors{{0, {rw + 1, 1 + rh / 2}, 0, 1, door == 'D'}};
  return House(42, rooms_grid(2, rw, rh, door), rooms, doors, std::move(objects));
}

inline House one_room(std::vector<ObjectInstance> objects, int rw = 16, int rh = 12) {
  std::vector<Room> rooms{{0, {1, 1, rw, rh}, "bedroom"}};
  return House(7, rooms_grid(1, rw, rh), rooms, {}, std::move(objects));
}

/// Episode over a hand-built house. Shortest order and length are left for
/// the caller; metrics tests fill them in.
inline Episode episode_for(const House& house, const std::vector<std::string>& targets, Vec2 start) {
  Episode ep;
  ep.house_idx = 0;
  ep.num_rooms = static_cast<int>(house.rooms().size());
  ep.start_position = start;
  for (const auto& t : targets) {
    for (const auto& o : house.objects()) {
      if (o.category == t) {
        ep.targets.push_back({t, o.position});
        break;
      }
    }
  }
  ep.num_targets = static_cast<int>(ep.targets.size());
  ep.shortest_path_targets_order = targets;
  ep.shortest_path_length = 1.0;
  ep.house_spec.rng_seed = house.seed();
  ep.house_spec.num_rooms = ep.num_rooms;
  return ep;
}

}  // namespace fixture
