#pragma once

#include <optional>
#include <vector>

#include "saynav/core/geometry.hpp"
#include "saynav/house_sim/house.hpp"

namespace saynav {

/// 4-connected cell path including both endpoints.
struct GridPath {
  std::vector<Cell> cells;

  int edges() const { return cells.empty() ? 0 : static_cast<int>(cells.size()) - 1; }
  double length() const { return edges() * kCellSize; }
};

/// Minimum-length 4-connected path over traversable cells, Manhattan
/// heuristic. Equal-priority frontier entries pop lowest cell index first,
/// so the result is deterministic. nullopt when `to` is unreachable.
std::optional<GridPath> astar_path(const OccupancyGrid& grid, Cell from, Cell to);

}  // namespace saynav
