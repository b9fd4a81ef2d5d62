#include "saynav/low_planner/astar.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <queue>
#include <tuple>

namespace saynav {

std::optional<GridPath> astar_path(const OccupancyGrid& grid, Cell from, Cell to) {
  if (!grid.traversable(from) || !grid.traversable(to)) return std::nullopt;
  if (from == to) return GridPath{{from}};

  const auto heuristic = [&](Cell c) { return std::abs(c.x - to.x) + std::abs(c.y - to.y); };
  constexpr int kUnseen = std::numeric_limits<int>::max();
  std::vector<int> g(grid.size(), kUnseen);
  std::vector<std::size_t> parent(grid.size(), std::numeric_limits<std::size_t>::max());
  std::vector<char> closed(grid.size(), 0);

  // (f, cell index); std::greater makes this a min-heap.
  using Entry = std::pair<int, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const std::size_t start = grid.index(from);
  const std::size_t goal = grid.index(to);
  g[start] = 0;
  open.push({heuristic(from), start});

  while (!open.empty()) {
    auto [f, idx] = open.top();
    open.pop();
    if (closed[idx]) continue;
    closed[idx] = 1;
    if (idx == goal) break;
    const Cell c = grid.cell_at(idx);
    for (Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
      Cell n{c.x + d.x, c.y + d.y};
      if (!grid.in_bounds(n) || !grid.traversable(n)) continue;
      std::size_t ni = grid.index(n);
      if (closed[ni]) continue;
      int ng = g[idx] + 1;
      if (ng < g[ni] || (ng == g[ni] && idx < parent[ni])) {
        g[ni] = ng;
        parent[ni] = idx;
        open.push({ng + heuristic(n), ni});
      }
    }
  }
  if (!closed[goal]) return std::nullopt;

  GridPath path;
  for (std::size_t i = goal; i != start; i = parent[i]) path.cells.push_back(grid.cell_at(i));
  path.cells.push_back(from);
  std::reverse(path.cells.begin(), path.cells.end());
  return path;
}

}  // namespace saynav
