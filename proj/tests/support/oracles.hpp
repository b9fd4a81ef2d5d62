#pragma once

// Reference implementations used as test oracles. Deliberately naive and
// independent of the library's own algorithms.

#include <algorithm>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "saynav/core/geometry.hpp"
#include "saynav/house_sim/house.hpp"

namespace oracle {

using saynav::Cell;
using saynav::OccupancyGrid;

inline bool passable(const OccupancyGrid& g, Cell c) {
  if (!g.in_bounds(c)) return false;
  auto t = g.at(c);
  return t == saynav::CellType::Free || t == saynav::CellType::Door;
}

/// Breadth-first distances in edges from `from`; -1 where unreachable.
inline std::vector<int> bfs_distances(const OccupancyGrid& g, Cell from) {
  std::vector<int> dist(g.size(), -1);
  if (!passable(g, from)) return dist;
  std::deque<Cell> q{from};
  dist[g.index(from)] = 0;
  const int dx[] = {1, -1, 0, 0};
  const int dy[] = {0, 0, 1, -1};
  while (!q.empty()) {
    Cell c = q.front();
    q.pop_front();
    for (int k = 0; k < 4; ++k) {
      Cell n{c.x + dx[k], c.y + dy[k]};
      if (!passable(g, n) || dist[g.index(n)] >= 0) continue;
      dist[g.index(n)] = dist[g.index(c)] + 1;
      q.push_back(n);
    }
  }
  return dist;
}

inline std::optional<int> bfs_edges(const OccupancyGrid& g, Cell from, Cell to) {
  auto d = bfs_distances(g, from);
  if (!g.in_bounds(to) || d[g.index(to)] < 0) return std::nullopt;
  return d[g.index(to)];
}

inline std::vector<Cell> bfs_reachable(const OccupancyGrid& g, Cell from) {
  auto d = bfs_distances(g, from);
  std::vector<Cell> out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] >= 0) out.push_back(g.cell_at(i));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Discordant pairs by brute force over all index pairs.
inline int discordant_pairs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  auto pos = [&](const std::string& s) {
    return static_cast<int>(std::find(b.begin(), b.end(), s) - b.begin());
  };
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (pos(a[i]) > pos(a[j])) ++d;
    }
  }
  return d;
}

/// Random grid with the given wall density.
inline OccupancyGrid random_grid(std::mt19937_64& rng, int w, int h, double wall_p) {
  OccupancyGrid g(w, h);
  std::bernoulli_distribution wall(wall_p);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (wall(rng)) g.set({x, y}, saynav::CellType::Wall);
    }
  }
  return g;
}

}  // namespace oracle
