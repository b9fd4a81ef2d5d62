#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>

namespace saynav {

/// Grid resolution in meters. One move_forward traverses exactly one cell.
inline constexpr double kCellSize = 0.25;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  double norm() const { return std::hypot(x, y); }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec2 xy() const { return {x, y}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Cell {
  int x = 0;
  int y = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline Vec2 cell_center(Cell c) {
  return {(c.x + 0.5) * kCellSize, (c.y + 0.5) * kCellSize};
}

inline Cell cell_of(Vec2 p) {
  return {static_cast<int>(std::floor(p.x / kCellSize)),
          static_cast<int>(std::floor(p.y / kCellSize))};
}

/// Axis-aligned heading. Degrees are counter-clockwise from +x.
enum class Heading : std::uint8_t { East = 0, North = 1, West = 2, South = 3 };

inline int heading_degrees(Heading h) { return static_cast<int>(h) * 90; }

inline Heading heading_from_degrees(int degrees) {
  int q = ((degrees % 360) + 360) % 360 / 90;
  return static_cast<Heading>(q);
}

inline Heading turned_left(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 1) % 4);
}

inline Heading turned_right(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 3) % 4);
}

inline Cell step_of(Heading h) {
  switch (h) {
    case Heading::East: return {1, 0};
    case Heading::North: return {0, 1};
    case Heading::West: return {-1, 0};
    case Heading::South: return {0, -1};
  }
  return {0, 0};
}

/// Axis-aligned rectangle in meters. An empty rect has min > max.
struct Rect {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  bool empty() const { return min_x > max_x || min_y > max_y; }

  bool contains(Vec2 p, double tol = 0.0) const {
    return !empty() && p.x >= min_x - tol && p.x <= max_x + tol &&
           p.y >= min_y - tol && p.y <= max_y + tol;
  }

  void expand(Vec2 p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }

  void expand(const Rect& r) {
    if (r.empty()) return;
    expand(Vec2{r.min_x, r.min_y});
    expand(Vec2{r.max_x, r.max_y});
  }

  Vec2 center() const { return {(min_x + max_x) / 2, (min_y + max_y) / 2}; }
  double width() const { return empty() ? 0.0 : max_x - min_x; }
  double height() const { return empty() ? 0.0 : max_y - min_y; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

}  // namespace saynav
