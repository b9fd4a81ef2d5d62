#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "saynav/core/geometry.hpp"

namespace saynav {

enum class CellType : std::uint8_t {
  Free = 0,
  Wall = 1,
  Door = 2,        // open door
  ClosedDoor = 3,
  Furniture = 4,   // cell occupied by a landmark object
};

class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, CellType fill = CellType::Free);

  /// Parses rows of '.', '#', 'D' (open door), 'X' (closed door), 'F'
  /// (furniture). Row i of the input is y = i.
  static OccupancyGrid from_ascii(const std::vector<std::string>& rows);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return cells_.size(); }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }
  Cell cell_at(std::size_t index) const {
    return {static_cast<int>(index % static_cast<std::size_t>(width_)),
            static_cast<int>(index / static_cast<std::size_t>(width_))};
  }

  CellType at(Cell c) const { return in_bounds(c) ? cells_[index(c)] : CellType::Wall; }
  void set(Cell c, CellType t) { cells_[index(c)] = t; }

  /// Free floor or an open door.
  bool traversable(Cell c) const {
    CellType t = at(c);
    return t == CellType::Free || t == CellType::Door;
  }
  bool blocks_sight(Cell c) const {
    CellType t = at(c);
    return t == CellType::Wall || t == CellType::ClosedDoor;
  }

  const std::vector<CellType>& cells() const { return cells_; }

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<CellType> cells_;
};

/// Inclusive cell rectangle of a room interior.
struct CellRect {
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1;

  bool contains(Cell c) const { return c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1; }
  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
  Rect meters() const {
    return {x0 * kCellSize, y0 * kCellSize, (x1 + 1) * kCellSize, (y1 + 1) * kCellSize};
  }
  friend bool operator==(const CellRect&, const CellRect&) = default;
};

struct Room {
  int id = 0;
  CellRect interior;
  std::string room_type;

  Rect bounds() const { return interior.meters(); }
  friend bool operator==(const Room&, const Room&) = default;
};

struct Door {
  int id = 0;
  Cell cell;
  int room_a = 0;
  int room_b = 0;
  bool open = true;

  Vec2 position() const { return cell_center(cell); }
  friend bool operator==(const Door&, const Door&) = default;
};

/// Nominal door leaf width used for perception size gates.
inline constexpr double kDoorWidth = 0.9;

struct ObjectInstance {
  int id = 0;
  std::string category;
  Vec3 position;
  double max_dimension = 0.0;
  int room_id = 0;

  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

/// Ground-truth world. Immutable once built; call index() after mutating.
class House {
 public:
  House() = default;
  House(std::uint64_t seed, OccupancyGrid grid, std::vector<Room> rooms,
        std::vector<Door> doors, std::vector<ObjectInstance> objects);

  std::uint64_t seed() const { return seed_; }
  const OccupancyGrid& grid() const { return grid_; }
  const std::vector<Room>& rooms() const { return rooms_; }
  const std::vector<Door>& doors() const { return doors_; }
  const std::vector<ObjectInstance>& objects() const { return objects_; }

  const Room& room(int id) const;
  const Door* door_at(Cell c) const;

  /// Room whose interior holds the cell, or nullopt for walls and doors.
  std::optional<int> room_at(Cell c) const;

  /// Rebuilds derived lookup tables.
  void index();

  friend bool operator==(const House& a, const House& b) {
    return a.seed_ == b.seed_ && a.grid_ == b.grid_ && a.rooms_ == b.rooms_ &&
           a.doors_ == b.doors_ && a.objects_ == b.objects_;
  }

 private:
  std::uint64_t seed_ = 0;
  OccupancyGrid grid_;
  std::vector<Room> rooms_;
  std::vector<Door> doors_;
  std::vector<ObjectInstance> objects_;
  std::vector<int> room_map_;
  std::vector<int> door_map_;
};

/// Checks the ground-truth invariants: disjoint room interiors, objects inside
/// their room, doors on a shared wall, open-door connectivity. Throws
/// std::logic_error naming the first violation.
void validate_house(const House& house);

/// Flood fill over free and open-door cells. Result is sorted and holds `from`.
std::vector<Cell> reachable_cells(const House& house, Cell from);
std::vector<Cell> reachable_cells(const OccupancyGrid& grid, Cell from);

}  // namespace saynav
