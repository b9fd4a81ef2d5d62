#include "saynav/house_sim/house.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace saynav {

OccupancyGrid::OccupancyGrid(int width, int height, CellType fill)
    : width_(width), height_(height),
      cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("grid dimensions must be positive");
}

OccupancyGrid OccupancyGrid::from_ascii(const std::vector<std::string>& rows) {
  if (rows.empty() || rows.front().empty()) throw std::invalid_argument("empty grid");
  OccupancyGrid g(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  for (int y = 0; y < g.height_; ++y) {
    const auto& row = rows[static_cast<std::size_t>(y)];
    if (static_cast<int>(row.size()) != g.width_) throw std::invalid_argument("ragged grid rows");
    for (int x = 0; x < g.width_; ++x) {
      CellType t;
      switch (row[static_cast<std::size_t>(x)]) {
        case '.': t = CellType::Free; break;
        case '#': t = CellType::Wall; break;
        case 'D': t = CellType::Door; break;
        case 'X': t = CellType::ClosedDoor; break;
        case 'F': t = CellType::Furniture; break;
        default: throw std::invalid_argument(std::string("bad grid char '") + row[x] + "'");
      }
      g.set({x, y}, t);
    }
  }
  return g;
}

House::House(std::uint64_t seed, OccupancyGrid grid, std::vector<Room> rooms,
             std::vector<Door> doors, std::vector<ObjectInstance> objects)
    : seed_(seed), grid_(std::move(grid)), rooms_(std::move(rooms)),
      doors_(std::move(doors)), objects_(std::move(objects)) {
  index();
}

void House::index() {
  room_map_.assign(grid_.size(), -1);
  door_map_.assign(grid_.size(), -1);
  for (std::size_t i = 0; i < rooms_.size(); ++i) {
    const auto& r = rooms_[i].interior;
    for (int y = r.y0; y <= r.y1; ++y) {
      for (int x = r.x0; x <= r.x1; ++x) {
        if (grid_.in_bounds({x, y})) room_map_[grid_.index({x, y})] = static_cast<int>(i);
      }
    }
  }
  for (std::size_t i = 0; i < doors_.size(); ++i) {
    if (grid_.in_bounds(doors_[i].cell)) door_map_[grid_.index(doors_[i].cell)] = static_cast<int>(i);
  }
}

const Room& House::room(int id) const {
  for (const auto& r : rooms_) {
    if (r.id == id) return r;
  }
  throw std::out_of_range("no room " + std::to_string(id));
}

const Door* House::door_at(Cell c) const {
  if (!grid_.in_bounds(c)) return nullptr;
  int i = door_map_[grid_.index(c)];
  return i < 0 ? nullptr : &doors_[static_cast<std::size_t>(i)];
}

std::optional<int> House::room_at(Cell c) const {
  if (!grid_.in_bounds(c)) return std::nullopt;
  int i = room_map_[grid_.index(c)];
  if (i < 0) return std::nullopt;
  return rooms_[static_cast<std::size_t>(i)].id;
}

std::vector<Cell> reachable_cells(const OccupancyGrid& grid, Cell from) {
  std::vector<Cell> out;
  if (!grid.traversable(from)) return out;
  std::vector<char> seen(grid.size(), 0);
  std::deque<Cell> queue{from};
  seen[grid.index(from)] = 1;
  while (!queue.empty()) {
    Cell c = queue.front();
    queue.pop_front();
    out.push_back(c);
    for (Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
      Cell n{c.x + d.x, c.y + d.y};
      if (!grid.in_bounds(n) || !grid.traversable(n)) continue;
      auto& s = seen[grid.index(n)];
      if (s) continue;
      s = 1;
      queue.push_back(n);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Cell> reachable_cells(const House& house, Cell from) {
  return reachable_cells(house.grid(), from);
}

namespace {

[[noreturn]] void violation(const std::string& what) {
  throw std::logic_error("house invariant violated: " + what);
}

bool overlaps(const CellRect& a, const CellRect& b) {
  return a.x0 <= b.x1 && b.x0 <= a.x1 && a.y0 <= b.y1 && b.y0 <= a.y1;
}

}  // namespace

void validate_house(const House& house) {
  const auto& rooms = house.rooms();
  const auto& grid = house.grid();
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    for (std::size_t j = i + 1; j < rooms.size(); ++j) {
      if (overlaps(rooms[i].interior, rooms[j].interior)) {
        violation("rooms " + std::to_string(rooms[i].id) + " and " +
                  std::to_string(rooms[j].id) + " overlap");
      }
    }
  }
  for (const auto& o : house.objects()) {
    if (!house.room(o.room_id).bounds().contains(o.position.xy())) {
      violation("object " + std::to_string(o.id) + " outside its room");
    }
  }
  for (const auto& d : house.doors()) {
    CellType t = grid.at(d.cell);
    if (t != (d.open ? CellType::Door : CellType::ClosedDoor)) {
      violation("door " + std::to_string(d.id) + " cell type mismatch");
    }
    // A door sits in a one-cell wall with the two rooms on opposite sides.
    bool ok = false;
    for (auto [dx, dy] : {std::pair{1, 0}, std::pair{0, 1}}) {
      auto ra = house.room_at({d.cell.x - dx, d.cell.y - dy});
      auto rb = house.room_at({d.cell.x + dx, d.cell.y + dy});
      if (ra && rb &&
          ((*ra == d.room_a && *rb == d.room_b) || (*ra == d.room_b && *rb == d.room_a))) {
        ok = true;
      }
    }
    if (!ok) violation("door " + std::to_string(d.id) + " not on a shared wall");
  }
  if (!rooms.empty()) {
    const auto& r0 = rooms.front().interior;
    std::optional<Cell> start;
    for (int y = r0.y0; y <= r0.y1 && !start; ++y) {
      for (int x = r0.x0; x <= r0.x1 && !start; ++x) {
        if (grid.traversable({x, y})) start = Cell{x, y};
      }
    }
    if (!start) violation("room has no free cell");
    auto reach = reachable_cells(grid, *start);
    for (const auto& r : rooms) {
      for (int y = r.interior.y0; y <= r.interior.y1; ++y) {
        for (int x = r.interior.x0; x <= r.interior.x1; ++x) {
          if (grid.traversable({x, y}) &&
              !std::binary_search(reach.begin(), reach.end(), Cell{x, y})) {
            violation("room " + std::to_string(r.id) + " not fully reachable through open doors");
          }
        }
      }
    }
  }
}

}  // namespace saynav
