#include "saynav/house_sim/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "saynav/core/rng.hpp"

namespace saynav {
namespace {

// Wall-inclusive box of one room: x0/x1 and y0/y1 are wall lines.
struct Leaf {
  int x0, y0, x1, y1;
  CellRect interior() const { return {x0 + 1, y0 + 1, x1 - 1, y1 - 1}; }
  int area() const { return (x1 - x0 - 1) * (y1 - y0 - 1); }
};

struct DoorSlot {
  int a, b;
  std::vector<Cell> cells;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool bernoulli(Rng& rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

// Index drawn proportionally to weights; -1 when every weight is zero.
int weighted_pick(Rng& rng, const std::vector<double>& w) {
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total <= 0) return -1;
  double u = uniform(rng, 0.0, total);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (u < w[i]) return static_cast<int>(i);
    u -= w[i];
  }
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] > 0) return static_cast<int>(i);
  }
  return -1;
}

std::optional<std::vector<Leaf>> try_split_floor(const HouseSpec& spec, Rng& rng) {
  const int min_side = static_cast<int>(std::ceil(spec.min_room_side / kCellSize - 1e-9));
  const double cells_per_m2 = 1.0 / (kCellSize * kCellSize);
  const double total = spec.num_rooms * spec.area_per_room * cells_per_m2;
  const double aspect = uniform(rng, 0.8, 1.25);
  const int inner_w = std::max(1, static_cast<int>(std::lround(std::sqrt(total * aspect))));
  const int inner_h = std::max(1, static_cast<int>(std::lround(total / inner_w)));
  if (inner_w < min_side || inner_h < min_side) {
    throw GenerationError("house area too small for a single room");
  }

  std::vector<Leaf> leaves{{0, 0, inner_w + 1, inner_h + 1}};
  while (static_cast<int>(leaves.size()) < spec.num_rooms) {
    std::vector<std::size_t> order(leaves.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return leaves[a].area() > leaves[b].area();
    });
    bool split = false;
    for (std::size_t idx : order) {
      Leaf leaf = leaves[idx];
      const int iw = leaf.x1 - leaf.x0 - 1;
      const int ih = leaf.y1 - leaf.y0 - 1;
      // Try the longer axis first.
      for (bool vertical : iw >= ih ? std::vector<bool>{true, false} : std::vector<bool>{false, true}) {
        const int lo = (vertical ? leaf.x0 : leaf.y0) + min_side + 1;
        const int hi = (vertical ? leaf.x1 : leaf.y1) - min_side - 1;
        if (lo > hi) continue;
        const int s = lo + static_cast<int>(std::lround((hi - lo) * uniform(rng, 0.25, 0.75)));
        Leaf first = leaf;
        Leaf second = leaf;
        if (vertical) {
          first.x1 = s;
          second.x0 = s;
        } else {
          first.y1 = s;
          second.y0 = s;
        }
        leaves[idx] = first;
        leaves.push_back(second);
        split = true;
        break;
      }
      if (split) break;
    }
    if (!split) return std::nullopt;
  }
  return leaves;
}

// A bad early cut can leave slivers too thin to split again; draw a fresh
// tiling from the same stream. Seeds that tile first time are unaffected.
std::vector<Leaf> split_floor(const HouseSpec& spec, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    if (auto leaves = try_split_floor(spec, rng)) return *leaves;
  }
  throw GenerationError("rooms cannot tile the requested area");
}

std::vector<DoorSlot> door_slots(const std::vector<Leaf>& leaves) {
  std::vector<DoorSlot> slots;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    for (std::size_t j = i + 1; j < leaves.size(); ++j) {
      const Leaf& a = leaves[i];
      const Leaf& b = leaves[j];
      DoorSlot slot{static_cast<int>(i), static_cast<int>(j), {}};
      if (a.x1 == b.x0 || b.x1 == a.x0) {
        int wall = a.x1 == b.x0 ? a.x1 : a.x0;
        int lo = std::max(a.y0, b.y0) + 1;
        int hi = std::min(a.y1, b.y1) - 1;
        for (int y = lo + 1; y <= hi - 1; ++y) slot.cells.push_back({wall, y});
      } else if (a.y1 == b.y0 || b.y1 == a.y0) {
        int wall = a.y1 == b.y0 ? a.y1 : a.y0;
        int lo = std::max(a.x0, b.x0) + 1;
        int hi = std::min(a.x1, b.x1) - 1;
        for (int x = lo + 1; x <= hi - 1; ++x) slot.cells.push_back({x, wall});
      }
      if (!slot.cells.empty()) slots.push_back(std::move(slot));
    }
  }
  return slots;
}

std::vector<std::string> assign_room_types(const HouseSpec& spec, const KnowledgeBase& kb,
                                           Rng& rng) {
  std::vector<std::string> types;
  for (const auto& [type, count] : spec.room_type_mix) {
    if (!kb.is_room_type(type)) throw GenerationError("unknown room type '" + type + "'");
    if (count < 0) throw GenerationError("negative room count for '" + type + "'");
    for (int k = 0; k < count; ++k) types.push_back(type);
  }
  if (static_cast<int>(types.size()) > spec.num_rooms) {
    throw GenerationError("room type mix exceeds num_rooms");
  }
  for (const char* core : {"kitchen", "living_room", "bedroom", "bathroom"}) {
    if (static_cast<int>(types.size()) >= spec.num_rooms) break;
    if (kb.is_room_type(core) && std::find(types.begin(), types.end(), core) == types.end()) {
      types.emplace_back(core);
    }
  }
  const std::vector<std::pair<std::string, double>> extra{
      {"bedroom", 3.0},     {"bathroom", 2.0}, {"office", 1.5},      {"dining_room", 1.0},
      {"hallway", 0.8},     {"laundry_room", 0.7}, {"living_room", 0.5}, {"kitchen", 0.3}};
  std::vector<double> w;
  for (const auto& e : extra) w.push_back(kb.is_room_type(e.first) ? e.second : 0.0);
  while (static_cast<int>(types.size()) < spec.num_rooms) {
    int pick = weighted_pick(rng, w);
    if (pick < 0) throw GenerationError("no room types available");
    types.push_back(extra[static_cast<std::size_t>(pick)].first);
  }
  std::shuffle(types.begin(), types.end(), rng);
  return types;
}

bool room_connected(const OccupancyGrid& grid, const CellRect& r) {
  std::vector<Cell> free;
  for (int y = r.y0; y <= r.y1; ++y) {
    for (int x = r.x0; x <= r.x1; ++x) {
      if (grid.traversable({x, y})) free.push_back({x, y});
    }
  }
  if (free.empty()) return false;
  std::vector<char> seen(grid.size(), 0);
  std::vector<Cell> stack{free.front()};
  seen[grid.index(free.front())] = 1;
  std::size_t count = 0;
  while (!stack.empty()) {
    Cell c = stack.back();
    stack.pop_back();
    ++count;
    for (Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
      Cell n{c.x + d.x, c.y + d.y};
      if (!r.contains(n) || !grid.traversable(n) || seen[grid.index(n)]) continue;
      seen[grid.index(n)] = 1;
      stack.push_back(n);
    }
  }
  return count == free.size();
}

}  // namespace

House generate_house(const HouseSpec& spec, const KnowledgeBase& kb) {
  if (spec.num_rooms < 1) throw GenerationError("num_rooms must be at least 1");
  if (spec.min_objects_per_room < 0 || spec.max_objects_per_room < spec.min_objects_per_room) {
    throw GenerationError("invalid objects_per_room range");
  }
  if (spec.area_per_room <= 0 || spec.min_room_side <= 0) {
    throw GenerationError("room dimensions must be positive");
  }

  Rng rng(spec.rng_seed);
  const std::vector<Leaf> leaves = split_floor(spec, rng);
  const std::vector<std::string> types = assign_room_types(spec, kb, rng);

  int width = 0;
  int height = 0;
  for (const auto& l : leaves) {
    width = std::max(width, l.x1 + 1);
    height = std::max(height, l.y1 + 1);
  }
  OccupancyGrid grid(width, height, CellType::Free);
  for (const auto& l : leaves) {
    for (int x = l.x0; x <= l.x1; ++x) {
      grid.set({x, l.y0}, CellType::Wall);
      grid.set({x, l.y1}, CellType::Wall);
    }
    for (int y = l.y0; y <= l.y1; ++y) {
      grid.set({l.x0, y}, CellType::Wall);
      grid.set({l.x1, y}, CellType::Wall);
    }
  }

  std::vector<Room> rooms;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    rooms.push_back({static_cast<int>(i), leaves[i].interior(), types[i]});
  }

  // Doors: a random spanning tree over wall-sharing rooms plus some extra
  // loops. Each door opens with the configured probability, then closed
  // doors are reopened until every room is reachable.
  std::vector<DoorSlot> slots = door_slots(leaves);
  std::vector<std::size_t> order(slots.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  UnionFind tree(leaves.size());
  std::vector<std::size_t> chosen;
  for (std::size_t s : order) {
    if (tree.unite(static_cast<std::size_t>(slots[s].a), static_cast<std::size_t>(slots[s].b))) {
      chosen.push_back(s);
    } else if (bernoulli(rng, 0.35)) {
      chosen.push_back(s);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  if (leaves.size() > 1) {
    for (std::size_t i = 1; i < leaves.size(); ++i) {
      if (tree.find(i) != tree.find(0)) throw GenerationError("room layout is disconnected");
    }
  }

  std::vector<Door> doors;
  for (std::size_t s : chosen) {
    const auto& slot = slots[s];
    Cell cell = slot.cells[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<int>(slot.cells.size()) - 1))];
    doors.push_back({static_cast<int>(doors.size()), cell, slot.a, slot.b,
                     bernoulli(rng, spec.door_open_probability)});
  }
  UnionFind open(leaves.size());
  for (const auto& d : doors) {
    if (d.open) open.unite(static_cast<std::size_t>(d.room_a), static_cast<std::size_t>(d.room_b));
  }
  for (auto& d : doors) {
    if (!d.open && open.unite(static_cast<std::size_t>(d.room_a), static_cast<std::size_t>(d.room_b))) {
      d.open = true;
    }
  }
  for (const auto& d : doors) grid.set(d.cell, d.open ? CellType::Door : CellType::ClosedDoor);

  // Cells next to a door stay clear so furniture never blocks a doorway.
  std::vector<char> reserved(grid.size(), 0);
  for (const auto& d : doors) {
    for (int dy = -2; dy <= 2; ++dy) {
      for (int dx = -2; dx <= 2; ++dx) {
        Cell c{d.cell.x + dx, d.cell.y + dy};
        if (grid.in_bounds(c)) reserved[grid.index(c)] = 1;
      }
    }
  }

  std::vector<ObjectInstance> objects;
  auto add_object = [&](const CategoryInfo& info, Vec3 pos, int room_id) {
    double dim = info.max_dimension * uniform(rng, 0.9, 1.1);
    objects.push_back({static_cast<int>(objects.size()), info.name, pos, dim, room_id});
  };

  for (auto& room : rooms) {
    const CellRect& r = room.interior;
    const Rect bounds = r.meters();
    const double area_m2 = bounds.width() * bounds.height();

    std::vector<const CategoryInfo*> wanted;
    const CategoryInfo* best = nullptr;
    double best_prior = 0.0;
    for (const auto& c : kb.categories()) {
      if (c.size_class != SizeClass::Large) continue;
      double p = kb.room_prior(c.name, room.room_type);
      if (p <= 0) continue;
      if (p > best_prior) {
        best_prior = p;
        best = &c;
      }
      if (p >= 1.0 || bernoulli(rng, 0.75 * p)) wanted.push_back(&c);
    }
    if (wanted.empty() && best != nullptr) wanted.push_back(best);
    std::stable_sort(wanted.begin(), wanted.end(), [&](const CategoryInfo* a, const CategoryInfo* b) {
      return kb.room_prior(a->name, room.room_type) > kb.room_prior(b->name, room.room_type);
    });
    const std::size_t cap = static_cast<std::size_t>(std::max(1.0, std::floor(area_m2 / 3.5)));
    if (wanted.size() > cap) wanted.resize(cap);

    struct Placed {
      const CategoryInfo* info;
      Vec3 pos;
    };
    std::vector<Placed> landmarks;
    for (const CategoryInfo* info : wanted) {
      std::vector<Cell> candidates;
      for (int y = r.y0; y <= r.y1; ++y) {
        for (int x = r.x0; x <= r.x1; ++x) {
          Cell c{x, y};
          if (grid.at(c) != CellType::Free || reserved[grid.index(c)]) continue;
          bool crowded = false;
          for (int dy = -1; dy <= 1 && !crowded; ++dy) {
            for (int dx = -1; dx <= 1 && !crowded; ++dx) {
              crowded = grid.at({x + dx, y + dy}) == CellType::Furniture;
            }
          }
          if (!crowded) candidates.push_back(c);
        }
      }
      for (int attempt = 0; attempt < 20 && !candidates.empty(); ++attempt) {
        auto pick = static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<int>(candidates.size()) - 1));
        Cell c = candidates[pick];
        grid.set(c, CellType::Furniture);
        if (room_connected(grid, r)) {
          Vec2 p = cell_center(c);
          add_object(*info, {p.x, p.y, 0.0}, room.id);
          landmarks.push_back({info, {p.x, p.y, info->z}});
          break;
        }
        grid.set(c, CellType::Free);
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
      }
    }

    std::vector<const CategoryInfo*> pool;
    std::vector<double> weights;
    for (const auto& c : kb.categories()) {
      if (c.size_class != SizeClass::Small) continue;
      double p = kb.room_prior(c.name, room.room_type);
      if (p <= 0) continue;
      pool.push_back(&c);
      weights.push_back(p);
    }
    int count = uniform_int(rng, spec.min_objects_per_room, spec.max_objects_per_room);
    for (int k = 0; k < count; ++k) {
      int pick = weighted_pick(rng, weights);
      if (pick < 0) break;
      const CategoryInfo* info = pool[static_cast<std::size_t>(pick)];
      weights[static_cast<std::size_t>(pick)] = 0.0;

      std::vector<double> host_w;
      for (const auto& l : landmarks) host_w.push_back(kb.landmark_prior(info->name, l.info->name));
      int host = weighted_pick(rng, host_w);
      Vec3 pos;
      if (host >= 0) {
        const Vec3& h = landmarks[static_cast<std::size_t>(host)].pos;
        pos = {h.x + uniform(rng, -0.3, 0.3), h.y + uniform(rng, -0.3, 0.3), h.z};
      } else {
        Vec2 c = cell_center({uniform_int(rng, r.x0, r.x1), uniform_int(rng, r.y0, r.y1)});
        pos = {c.x + uniform(rng, -0.1, 0.1), c.y + uniform(rng, -0.1, 0.1), 0.0};
      }
      const double margin = 0.05;
      pos.x = std::clamp(pos.x, bounds.min_x + margin, bounds.max_x - margin);
      pos.y = std::clamp(pos.y, bounds.min_y + margin, bounds.max_y - margin);
      add_object(*info, pos, room.id);
    }
  }

  House house(spec.rng_seed, std::move(grid), std::move(rooms), std::move(doors), std::move(objects));
  validate_house(house);
  return house;
}

}  // namespace saynav
