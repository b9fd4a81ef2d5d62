#include "saynav/scene_graph/scene_graph.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "saynav/core/strings.hpp"

namespace saynav {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fingerprint(const Observation& obs) {
  std::ostringstream ss;
  ss.precision(17);
  ss << obs.pose.cell.x << ',' << obs.pose.cell.y << ',' << static_cast<int>(obs.pose.heading)
     << ',' << obs.pose.step_count << ';';
  if (obs.gt_room) ss << 'g' << *obs.gt_room << ';';
  for (const auto& p : obs.percepts) {
    ss << static_cast<int>(p.kind) << '|' << p.category << '|' << p.position.x << '|'
       << p.position.y << '|' << p.position.z << '|' << p.size << '|'
       << (p.door_open ? (*p.door_open ? 1 : 0) : 2) << ';';
  }
  return fnv1a(ss.str());
}

Vec3 running_average(Vec3 mean, int count, Vec3 sample) {
  const double n = count + 1.0;
  return {mean.x + (sample.x - mean.x) / n, mean.y + (sample.y - mean.y) / n,
          mean.z + (sample.z - mean.z) / n};
}

}  // namespace

SizeClass classify_size(std::string_view category, std::optional<double> max_dimension,
                        const KnowledgeBase& kb) {
  const CategoryInfo* info = kb.find(category);
  if (!max_dimension) {
    if (info == nullptr) {
      throw std::invalid_argument("unknown category '" + std::string(category) +
                                  "' needs a dimension");
    }
    max_dimension = info->max_dimension;
  }
  if (!(*max_dimension > 0)) throw std::invalid_argument("object dimension must be positive");
  if (kb.is_landmark(category) || *max_dimension >= kLargeObjectMinDimension) {
    return SizeClass::Large;
  }
  return SizeClass::Small;
}

std::string node_label(std::string_view category, NodeId id) {
  return id_token(category) + "_" + std::to_string(id);
}
std::string room_label(NodeId id) { return "room_" + std::to_string(id); }
std::string door_label(NodeId id) { return "door_" + std::to_string(id); }

std::optional<NodeId> Subgraph::resolve_target(std::string_view token) const {
  for (const auto& l : large) {
    if (node_label(l.category, l.id) == token) return l.id;
  }
  for (const auto& d : doors) {
    if (door_label(d.id) == token) return d.id;
  }
  return std::nullopt;
}

std::vector<std::string> Subgraph::object_categories() const {
  std::vector<std::string> out;
  for (const auto& l : large) out.push_back(l.category);
  for (const auto& s : small) out.push_back(s.category);
  return out;
}

std::vector<std::string> Subgraph::landmark_categories() const {
  std::vector<std::string> out;
  for (const auto& l : large) out.push_back(l.category);
  return out;
}

std::string subgraph_to_text(const Subgraph& sub) {
  std::ostringstream out;
  out << room_label(sub.room.id) << ": " << sub.room.room_type.value_or(std::string(kUnknownRoomType))
      << '\n';
  if (sub.empty()) out << "no objects observed\n";

  auto large = sub.large;
  std::sort(large.begin(), large.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  auto small = sub.small;
  std::sort(small.begin(), small.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  for (const auto& l : large) {
    out << node_label(l.category, l.id);
    bool first = true;
    for (const auto& s : small) {
      if (s.relation != ParentRelation::Near || s.parent != l.id) continue;
      out << (first ? " (near: " : ", ") << node_label(s.category, s.id);
      first = false;
    }
    if (!first) out << ')';
    out << '\n';
  }
  bool first = true;
  for (const auto& s : small) {
    if (s.relation != ParentRelation::In) continue;
    out << (first ? "loose: " : ", ") << node_label(s.category, s.id);
    first = false;
  }
  if (!first) out << '\n';

  auto doors = sub.doors;
  std::sort(doors.begin(), doors.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& d : doors) {
    out << door_label(d.id) << " (" << (d.open_estimate ? "open" : "closed") << ")\n";
  }
  return out.str();
}

SceneGraph::SceneGraph(SceneGraphConfig cfg, const KnowledgeBase& kb) : cfg_(cfg), kb_(&kb) {}

NodeId SceneGraph::allocate(NodeId requested) {
  if (requested == kAutoId) return next_id_++;
  if (requested <= kHouseNode || rooms_.count(requested) || large_.count(requested) ||
      small_.count(requested) || doors_.count(requested)) {
    throw SceneGraphError("node id " + std::to_string(requested) + " unavailable");
  }
  next_id_ = std::max(next_id_, requested + 1);
  return requested;
}

NodeId SceneGraph::add_room(std::optional<int> gt_room, NodeId id) {
  id = allocate(id);
  RoomNode r;
  r.id = id;
  r.gt_room = gt_room;
  rooms_.emplace(id, std::move(r));
  return id;
}

NodeId SceneGraph::add_large(std::string category, Vec3 pos, NodeId room_id, NodeId id) {
  if (!rooms_.count(room_id)) throw SceneGraphError("large object in unknown room");
  id = allocate(id);
  large_.emplace(id, LargeObjectNode{id, std::move(category), pos, 1, room_id});
  return id;
}

NodeId SceneGraph::add_small(std::string category, Vec3 pos, NodeId parent, ParentRelation rel,
                             NodeId id) {
  if (rel == ParentRelation::Near ? !large_.count(parent) : !rooms_.count(parent)) {
    throw SceneGraphError("small object parent does not exist");
  }
  id = allocate(id);
  small_.emplace(id, SmallObjectNode{id, std::move(category), pos, 1, parent, rel});
  return id;
}

NodeId SceneGraph::add_door(Vec3 pos, NodeId room_a, NodeId room_b, bool open, NodeId id) {
  if (!rooms_.count(room_a)) throw SceneGraphError("door from unknown room");
  if (room_b != kUnexploredRoom && (!rooms_.count(room_b) || room_b == room_a)) {
    throw SceneGraphError("door must join two distinct rooms");
  }
  id = allocate(id);
  DoorEdge d;
  d.id = id;
  d.position = pos;
  d.room_a = room_a;
  d.room_b = room_b;
  d.open_estimate = open;
  d.traversed = room_b != kUnexploredRoom;
  d.observation_count = 1;
  doors_.emplace(id, d);
  rooms_.at(room_a).door_edges.push_back(id);
  if (room_b != kUnexploredRoom) rooms_.at(room_b).door_edges.push_back(id);
  return id;
}

RoomNode& SceneGraph::room(NodeId id) {
  auto it = rooms_.find(id);
  if (it == rooms_.end()) throw SceneGraphError("unknown room " + std::to_string(id));
  return it->second;
}
const RoomNode& SceneGraph::room(NodeId id) const {
  auto it = rooms_.find(id);
  if (it == rooms_.end()) throw SceneGraphError("unknown room " + std::to_string(id));
  return it->second;
}
DoorEdge& SceneGraph::door(NodeId id) {
  auto it = doors_.find(id);
  if (it == doors_.end()) throw SceneGraphError("unknown door " + std::to_string(id));
  return it->second;
}
const DoorEdge& SceneGraph::door(NodeId id) const {
  auto it = doors_.find(id);
  if (it == doors_.end()) throw SceneGraphError("unknown door " + std::to_string(id));
  return it->second;
}
const LargeObjectNode* SceneGraph::large(NodeId id) const {
  auto it = large_.find(id);
  return it == large_.end() ? nullptr : &it->second;
}
const SmallObjectNode* SceneGraph::small(NodeId id) const {
  auto it = small_.find(id);
  return it == small_.end() ? nullptr : &it->second;
}

std::optional<NodeId> SceneGraph::room_containing(Vec2 p, std::optional<NodeId> current,
                                                  double tol) const {
  if (current && rooms_.count(*current) && rooms_.at(*current).bounds.contains(p, tol)) {
    return current;
  }
  for (const auto& [id, r] : rooms_) {
    if (r.bounds.contains(p, tol)) return id;
  }
  return std::nullopt;
}

std::optional<NodeId> SceneGraph::room_for_gt(int gt_room) const {
  for (const auto& [id, r] : rooms_) {
    if (r.gt_room && *r.gt_room == gt_room) return id;
  }
  return std::nullopt;
}

NodeId SceneGraph::membership(Vec2 p, NodeId current) const {
  return room_containing(p, current).value_or(current);
}

std::optional<NodeId> SceneGraph::nearest_large(Vec2 p, double radius) const {
  std::optional<NodeId> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [id, l] : large_) {
    double d = distance(l.position.xy(), p);
    if (d <= radius && d < best_d) {
      best = id;
      best_d = d;
    }
  }
  return best;
}

std::optional<NodeId> SceneGraph::door_near(Vec2 p, double radius) const {
  std::optional<NodeId> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [id, d] : doors_) {
    double dist = distance(d.position.xy(), p);
    if (dist <= radius && dist < best_d) {
      best = id;
      best_d = dist;
    }
  }
  return best;
}

void SceneGraph::connect_door(NodeId door_id, NodeId near_room, NodeId far_room) {
  DoorEdge& d = door(door_id);
  if (near_room == far_room) return;
  room(near_room);
  room(far_room);
  auto attach = [&](NodeId r) {
    auto& edges = rooms_.at(r).door_edges;
    if (std::find(edges.begin(), edges.end(), door_id) == edges.end()) edges.push_back(door_id);
  };
  auto detach = [&](NodeId r) {
    if (r == kUnexploredRoom || !rooms_.count(r)) return;
    auto& edges = rooms_.at(r).door_edges;
    edges.erase(std::remove(edges.begin(), edges.end(), door_id), edges.end());
  };
  if (d.room_a == near_room) {
    if (d.room_b != far_room) detach(d.room_b);
    d.room_b = far_room;
  } else if (d.room_b == near_room) {
    d.room_b = d.room_a;
    d.room_a = near_room;
    if (d.room_b != far_room) detach(d.room_b);
    d.room_b = far_room;
  } else if (d.room_a == far_room) {
    if (d.room_b != kUnexploredRoom) detach(d.room_b);
    d.room_b = near_room;
  } else {
    // Door was filed under the wrong room; relink it to what was walked.
    detach(d.room_a);
    detach(d.room_b);
    d.room_a = near_room;
    d.room_b = far_room;
  }
  attach(d.room_a);
  attach(d.room_b);
  d.traversed = true;
}

GraphDelta SceneGraph::integrate(const Observation& obs, NodeId current) {
  GraphDelta delta;
  const std::uint64_t fp = fingerprint(obs);
  if (seen_.count(fp)) {
    delta.duplicate = true;
    return delta;
  }
  seen_.insert(fp);
  RoomNode& here = room(current);

  auto mark = [](std::vector<NodeId>& v, NodeId id) {
    if (std::find(v.begin(), v.end(), id) == v.end()) v.push_back(id);
  };
  auto reject = [&](const Percept& p) {
    ++delta.rejected;
    std::clog << "scene graph: dropping percept '" << p.category << "' with non-finite position\n";
  };

  // Walls first so that room bounds are current when objects are placed.
  const Rect before = here.bounds;
  for (const auto& p : obs.percepts) {
    if (p.kind != EntityKind::Wall) continue;
    if (!p.position.finite()) {
      reject(p);
      continue;
    }
    here.bounds.expand(p.position.xy());
  }
  if (!(here.bounds == before)) mark(delta.updated, current);

  for (const auto& p : obs.percepts) {
    if (p.kind != EntityKind::Door) continue;
    if (!p.position.finite()) {
      reject(p);
      continue;
    }
    const Vec2 xy = p.position.xy();
    if (!here.bounds.empty() && !here.bounds.contains(xy, cfg_.door_wall_tolerance)) continue;
    const bool open = p.door_open.value_or(true);
    if (auto id = door_near(xy, cfg_.association_radius)) {
      DoorEdge& d = doors_.at(*id);
      d.position = running_average(d.position, d.observation_count, p.position);
      ++d.observation_count;
      d.open_estimate = open;
      if (d.room_a != current && d.room_b != current) {
        if (d.room_b == kUnexploredRoom) {
          // Seen from its far side: that room is now known.
          d.room_b = current;
          d.traversed = true;
          mark(here.door_edges, *id);
        }
      }
      mark(delta.updated, *id);
    } else {
      mark(delta.created, add_door(p.position, current, kUnexploredRoom, open));
    }
  }

  for (int pass = 0; pass < 2; ++pass) {
    const SizeClass want = pass == 0 ? SizeClass::Large : SizeClass::Small;
    for (const auto& p : obs.percepts) {
      if (p.kind != EntityKind::Object) continue;
      if (!p.position.finite()) {
        if (pass == 0) reject(p);
        continue;
      }
      const SizeClass cls = classify_size(p.category, p.size > 0 ? std::optional(p.size) : std::nullopt, *kb_);
      if (cls != want) continue;
      const Vec2 xy = p.position.xy();

      std::optional<NodeId> match;
      double best = std::numeric_limits<double>::infinity();
      if (cls == SizeClass::Large) {
        for (const auto& [id, l] : large_) {
          double d = distance(l.position.xy(), xy);
          if (l.category == p.category && d <= cfg_.association_radius && d < best) {
            match = id;
            best = d;
          }
        }
        if (match) {
          auto& l = large_.at(*match);
          l.position = running_average(l.position, l.observation_count, p.position);
          ++l.observation_count;
          mark(delta.updated, *match);
        } else {
          mark(delta.created, add_large(p.category, p.position, membership(xy, current)));
        }
      } else {
        for (const auto& [id, s] : small_) {
          double d = distance(s.position.xy(), xy);
          if (s.category == p.category && d <= cfg_.association_radius && d < best) {
            match = id;
            best = d;
          }
        }
        if (match) {
          auto& s = small_.at(*match);
          s.position = running_average(s.position, s.observation_count, p.position);
          ++s.observation_count;
          mark(delta.updated, *match);
        } else if (auto host = nearest_large(xy, cfg_.near_radius)) {
          mark(delta.created, add_small(p.category, p.position, *host, ParentRelation::Near));
        } else {
          mark(delta.created,
               add_small(p.category, p.position, membership(xy, current), ParentRelation::In));
        }
      }
    }
  }
  return delta;
}

Subgraph SceneGraph::extract_subgraph(NodeId room_id) const {
  Subgraph sub;
  sub.room = room(room_id);
  std::set<NodeId> landmarks;
  for (const auto& [id, l] : large_) {
    if (l.room == room_id) {
      sub.large.push_back(l);
      landmarks.insert(id);
    }
  }
  for (const auto& [id, s] : small_) {
    bool mine = s.relation == ParentRelation::Near ? landmarks.count(s.parent) != 0
                                                   : s.parent == room_id;
    if (mine) sub.small.push_back(s);
  }
  for (const auto& [id, d] : doors_) {
    if (d.room_a == room_id || d.room_b == room_id) sub.doors.push_back(d);
  }
  return sub;
}

bool SceneGraph::all_doors_explored() const {
  return std::none_of(doors_.begin(), doors_.end(),
                      [](const auto& kv) { return kv.second.unexplored(); });
}

const DoorEdge& SceneGraph::find_next_unexplored_door(const DistanceFn& dist) const {
  const DoorEdge* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [id, d] : doors_) {
    if (!d.unexplored()) continue;
    double v = dist(d.position.xy()).value_or(std::numeric_limits<double>::infinity());
    if (best == nullptr || v < best_d) {
      best = &d;
      best_d = v;
    }
  }
  if (best == nullptr) throw SceneGraphError("no unexplored door left");
  return *best;
}

std::vector<Triplet> SceneGraph::triplets() const {
  std::vector<Triplet> out;
  for (const auto& [id, r] : rooms_) out.push_back({id, "in", kHouseNode});
  for (const auto& [id, l] : large_) out.push_back({id, "in", l.room});
  for (const auto& [id, s] : small_) {
    out.push_back({id, s.relation == ParentRelation::Near ? "near" : "in", s.parent});
  }
  for (const auto& [id, d] : doors_) out.push_back({d.room_a, door_label(id), d.room_b});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> SceneGraph::check_invariants() const {
  std::vector<std::string> problems;
  auto fail = [&](std::string s) { problems.push_back(std::move(s)); };
  for (const auto& [id, l] : large_) {
    if (!rooms_.count(l.room)) fail("large " + std::to_string(id) + " has no room");
    if (!l.position.finite()) fail("large " + std::to_string(id) + " position not finite");
  }
  for (const auto& [id, s] : small_) {
    bool ok = s.relation == ParentRelation::Near ? large_.count(s.parent) != 0
                                                 : rooms_.count(s.parent) != 0;
    if (!ok) fail("small " + std::to_string(id) + " has a dangling parent");
    if (!s.position.finite()) fail("small " + std::to_string(id) + " position not finite");
  }
  for (const auto& [id, d] : doors_) {
    if (!rooms_.count(d.room_a)) fail("door " + std::to_string(id) + " room_a missing");
    if (d.room_b != kUnexploredRoom && !rooms_.count(d.room_b)) {
      fail("door " + std::to_string(id) + " room_b missing");
    }
    if (d.room_a == d.room_b) fail("door " + std::to_string(id) + " is a self loop");
    if (d.traversed && d.room_b == kUnexploredRoom) {
      fail("door " + std::to_string(id) + " traversed into an unexplored stub");
    }
    if (!d.position.finite()) fail("door " + std::to_string(id) + " position not finite");
  }
  std::set<NodeId> ids;
  auto unique = [&](NodeId id) {
    if (!ids.insert(id).second) fail("duplicate node id " + std::to_string(id));
  };
  for (const auto& kv : rooms_) unique(kv.first);
  for (const auto& kv : large_) unique(kv.first);
  for (const auto& kv : small_) unique(kv.first);
  for (const auto& kv : doors_) unique(kv.first);
  if (ids.count(kHouseNode)) fail("node reuses the house id");
  return problems;
}

nlohmann::json SceneGraph::to_json() const {
  using nlohmann::json;
  json nodes = json::array();
  nodes.push_back({{"id", kHouseNode}, {"level", "house"}, {"label", "house"}});
  for (const auto& [id, r] : rooms_) {
    json b = r.bounds.empty() ? json(nullptr)
                              : json::array({r.bounds.min_x, r.bounds.min_y, r.bounds.max_x, r.bounds.max_y});
    nodes.push_back({{"id", id},
                     {"level", "room"},
                     {"label", room_label(id)},
                     {"room_type", r.room_type ? json(*r.room_type) : json(nullptr)},
                     {"bounds", b},
                     {"investigated", r.investigated},
                     {"skipped_for", r.skipped_for}});
  }
  for (const auto& [id, l] : large_) {
    nodes.push_back({{"id", id},
                     {"level", "large"},
                     {"label", node_label(l.category, id)},
                     {"category", l.category},
                     {"position", {l.position.x, l.position.y, l.position.z}},
                     {"observations", l.observation_count}});
  }
  for (const auto& [id, s] : small_) {
    nodes.push_back({{"id", id},
                     {"level", "small"},
                     {"label", node_label(s.category, id)},
                     {"category", s.category},
                     {"position", {s.position.x, s.position.y, s.position.z}},
                     {"observations", s.observation_count}});
  }
  json edges = json::array();
  for (const auto& t : triplets()) {
    edges.push_back({{"subject", t.subject}, {"relation", t.relation}, {"object", t.object}});
  }
  json doors = json::array();
  for (const auto& [id, d] : doors_) {
    doors.push_back({{"id", id},
                     {"label", door_label(id)},
                     {"position", {d.position.x, d.position.y, d.position.z}},
                     {"rooms", {d.room_a, d.room_b}},
                     {"open", d.open_estimate},
                     {"traversed", d.traversed},
                     {"abandoned", d.abandoned}});
  }
  return {{"nodes", nodes}, {"edges", edges}, {"doors", doors}};
}

}  // namespace saynav
