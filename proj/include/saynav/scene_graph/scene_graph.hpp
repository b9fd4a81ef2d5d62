#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "saynav/core/geometry.hpp"
#include "saynav/core/knowledge_base.hpp"
#include "saynav/house_sim/simulator.hpp"

namespace saynav {

using NodeId = int;

inline constexpr NodeId kHouseNode = 0;
/// Far side of a door whose room has not been observed yet.
inline constexpr NodeId kUnexploredRoom = -1;
inline constexpr NodeId kAutoId = -2;

/// Large iff the category is a known landmark or the object spans at least
/// 0.8 m. Throws std::invalid_argument for a non-positive dimension, or for
/// an unknown category given without a dimension.
SizeClass classify_size(std::string_view category, std::optional<double> max_dimension,
                        const KnowledgeBase& kb = KnowledgeBase::builtin());

inline constexpr double kLargeObjectMinDimension = 0.8;

struct RoomNode {
  NodeId id = 0;
  Rect bounds;
  std::optional<std::string> room_type;
  bool investigated = false;
  /// Target categories whose search here was deferred as infeasible.
  std::set<std::string> skipped_for;
  std::vector<NodeId> door_edges;
  /// Ground-truth room this node stands for, known only in GT mode.
  std::optional<int> gt_room;

  friend bool operator==(const RoomNode&, const RoomNode&) = default;
};

struct LargeObjectNode {
  NodeId id = 0;
  std::string category;
  Vec3 position;
  int observation_count = 0;
  NodeId room = 0;

  friend bool operator==(const LargeObjectNode&, const LargeObjectNode&) = default;
};

enum class ParentRelation { Near, In };

struct SmallObjectNode {
  NodeId id = 0;
  std::string category;
  Vec3 position;
  int observation_count = 0;
  /// A large-object node ('near') or, lacking a landmark, a room ('in').
  NodeId parent = 0;
  ParentRelation relation = ParentRelation::In;

  friend bool operator==(const SmallObjectNode&, const SmallObjectNode&) = default;
};

struct DoorEdge {
  NodeId id = 0;
  Vec3 position;
  NodeId room_a = 0;
  NodeId room_b = kUnexploredRoom;
  bool open_estimate = true;
  /// Far side reached, by walking through or by seeing the door from both rooms.
  bool traversed = false;
  /// Given up after repeated failed crossings.
  bool abandoned = false;
  int observation_count = 0;

  bool unexplored() const { return open_estimate && !traversed && !abandoned; }
  friend bool operator==(const DoorEdge&, const DoorEdge&) = default;
};

struct Triplet {
  NodeId subject;
  std::string relation;  // "near", "in", or "door_<id>"
  NodeId object;

  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

struct GraphDelta {
  std::vector<NodeId> created;
  std::vector<NodeId> updated;
  int rejected = 0;
  bool duplicate = false;

  bool empty() const { return created.empty() && updated.empty(); }
};

struct SceneGraphConfig {
  double association_radius = 0.5;
  double near_radius = 1.5;
  /// How far beyond the current room's observed bounds a door may sit and
  /// still count as one of its doors.
  double door_wall_tolerance = 0.35;
};

class SceneGraph;

/// The part of the graph the high-level planner reasons about: one room,
/// its landmarks, the small objects under them and the room's doors.
struct Subgraph {
  RoomNode room;
  std::vector<LargeObjectNode> large;
  std::vector<SmallObjectNode> small;
  std::vector<DoorEdge> doors;

  std::size_t node_count() const { return 1 + large.size() + small.size(); }
  std::size_t edge_count() const { return large.size() + small.size() + doors.size(); }
  bool empty() const { return large.empty() && small.empty(); }

  /// Large-object or door node named by a plan token such as "desk_3".
  std::optional<NodeId> resolve_target(std::string_view token) const;
  std::vector<std::string> object_categories() const;
  std::vector<std::string> landmark_categories() const;
};

/// Canonical listing consumed by prompts: a room line, one line per
/// landmark with the small objects near it, one line per door.
std::string subgraph_to_text(const Subgraph& sub);

std::string node_label(std::string_view category, NodeId id);
std::string room_label(NodeId id);
std::string door_label(NodeId id);

/// Distance from the agent to a point, nullopt if unreachable.
using DistanceFn = std::function<std::optional<double>(Vec2)>;

class SceneGraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incrementally built four-level belief graph: small objects, large
/// objects, rooms and the house root.
class SceneGraph {
 public:
  explicit SceneGraph(SceneGraphConfig cfg = {}, const KnowledgeBase& kb = KnowledgeBase::builtin());

  NodeId add_room(std::optional<int> gt_room = std::nullopt, NodeId id = kAutoId);
  NodeId add_large(std::string category, Vec3 pos, NodeId room, NodeId id = kAutoId);
  NodeId add_small(std::string category, Vec3 pos, NodeId parent, ParentRelation rel,
                   NodeId id = kAutoId);
  NodeId add_door(Vec3 pos, NodeId room_a, NodeId room_b, bool open, NodeId id = kAutoId);

  /// Associates each percept with an existing node or creates one. Walls
  /// grow the current room's bounds; doors on its walls become door edges.
  /// Integrating an identical observation again is a no-op.
  GraphDelta integrate(const Observation& obs, NodeId current_room);

  Subgraph extract_subgraph(NodeId room) const;

  bool all_doors_explored() const;
  /// Nearest unexplored door by `dist`, lowest id on ties. Throws when none.
  const DoorEdge& find_next_unexplored_door(const DistanceFn& dist) const;

  /// Room containing the point, preferring `current`; nullopt if none does.
  std::optional<NodeId> room_containing(Vec2 p, std::optional<NodeId> current = std::nullopt,
                                        double tol = 0.0) const;
  std::optional<NodeId> room_for_gt(int gt_room) const;

  /// Nearest door edge within the association radius of a point.
  std::optional<NodeId> door_near(Vec2 p, double radius) const;

  RoomNode& room(NodeId id);
  const RoomNode& room(NodeId id) const;
  DoorEdge& door(NodeId id);
  const DoorEdge& door(NodeId id) const;
  const LargeObjectNode* large(NodeId id) const;
  const SmallObjectNode* small(NodeId id) const;

  bool has_room(NodeId id) const { return rooms_.count(id) != 0; }

  /// Records that the far side of a door is `far_room`.
  void connect_door(NodeId door, NodeId near_room, NodeId far_room);

  const std::map<NodeId, RoomNode>& rooms() const { return rooms_; }
  const std::map<NodeId, LargeObjectNode>& large_nodes() const { return large_; }
  const std::map<NodeId, SmallObjectNode>& small_nodes() const { return small_; }
  const std::map<NodeId, DoorEdge>& doors() const { return doors_; }
  const SceneGraphConfig& config() const { return cfg_; }

  /// Every edge as a triplet, sorted.
  std::vector<Triplet> triplets() const;
  std::size_t node_count() const { return 1 + rooms_.size() + large_.size() + small_.size(); }

  /// Structural invariant violations; empty when the graph is well formed.
  std::vector<std::string> check_invariants() const;

  nlohmann::json to_json() const;

  friend bool operator==(const SceneGraph& a, const SceneGraph& b) {
    return a.rooms_ == b.rooms_ && a.large_ == b.large_ && a.small_ == b.small_ &&
           a.doors_ == b.doors_ && a.next_id_ == b.next_id_ && a.seen_ == b.seen_;
  }

 private:
  NodeId allocate(NodeId requested);
  NodeId membership(Vec2 p, NodeId current) const;
  std::optional<NodeId> nearest_large(Vec2 p, double radius) const;

  SceneGraphConfig cfg_;
  const KnowledgeBase* kb_;
  std::map<NodeId, RoomNode> rooms_;
  std::map<NodeId, LargeObjectNode> large_;
  std::map<NodeId, SmallObjectNode> small_;
  std::map<NodeId, DoorEdge> doors_;
  NodeId next_id_ = kHouseNode + 1;
  std::set<std::uint64_t> seen_;
};

}  // namespace saynav
