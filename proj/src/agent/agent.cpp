#include "saynav/agent/agent.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <memory>
#include <set>

#include "saynav/core/rng.hpp"
#include "saynav/low_planner/astar.hpp"

namespace saynav {
namespace {

// Thrown when the next action would exceed the step budget.
struct BudgetExhausted {};

constexpr int kMaxDecisionCycles = 10000;
constexpr int kMaxDoorFailures = 2;
constexpr double kDoorGoalRadius = 0.3;
constexpr double kWanderGoalRadius = 0.5;

nlohmann::json vec(Vec2 v) { return nlohmann::json::array({v.x, v.y}); }
nlohmann::json vec(Vec3 v) { return nlohmann::json::array({v.x, v.y, v.z}); }

class EpisodeRunner {
 public:
  EpisodeRunner(const House& house, const Episode& ep, const RunConfig& cfg, EpisodeModels models)
      : house_(house),
        ep_(ep),
        cfg_(cfg),
        graph_(cfg.graph),
        nav_(cfg.low_level == LowLevelKind::OrNav ? LowLevelPlanner::oracle()
                                                  : LowLevelPlanner::surrogate(surrogate_params())) {
    pcfg_ = cfg.perception;
    pcfg_.gt_mode = cfg.scene_graph == SceneGraphMode::GT;
    pcfg_.noise_seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(ep.house_idx), 1});

    if (!cfg.transcript_dir.empty() && (cfg.backend == Backend::Llm || cfg.memory == MemoryMode::LlmTracker)) {
      transcript_ = std::make_unique<Transcript>(cfg.transcript_dir /
                                                 ("episode_" + std::to_string(ep.house_idx) + ".jsonl"));
    }
    ChatModel* planner_model = models.planner;
    if (cfg.backend == Backend::Llm && planner_model == nullptr) {
      if (!cfg.llm) throw std::invalid_argument("llm backend needs an endpoint configuration");
      http_ = std::make_unique<HttpChatModel>(*cfg.llm);
      planner_model = http_.get();
    }
    ChatModel* tracker_model = models.tracker;
    if (cfg.memory == MemoryMode::LlmTracker && tracker_model == nullptr) {
      if (cfg.backend == Backend::Llm) {
        // A separate client stands for the second model instance.
        tracker_http_ = std::make_unique<HttpChatModel>(*cfg.llm);
        tracker_model = tracker_http_.get();
      } else {
        offline_tracker_ = std::make_unique<DigestTrackerModel>();
        tracker_model = offline_tracker_.get();
      }
    }
    planner_ = std::make_unique<HighLevelPlanner>(cfg.backend, cfg.planner, KnowledgeBase::builtin(),
                                                  planner_model, transcript_.get());
    memory_ = std::make_unique<RoomMemory>(cfg.memory, tracker_model, transcript_.get());
    for (const auto& t : ep.targets) unfound_.insert(t.category);
  }

  EpisodeResult run() {
    EpisodeResult res;
    res.episode = ep_.house_idx;
    try {
      spawn();
      int cycles = 0;
      while (!unfound_.empty()) {
        if (++cycles > kMaxDecisionCycles) throw std::runtime_error("decision loop did not converge");
        if (!decide()) {
          res.failure_reason = FailureReason::DoorsExhausted;
          break;
        }
      }
    } catch (const BudgetExhausted&) {
      res.failure_reason = FailureReason::StepBudget;
    } catch (const std::exception& e) {
      res.failure_reason = FailureReason::NavError;
      res.error = e.what();
    }
    res.success = unfound_.empty();
    if (res.success) res.failure_reason = FailureReason::None;
    res.found = found_;
    res.steps = state_.step_count;
    res.path_length = state_.path_length;
    res.plans = plans_;
    res.doors_traversed = doors_traversed_;
    res.llm_fallbacks = planner_->fallbacks();
    trace_.emit("end", state_.step_count,
                {{"success", res.success},
                 {"failure_reason", to_string(res.failure_reason)},
                 {"steps", res.steps},
                 {"path_length", res.path_length},
                 {"error", res.error}});
    res.trace = trace_.release();
    return res;
  }

 private:
  SurrogateParams surrogate_params() const {
    SurrogateParams p = cfg_.surrogate;
    p.rng_seed = derive_seed(cfg_.seed, {static_cast<std::uint64_t>(ep_.house_idx), 2});
    return p;
  }

  int remaining() const { return cfg_.step_budget - state_.step_count; }

  void spawn() {
    state_.cell = cell_of(ep_.start_position);
    state_.heading = heading_from_degrees(ep_.start_heading);
    if (!house_.grid().traversable(state_.cell)) throw std::runtime_error("start cell is not free");
    trace_.emit("header", 0,
                {{"episode", ep_.house_idx},
                 {"house_seed", ep_.house_spec.rng_seed},
                 {"config", cfg_.label()},
                 {"targets", [&] {
                    nlohmann::json t = nlohmann::json::array();
                    for (const auto& x : ep_.targets) t.push_back(x.category);
                    return t;
                  }()},
                 {"start", vec(state_.position())},
                 {"heading", ep_.start_heading}});
    emit_pose();
    current_ = new_room_for(state_.cell);
    trace_.emit("enter_room", state_.step_count, {{"room", current_}});
  }

  void emit_pose() {
    trace_.emit("pose", state_.step_count,
                {{"position", vec(state_.position())}, {"heading", heading_degrees(state_.heading)}});
  }

  // Room node for a cell the agent has just reached in a room it did not know.
  NodeId new_room_for(Cell c) {
    if (cfg_.scene_graph == SceneGraphMode::GT) {
      if (auto gt = house_.room_at(c)) {
        if (auto id = graph_.room_for_gt(*gt)) return *id;
        return graph_.add_room(*gt);
      }
    }
    if (auto id = graph_.room_containing(cell_center(c))) return *id;
    return graph_.add_room();
  }

  NodeId room_of_node(NodeId id) const {
    if (const auto* l = graph_.large(id)) return l->room;
    if (const auto* s = graph_.small(id)) {
      return s->relation == ParentRelation::In ? s->parent : graph_.large(s->parent)->room;
    }
    if (graph_.doors().count(id)) return graph_.door(id).room_a;
    return id;
  }

  // look_around, integrate, record discoveries. Returns the number of targets found.
  int perceive() {
    if (remaining() < kLookAroundCost) throw BudgetExhausted{};
    Observation obs = look_around(house_, state_, pcfg_);
    if (cfg_.scene_graph == SceneGraphMode::GT && obs.gt_room) {
      NodeId room = graph_.room_for_gt(*obs.gt_room).value_or(-1);
      if (room < 0) room = graph_.add_room(*obs.gt_room);
      if (room != current_) {
        current_ = room;
        trace_.emit("enter_room", state_.step_count, {{"room", current_}});
      }
    }
    looked_in_.insert(current_);
    GraphDelta delta = graph_.integrate(obs, current_);
    trace_.emit("look", state_.step_count,
                {{"room", current_},
                 {"percepts", obs.percepts.size()},
                 {"created", delta.created},
                 {"updated", delta.updated},
                 {"rejected", delta.rejected}});
    int hits = 0;
    for (NodeId id : delta.created) {
      ++created_in_[room_of_node(id)];
      std::string category;
      Vec3 pos;
      if (const auto* l = graph_.large(id)) {
        category = l->category;
        pos = l->position;
      } else if (const auto* s = graph_.small(id)) {
        category = s->category;
        pos = s->position;
      } else {
        continue;
      }
      if (!unfound_.count(category)) continue;
      unfound_.erase(category);
      FoundTarget f;
      f.category = category;
      f.step = state_.step_count;
      f.position = pos;
      f.node = id;
      f.step_index = trace_.emit("found", state_.step_count,
                                 {{"category", category}, {"node", id}, {"position", vec(pos)}});
      found_.push_back(f);
      ++hits;
    }
    return hits;
  }

  NavResult navigate(Vec2 target, double radius, std::string_view purpose) {
    if (remaining() <= 0) throw BudgetExhausted{};
    PointGoal goal{target, radius, std::min(cfg_.nav_max_steps, remaining())};
    const AgentState start = state_;
    NavResult r = nav_.navigate(house_, state_, goal);
    AgentState s = start;
    for (Action a : r.actions) {
      s = step(house_, s, a).state;
      state_ = s;
      emit_pose();
    }
    state_ = r.terminal;
    trace_.emit("nav", state_.step_count,
                {{"purpose", purpose},
                 {"low_level", to_string(nav_.kind())},
                 {"goal", vec(target)},
                 {"radius", radius},
                 {"success", r.success},
                 {"no_path", r.no_path},
                 {"steps", r.steps_taken},
                 {"path_length", r.path_length}});
    track_rooms(start.cell, r.trajectory);
    return r;
  }

  // Retries a failed sub-task once before the caller moves on.
  NavResult navigate_with_retry(Vec2 target, double radius, std::string_view purpose) {
    NavResult r = navigate(target, radius, purpose);
    if (!r.success && !r.no_path && remaining() > 0) r = navigate(target, radius, purpose);
    return r;
  }

  // Follows the trajectory through doorways and keeps current_ in step.
  void track_rooms(Cell start, const std::vector<Cell>& traj) {
    std::vector<Cell> cells{start};
    for (Cell c : traj) {
      if (c != cells.back()) cells.push_back(c);
    }
    const auto& grid = house_.grid();
    for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
      if (grid.at(cells[i]) != CellType::Door) continue;
      const Cell before = cells[i - 1];
      const Cell after = cells[i + 1];
      if (grid.at(before) == CellType::Door || grid.at(after) == CellType::Door || before == after) continue;
      cross_door(cells[i], after);
    }
    if (cfg_.scene_graph == SceneGraphMode::GT) {
      if (auto gt = house_.room_at(state_.cell)) {
        auto known = graph_.room_for_gt(*gt);
        if (!known || *known != current_) enter(known ? *known : graph_.add_room(*gt));
      }
    }
  }

  void cross_door(Cell door_cell, Cell landing) {
    const Vec2 p = cell_center(door_cell);
    auto edge = graph_.door_near(p, cfg_.graph.association_radius);
    NodeId next = -1;
    if (cfg_.scene_graph == SceneGraphMode::GT) {
      next = new_room_for(landing);
    } else if (edge) {
      const DoorEdge& d = graph_.door(*edge);
      const NodeId other = d.room_a == current_ ? d.room_b : (d.room_b == current_ ? d.room_a : kUnexploredRoom);
      if (other != kUnexploredRoom) next = other;
    }
    if (next < 0) {
      auto containing = graph_.room_containing(cell_center(landing));
      next = containing && *containing != current_ ? *containing : graph_.add_room();
    }
    if (next == current_) return;
    if (edge) {
      const bool was = graph_.door(*edge).traversed;
      graph_.connect_door(*edge, current_, next);
      if (!was) ++doors_traversed_;
    } else {
      graph_.add_door({p.x, p.y, 0.0}, current_, next, true);
      ++doors_traversed_;
    }
    enter(next);
  }

  void enter(NodeId room) {
    current_ = room;
    trace_.emit("enter_room", state_.step_count, {{"room", room}});
  }

  std::string unfound_key() const { return join(unfound_, ","); }

  // One pass of the search loop. Returns false once nothing is left to try.
  bool decide() {
    if (!looked_in_.count(current_)) {
      perceive();
      if (unfound_.empty()) return true;
    }
    const NodeId room = current_;
    const auto key = std::make_pair(room, unfound_key());
    const bool fresh = !memory_->visited(graph_, room) && !planned_.count(key) && !gated_.count(key);
    if (fresh && !planned_rooms_.count(room)) {
      plan_room(room, false);
      return true;
    }
    const bool new_info = fresh && created_in_[room] > created_at_plan_[room];
    const auto dist = distance_fn();
    if (!wander_left_.count(room)) wander_left_[room] = cfg_.planner.wander_budget;
    NextAction next = on_plan_exhausted(graph_, new_info, wander_left_[room], dist);
    trace_.emit("fallback", state_.step_count, {{"room", room}, {"action", to_string(next.kind)}, {"door", next.door}});
    switch (next.kind) {
      case NextKind::Replan:
        plan_room(room, false);
        return true;
      case NextKind::GoToDoor:
        leave(room);
        go_through(next.door);
        return true;
      case NextKind::RefineWander:
        wander(room);
        return true;
      case NextKind::Exhausted:
        leave(room);
        return revisit_skipped();
    }
    return false;
  }

  void leave(NodeId room) {
    if (planned_rooms_.count(room) && !graph_.room(room).investigated) {
      memory_->update(graph_, room, "searched");
      trace_.emit("investigated", state_.step_count, {{"room", room}});
    }
  }

  DistanceFn distance_fn() const {
    return [this](Vec2 p) -> std::optional<double> {
      auto goal = resolve_goal_cell(house_.grid(), state_.cell, p);
      if (!goal) return std::nullopt;
      auto path = astar_path(house_.grid(), state_.cell, *goal);
      if (!path) return std::nullopt;
      return path->length();
    };
  }

  void plan_room(NodeId room, bool bypass_feasibility) {
    Subgraph sub = graph_.extract_subgraph(room);
    std::string type = planner_->identify_room_type(sub);
    if (type != kUnknownRoomType || !graph_.room(room).room_type) graph_.room(room).room_type = type;
    type = graph_.room(room).room_type.value_or(std::string(kUnknownRoomType));
    sub.room.room_type = type;

    std::set<std::string> feasible;
    if (bypass_feasibility) {
      feasible = unfound_;
    } else {
      for (const auto& [cat, ok] : planner_->assess_feasibility(type, unfound_)) {
        if (ok) feasible.insert(cat);
      }
    }
    const auto key = std::make_pair(room, unfound_key());
    trace_.emit("room_type", state_.step_count, {{"room", room}, {"room_type", type}, {"feasible", feasible}});
    if (feasible.empty()) {
      for (const auto& c : unfound_) graph_.room(room).skipped_for.insert(c);
      gated_.insert(key);
      trace_.emit("skip", state_.step_count, {{"room", room}, {"room_type", type}, {"unfound", unfound_}});
      return;
    }

    Plan plan = planner_->generate_plan(sub, feasible);
    planned_.insert(key);
    planned_rooms_.insert(room);
    created_at_plan_[room] = created_in_[room];
    ++plans_;
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : plan.steps) {
      steps.push_back({{"kind", s.kind == StepKind::Navigate ? "navigate" : "look"},
                       {"target", s.target},
                       {"node", s.node ? *s.node : -1},
                       {"comment", s.comment}});
    }
    trace_.emit("plan", state_.step_count,
                {{"room", room},
                 {"unfound", unfound_},
                 {"source", to_string(plan.source)},
                 {"subgraph", subgraph_to_text(sub)},
                 {"steps", steps}});
    execute(plan, sub);
  }

  void execute(const Plan& plan, const Subgraph& sub) {
    for (const auto& s : plan.steps) {
      if (s.kind == StepKind::Look) {
        // A discovery changes the unfound set, so the rest of the plan is stale.
        if (perceive() > 0) return;
        if (unfound_.empty()) return;
        continue;
      }
      const auto* node = s.node ? graph_.large(*s.node) : nullptr;
      const bool in_sub = node && std::any_of(sub.large.begin(), sub.large.end(),
                                              [&](const auto& l) { return l.id == node->id; });
      if (!in_sub) throw std::logic_error("plan step targets a node outside its subgraph");
      trace_.emit("step", state_.step_count, {{"kind", "navigate"}, {"target", s.target}, {"comment", s.comment}});
      navigate_with_retry(node->position.xy(), cfg_.nav_success_radius, "plan");
    }
  }

  void wander(NodeId room) {
    const int k = cfg_.planner.wander_budget - wander_left_[room];
    --wander_left_[room];
    const Rect b = graph_.room(room).bounds;
    if (b.empty()) {
      perceive();
      return;
    }
    // First the center, then points between the center and alternating corners.
    Vec2 goal = b.center();
    if (k > 0) {
      const double sx = (k % 2 == 1) ? 1.0 : -1.0;
      const double sy = (k % 4 < 2) ? 1.0 : -1.0;
      goal = {goal.x + sx * b.width() / 4.0, goal.y + sy * b.height() / 4.0};
    }
    navigate(goal, kWanderGoalRadius, "wander");
    perceive();
  }

  // Door cell for a door edge whose estimated position may be off by noise.
  std::optional<Cell> snap_door(Vec2 p) const {
    const Cell c = cell_of(p);
    std::optional<Cell> best;
    double best_d = 1e9;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        Cell n{c.x + dx, c.y + dy};
        if (house_.grid().at(n) != CellType::Door) continue;
        double d = distance(cell_center(n), p);
        if (d < best_d) {
          best = n;
          best_d = d;
        }
      }
    }
    return best;
  }

  void go_through(NodeId door_id) {
    DoorEdge& d = graph_.door(door_id);
    const auto cell = snap_door(d.position.xy());
    if (!cell) {
      abandon(door_id, "no doorway at estimate");
      return;
    }
    const auto& grid = house_.grid();
    const bool along_x = grid.traversable({cell->x - 1, cell->y}) && grid.traversable({cell->x + 1, cell->y});
    const Cell dir = along_x ? Cell{1, 0} : Cell{0, 1};
    const Cell side_a{cell->x - dir.x, cell->y - dir.y};
    const Cell side_b{cell->x + dir.x, cell->y + dir.y};

    // The far side faces away from the room the door was seen from.
    const Rect& near_bounds = graph_.room(d.room_a).bounds;
    Cell far = side_b;
    Cell dir_out = dir;
    if (!near_bounds.empty()) {
      const Vec2 mid = near_bounds.center();
      if (distance(cell_center(side_b), mid) < distance(cell_center(side_a), mid)) {
        far = side_a;
        dir_out = {-dir.x, -dir.y};
      }
    } else {
      auto dist = distance_fn();
      if (dist(cell_center(side_a)).value_or(1e9) > dist(cell_center(side_b)).value_or(1e9)) {
        far = side_a;
        dir_out = {-dir.x, -dir.y};
      }
    }
    const Cell beyond{far.x + dir_out.x, far.y + dir_out.y};
    const Cell goal_cell = grid.traversable(beyond) ? beyond : far;
    trace_.emit("door", state_.step_count, {{"door", door_id}, {"goal", vec(cell_center(goal_cell))}});

    NavResult r = navigate_with_retry(cell_center(goal_cell), kDoorGoalRadius, "door");
    DoorEdge& after = graph_.door(door_id);
    if (after.traversed) return;
    if (r.success && current_ != after.room_a) {
      // Arrived on the far side by another route.
      graph_.connect_door(door_id, after.room_a, current_);
      ++doors_traversed_;
      return;
    }
    if (r.no_path || ++door_failures_[door_id] >= kMaxDoorFailures) abandon(door_id, r.no_path ? "no path" : "repeated failures");
  }

  void abandon(NodeId door_id, std::string_view why) {
    graph_.door(door_id).abandoned = true;
    trace_.emit("abandon_door", state_.step_count, {{"door", door_id}, {"reason", why}});
  }

  // Infeasible rooms get one more chance before the episode fails.
  bool revisit_skipped() {
    auto dist = distance_fn();
    std::optional<NodeId> best;
    double best_d = 0;
    for (const auto& [id, r] : graph_.rooms()) {
      if (revisited_.count(id) || r.investigated || r.skipped_for.empty()) continue;
      const bool relevant = std::any_of(unfound_.begin(), unfound_.end(),
                                        [&](const auto& c) { return r.skipped_for.count(c) != 0; });
      if (!relevant) continue;
      const double d = r.bounds.empty() ? 0.0 : dist(r.bounds.center()).value_or(1e9);
      if (!best || d < best_d) {
        best = id;
        best_d = d;
      }
    }
    if (!best) return false;
    revisited_.insert(*best);
    trace_.emit("revisit", state_.step_count, {{"room", *best}});
    const Rect b = graph_.room(*best).bounds;
    if (current_ != *best && !b.empty()) navigate(b.center(), kWanderGoalRadius, "revisit");
    if (current_ == *best) {
      perceive();
      if (!unfound_.empty()) plan_room(*best, true);
    }
    return true;
  }

  const House& house_;
  const Episode& ep_;
  const RunConfig& cfg_;
  PerceptionConfig pcfg_;
  SceneGraph graph_;
  LowLevelPlanner nav_;
  std::unique_ptr<Transcript> transcript_;
  std::unique_ptr<HttpChatModel> http_;
  std::unique_ptr<HttpChatModel> tracker_http_;
  std::unique_ptr<DigestTrackerModel> offline_tracker_;
  std::unique_ptr<HighLevelPlanner> planner_;
  std::unique_ptr<RoomMemory> memory_;
  Trace trace_;

  AgentState state_;
  NodeId current_ = -1;
  std::set<std::string> unfound_;
  std::vector<FoundTarget> found_;
  std::set<NodeId> looked_in_;
  std::set<std::pair<NodeId, std::string>> planned_;
  std::set<std::pair<NodeId, std::string>> gated_;
  std::set<NodeId> planned_rooms_;
  std::map<NodeId, int> created_in_;
  std::map<NodeId, int> created_at_plan_;
  std::map<NodeId, int> wander_left_;
  std::map<NodeId, int> door_failures_;
  std::set<NodeId> revisited_;
  int plans_ = 0;
  int doors_traversed_ = 0;
};

}  // namespace

EpisodeResult run_episode(const House& house, const Episode& episode, const RunConfig& cfg,
                          EpisodeModels models) {
  try {
    EpisodeRunner runner(house, episode, cfg, models);
    return runner.run();
  } catch (const std::exception& e) {
    EpisodeResult res;
    res.episode = episode.house_idx;
    res.failure_reason = FailureReason::NavError;
    res.error = e.what();
    return res;
  }
}

}  // namespace saynav
