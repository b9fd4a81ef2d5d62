#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "saynav/core/knowledge_base.hpp"
#include "saynav/high_planner/llm_client.hpp"
#include "saynav/high_planner/plan.hpp"
#include "saynav/scene_graph/scene_graph.hpp"

namespace saynav {

enum class Backend { Heuristic, Llm };

std::string_view to_string(Backend b);

struct PlannerConfig {
  double feasibility_threshold = 0.2;
  /// Landmarks scoring below this are left out of heuristic plans.
  double landmark_cutoff = 0.1;
  int wander_budget = 2;
  int llm_retries = 1;
};

/// Majority vote of landmark room signatures; "unknown" on ties or no evidence.
std::string heuristic_room_type(const Subgraph& sub, const KnowledgeBase& kb);

std::map<std::string, bool> heuristic_feasibility(std::string_view room_type,
                                                  const std::set<std::string>& unfound,
                                                  const KnowledgeBase& kb, double threshold);

/// Navigate+Look pairs over landmarks ranked by their best prior for any
/// unfound category; a single Look when no landmark qualifies.
Plan heuristic_plan(const Subgraph& sub, const std::set<std::string>& unfound,
                    const KnowledgeBase& kb, double cutoff);

std::string join(const std::set<std::string>& items, std::string_view sep = ", ");

/// Room typing, feasibility gating and plan generation with either backend.
/// The LLM path falls back to the heuristic one on any failure.
class HighLevelPlanner {
 public:
  HighLevelPlanner(Backend backend, PlannerConfig cfg, const KnowledgeBase& kb,
                   ChatModel* model = nullptr, Transcript* transcript = nullptr);

  std::string identify_room_type(const Subgraph& sub);
  std::map<std::string, bool> assess_feasibility(std::string_view room_type,
                                                 const std::set<std::string>& unfound);
  /// Every navigate step of the result is bound to a landmark of `sub`.
  Plan generate_plan(const Subgraph& sub, const std::set<std::string>& unfound);

  Backend backend() const { return backend_; }
  const PlannerConfig& config() const { return cfg_; }
  /// LLM calls that ended in a heuristic fallback.
  int fallbacks() const { return fallbacks_; }

 private:
  Backend backend_;
  PlannerConfig cfg_;
  const KnowledgeBase* kb_;
  ChatModel* model_;
  Transcript* transcript_;
  int fallbacks_ = 0;
};

enum class NextKind { Replan, GoToDoor, RefineWander, Exhausted };

std::string_view to_string(NextKind k);

struct NextAction {
  NextKind kind = NextKind::Exhausted;
  NodeId door = -1;
};

/// Fallback order once a plan is used up: replan on new information, then
/// the nearest unexplored door, then wander inside the room, then give up.
NextAction on_plan_exhausted(const SceneGraph& graph, bool new_information, int wander_remaining,
                             const DistanceFn& distance_from_agent);

enum class MemoryMode { GraphAnnotation, LlmTracker };

std::string_view to_string(MemoryMode m);

/// One-line record of a room visit sent to the tracker.
std::string room_digest(NodeId room, std::string_view room_type, std::string_view outcome);

/// Which rooms were already searched. Graph mode reads the investigated
/// flags; tracker mode asks a second model over a digest history and drops
/// back to graph mode for good on the first failure.
class RoomMemory {
 public:
  RoomMemory(MemoryMode mode, ChatModel* tracker = nullptr, Transcript* transcript = nullptr);

  void update(SceneGraph& graph, NodeId room, std::string_view outcome);
  bool visited(const SceneGraph& graph, NodeId room);

  MemoryMode mode() const { return mode_; }
  bool degraded() const { return degraded_; }
  const std::vector<std::string>& digests() const { return digests_; }
  /// Tracker prompt for a query about `room`, as it would be sent.
  std::string tracker_prompt(NodeId room) const;

 private:
  MemoryMode mode_;
  ChatModel* tracker_;
  Transcript* transcript_;
  bool degraded_ = false;
  std::vector<std::string> digests_;
};

/// Offline tracker: answers room-tracking prompts from the digest lines in
/// the prompt alone, the same information an LLM tracker receives.
class DigestTrackerModel : public ChatModel {
 public:
  std::string complete(const std::vector<ChatMessage>& messages) override;
};

}  // namespace saynav
