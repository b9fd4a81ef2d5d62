#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "saynav/core/geometry.hpp"
#include "saynav/high_planner/planner.hpp"
#include "saynav/house_sim/generator.hpp"
#include "saynav/house_sim/simulator.hpp"
#include "saynav/low_planner/point_nav.hpp"

namespace saynav {

inline constexpr int kEpisodeSchemaVersion = 1;

struct EpisodeTarget {
  std::string category;
  Vec3 position;
  friend bool operator==(const EpisodeTarget&, const EpisodeTarget&) = default;
};

/// One benchmark task: find three object categories in one house.
struct Episode {
  std::string data_type = "test";  // "val" or "test"
  int house_idx = 0;
  int num_rooms = 0;
  int num_targets = 3;
  std::vector<EpisodeTarget> targets;
  Vec2 start_position;
  int start_heading = 0;  // degrees
  std::vector<std::string> shortest_path_targets_order;
  double shortest_path_length = 0.0;

  /// Enough to regenerate the house.
  HouseSpec house_spec;

  friend bool operator==(const Episode& a, const Episode& b) {
    return a.data_type == b.data_type && a.house_idx == b.house_idx && a.num_rooms == b.num_rooms &&
           a.num_targets == b.num_targets && a.targets == b.targets &&
           a.start_position == b.start_position && a.start_heading == b.start_heading &&
           a.shortest_path_targets_order == b.shortest_path_targets_order &&
           a.shortest_path_length == b.shortest_path_length &&
           a.house_spec.rng_seed == b.house_spec.rng_seed &&
           a.house_spec.num_rooms == b.house_spec.num_rooms;
  }
};

enum class SceneGraphMode { GT, VO };

std::string_view to_string(SceneGraphMode m);

struct RunConfig {
  SceneGraphMode scene_graph = SceneGraphMode::GT;
  LowLevelKind low_level = LowLevelKind::OrNav;
  Backend backend = Backend::Heuristic;
  MemoryMode memory = MemoryMode::GraphAnnotation;
  int step_budget = 2000;
  std::uint64_t seed = 0;

  PlannerConfig planner;
  PerceptionConfig perception;
  SceneGraphConfig graph;
  SurrogateParams surrogate;
  double nav_success_radius = 1.5;
  int nav_max_steps = 300;
  std::optional<LlmConfig> llm;
  /// Per-episode LLM transcripts go here when set.
  std::filesystem::path transcript_dir;

  /// e.g. "gt-ornav-heuristic-graph".
  std::string label() const;
};

enum class FailureReason { None, DoorsExhausted, StepBudget, NavError };

std::string_view to_string(FailureReason r);

struct FoundTarget {
  std::string category;
  /// Sequence number of the trace event that recorded the discovery.
  int step_index = 0;
  /// Primitive steps taken when it was found.
  int step = 0;
  Vec3 position;
  int node = 0;
};

struct EpisodeResult {
  int episode = 0;
  bool success = false;
  std::vector<FoundTarget> found;
  double path_length = 0.0;
  int steps = 0;
  FailureReason failure_reason = FailureReason::None;
  std::string error;
  int plans = 0;
  int doors_traversed = 0;
  int llm_fallbacks = 0;
  /// Serialized trace events, one JSON object per entry.
  std::vector<std::string> trace;

  nlohmann::json to_json(bool with_trace = false) const;
};

/// JSON-lines event log: {"type", "step", "seq", "payload"}.
class Trace {
 public:
  int emit(std::string_view type, int step, nlohmann::json payload);
  const std::vector<std::string>& lines() const { return lines_; }
  std::vector<std::string> release() { return std::move(lines_); }
  int size() const { return static_cast<int>(lines_.size()); }

 private:
  std::vector<std::string> lines_;
};

}  // namespace saynav
