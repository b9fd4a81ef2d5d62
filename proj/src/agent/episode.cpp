#include "saynav/agent/episode.hpp"

namespace saynav {

std::string_view to_string(SceneGraphMode m) { return m == SceneGraphMode::GT ? "gt" : "vo"; }

std::string RunConfig::label() const {
  std::string s;
  s += to_string(scene_graph);
  s += '-';
  s += to_string(low_level);
  s += '-';
  s += to_string(backend);
  s += '-';
  s += to_string(memory);
  return s;
}

std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::None: return "none";
    case FailureReason::DoorsExhausted: return "doors_exhausted";
    case FailureReason::StepBudget: return "step_budget";
    case FailureReason::NavError: return "nav_error";
  }
  return "?";
}

nlohmann::json EpisodeResult::to_json(bool with_trace) const {
  nlohmann::json f = nlohmann::json::array();
  for (const auto& t : found) {
    f.push_back({{"category", t.category},
                 {"step_index", t.step_index},
                 {"step", t.step},
                 {"position", {t.position.x, t.position.y, t.position.z}},
                 {"node", t.node}});
  }
  nlohmann::json j{{"episode", episode},
                   {"success", success},
                   {"found", f},
                   {"path_length", path_length},
                   {"steps", steps},
                   {"failure_reason", to_string(failure_reason)},
                   {"plans", plans},
                   {"doors_traversed", doors_traversed},
                   {"llm_fallbacks", llm_fallbacks}};
  if (!error.empty()) j["error"] = error;
  if (with_trace) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& line : trace) t.push_back(nlohmann::json::parse(line));
    j["trace"] = t;
  }
  return j;
}

int Trace::emit(std::string_view type, int step, nlohmann::json payload) {
  const int seq = size();
  nlohmann::json e{{"type", type}, {"step", step}, {"seq", seq}, {"payload", std::move(payload)}};
  lines_.push_back(e.dump());
  return seq;
}

}  // namespace saynav
