#include "saynav/high_planner/planner.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include "saynav/core/strings.hpp"
#include "saynav_high_planner_resources.hpp"

namespace saynav {
namespace {

const char* kSystemPrompt = "You are the planning module of a household search robot. Answer tersely.";

std::vector<ChatMessage> user_turn(std::string content) {
  return {{"system", kSystemPrompt}, {"user", std::move(content)}};
}

std::string normalize_label(std::string_view s) {
  std::string out;
  for (char c : to_lower(trim(s))) {
    if (c == ' ' || c == '-') {
      out += '_';
    } else if (c != '.' && c != '"' && c != '\'' && c != '`') {
      out += c;
    }
  }
  return out;
}

// Every navigate is followed by a look, so plans from both backends have the same shape.
void pair_navigates_with_looks(Plan& plan) {
  std::vector<PlanStep> out;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    out.push_back(plan.steps[i]);
    const bool next_is_look = i + 1 < plan.steps.size() && plan.steps[i + 1].kind == StepKind::Look;
    if (plan.steps[i].kind == StepKind::Navigate && !next_is_look) {
      out.push_back(PlanStep{StepKind::Look, "", std::nullopt, "scan around " + plan.steps[i].target});
    }
  }
  plan.steps = std::move(out);
}

}  // namespace

std::string_view to_string(Backend b) { return b == Backend::Llm ? "llm" : "heuristic"; }

std::string join(const std::set<std::string>& items, std::string_view sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

std::string heuristic_room_type(const Subgraph& sub, const KnowledgeBase& kb) {
  std::vector<double> votes(kb.room_types().size(), 0.0);
  for (const auto& l : sub.large) {
    for (std::size_t r = 0; r < votes.size(); ++r) votes[r] += kb.signature_vote(l.category, kb.room_types()[r]);
  }
  const auto best = std::max_element(votes.begin(), votes.end());
  if (best == votes.end() || *best <= 0.0) return std::string(kUnknownRoomType);
  if (std::count_if(votes.begin(), votes.end(), [&](double v) { return std::abs(v - *best) < 1e-9; }) > 1) {
    return std::string(kUnknownRoomType);
  }
  return kb.room_types()[static_cast<std::size_t>(best - votes.begin())];
}

std::map<std::string, bool> heuristic_feasibility(std::string_view room_type,
                                                  const std::set<std::string>& unfound,
                                                  const KnowledgeBase& kb, double threshold) {
  std::map<std::string, bool> out;
  const bool unknown = room_type == kUnknownRoomType || !kb.is_room_type(room_type);
  for (const auto& c : unfound) out[c] = unknown || kb.room_prior(c, room_type) >= threshold;
  return out;
}

Plan heuristic_plan(const Subgraph& sub, const std::set<std::string>& unfound,
                    const KnowledgeBase& kb, double cutoff) {
  struct Scored {
    double score;
    const LargeObjectNode* node;
  };
  std::vector<Scored> ranked;
  for (const auto& l : sub.large) {
    double score = 0.0;
    for (const auto& c : unfound) score = std::max(score, kb.landmark_prior(c, l.category));
    if (score >= cutoff) ranked.push_back({score, &l});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Scored& a, const Scored& b) {
    return a.score != b.score ? a.score > b.score : a.node->id < b.node->id;
  });

  Plan plan;
  plan.source = PlanSource::Heuristic;
  for (const auto& s : ranked) {
    std::ostringstream why;
    why.precision(2);
    why << "prior " << s.score;
    const std::string label = node_label(s.node->category, s.node->id);
    plan.steps.push_back({StepKind::Navigate, label, s.node->id, "check the " + s.node->category + ", " + why.str()});
    plan.steps.push_back({StepKind::Look, "", std::nullopt, "scan for " + join(unfound)});
  }
  if (plan.steps.empty()) plan.steps.push_back({StepKind::Look, "", std::nullopt, "scan the room"});
  plan.raw_text = render_plan(plan);
  return plan;
}

HighLevelPlanner::HighLevelPlanner(Backend backend, PlannerConfig cfg, const KnowledgeBase& kb,
                                   ChatModel* model, Transcript* transcript)
    : backend_(backend), cfg_(cfg), kb_(&kb), model_(model), transcript_(transcript) {
  if (backend_ == Backend::Llm && model_ == nullptr) {
    throw std::invalid_argument("llm backend needs a chat model");
  }
}

std::string HighLevelPlanner::identify_room_type(const Subgraph& sub) {
  if (sub.empty()) return std::string(kUnknownRoomType);
  if (backend_ == Backend::Llm) {
    std::string types;
    for (const auto& t : kb_->room_types()) types += t + "\n";
    std::string objects;
    for (const auto& c : sub.object_categories()) objects += (objects.empty() ? "" : ", ") + c;
    const auto prompt = render_template(prompts::room_type(), {{"OBJECTS", objects}, {"ROOM_TYPES", types}});
    try {
      auto label = normalize_label(ask(*model_, transcript_, "room_type", user_turn(prompt)));
      if (kb_->is_room_type(label) || label == kUnknownRoomType) return label;
      std::clog << "planner: room type '" << label << "' outside vocabulary\n";
    } catch (const LlmError& e) {
      std::clog << "planner: " << e.what() << '\n';
    }
    ++fallbacks_;
  }
  return heuristic_room_type(sub, *kb_);
}

std::map<std::string, bool> HighLevelPlanner::assess_feasibility(std::string_view room_type,
                                                                 const std::set<std::string>& unfound) {
  auto fallback = heuristic_feasibility(room_type, unfound, *kb_, cfg_.feasibility_threshold);
  if (backend_ != Backend::Llm || room_type == kUnknownRoomType || unfound.empty()) return fallback;

  std::string list;
  for (const auto& c : unfound) list += c + "\n";
  const auto prompt = render_template(prompts::feasibility(), {{"ROOM_TYPE", std::string(room_type)}, {"UNFOUND", list}});
  std::map<std::string, bool> answer;
  try {
    const auto reply = ask(*model_, transcript_, "feasibility", user_turn(prompt));
    for (auto line : split(reply, '\n')) {
      auto colon = line.rfind(':');
      if (colon == std::string_view::npos) continue;
      auto cat = to_lower(trim(line.substr(0, colon)));
      auto verdict = normalize_label(line.substr(colon + 1));
      if (!unfound.count(cat)) continue;
      if (verdict == "yes") answer[cat] = true;
      if (verdict == "no") answer[cat] = false;
    }
  } catch (const LlmError& e) {
    std::clog << "planner: " << e.what() << '\n';
  }
  if (answer.size() != unfound.size()) ++fallbacks_;
  for (auto& [cat, ok] : fallback) {
    if (auto it = answer.find(cat); it != answer.end()) ok = it->second;
  }
  return fallback;
}

Plan HighLevelPlanner::generate_plan(const Subgraph& sub, const std::set<std::string>& unfound) {
  if (backend_ == Backend::Llm) {
    const auto prompt = render_template(prompts::search_plan(),
                                        {{"SUBGRAPH", subgraph_to_text(sub)}, {"UNFOUND", join(unfound)}});
    auto messages = user_turn(prompt);
    for (int attempt = 0; attempt <= cfg_.llm_retries; ++attempt) {
      std::string reply;
      try {
        reply = ask(*model_, transcript_, "search_plan", messages);
        Plan plan = parse_plan(reply);
        bind_plan(plan, sub);
        pair_navigates_with_looks(plan);
        plan.source = PlanSource::Llm;
        return plan;
      } catch (const LlmError& e) {
        std::clog << "planner: " << e.what() << '\n';
        break;
      } catch (const ParseError& e) {
        std::clog << "planner: " << e.what() << '\n';
        messages.push_back({"assistant", reply});
        messages.push_back({"user", std::string("That plan could not be used (") + e.what() +
                                        "). Reply again using only navigate(<id>) and look() lines "
                                        "with ids from the room listing."});
      }
    }
    ++fallbacks_;
  }
  return heuristic_plan(sub, unfound, *kb_, cfg_.landmark_cutoff);
}

std::string_view to_string(NextKind k) {
  switch (k) {
    case NextKind::Replan: return "replan";
    case NextKind::GoToDoor: return "go_to_door";
    case NextKind::RefineWander: return "refine_wander";
    case NextKind::Exhausted: return "exhausted";
  }
  return "?";
}

NextAction on_plan_exhausted(const SceneGraph& graph, bool new_information, int wander_remaining,
                             const DistanceFn& distance_from_agent) {
  if (new_information) return {NextKind::Replan, -1};
  if (!graph.all_doors_explored()) {
    return {NextKind::GoToDoor, graph.find_next_unexplored_door(distance_from_agent).id};
  }
  if (wander_remaining > 0) return {NextKind::RefineWander, -1};
  return {NextKind::Exhausted, -1};
}

std::string_view to_string(MemoryMode m) { return m == MemoryMode::LlmTracker ? "llm" : "graph"; }

std::string room_digest(NodeId room, std::string_view room_type, std::string_view outcome) {
  return room_label(room) + " | " + std::string(room_type) + " | " + std::string(outcome);
}

RoomMemory::RoomMemory(MemoryMode mode, ChatModel* tracker, Transcript* transcript)
    : mode_(mode), tracker_(tracker), transcript_(transcript) {
  if (mode_ == MemoryMode::LlmTracker && tracker_ == nullptr) {
    throw std::invalid_argument("tracker memory needs a chat model");
  }
}

void RoomMemory::update(SceneGraph& graph, NodeId room, std::string_view outcome) {
  RoomNode& r = graph.room(room);
  r.investigated = true;
  if (mode_ == MemoryMode::LlmTracker) {
    digests_.push_back(room_digest(room, r.room_type.value_or(std::string(kUnknownRoomType)), outcome));
  }
}

std::string RoomMemory::tracker_prompt(NodeId room) const {
  std::string history;
  for (const auto& d : digests_) history += d + "\n";
  if (history.empty()) history = "(none)\n";
  return render_template(prompts::room_tracking(), {{"DIGESTS", history}, {"ROOM", room_label(room)}});
}

bool RoomMemory::visited(const SceneGraph& graph, NodeId room) {
  if (mode_ == MemoryMode::GraphAnnotation || degraded_) return graph.room(room).investigated;
  try {
    auto reply = normalize_label(ask(*tracker_, transcript_, "room_tracking",
                                     {{"user", tracker_prompt(room)}}));
    if (starts_with(reply, "yes")) return true;
    if (starts_with(reply, "no")) return false;
    std::clog << "memory: unparsable tracker answer, using graph annotations\n";
  } catch (const LlmError& e) {
    std::clog << "memory: " << e.what() << ", using graph annotations\n";
  }
  degraded_ = true;
  return graph.room(room).investigated;
}

std::string DigestTrackerModel::complete(const std::vector<ChatMessage>& messages) {
  if (messages.empty()) throw LlmError("empty request");
  const std::string& prompt = messages.back().content;
  const auto q = prompt.rfind("Has ");
  if (q == std::string::npos) throw LlmError("not a room tracking prompt");
  const auto end = prompt.find(' ', q + 4);
  const std::string room = prompt.substr(q + 4, end == std::string::npos ? std::string::npos : end - q - 4);
  for (auto line : split(std::string_view(prompt).substr(0, q), '\n')) {
    if (starts_with(trim(line), room + " |")) return "yes";
  }
  return "no";
}

}  // namespace saynav
