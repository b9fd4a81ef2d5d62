#pragma once

#include "saynav/agent/episode.hpp"
#include "saynav/high_planner/llm_client.hpp"
#include "saynav/house_sim/house.hpp"

namespace saynav {

/// Optional injected models, mainly for tests. Unset members are built from
/// the RunConfig (an HTTP client for the llm backend, the digest tracker for
/// tracker memory under the heuristic backend).
struct EpisodeModels {
  ChatModel* planner = nullptr;
  ChatModel* tracker = nullptr;
};

/// Runs one multi-object search episode. Never throws: internal errors end
/// the episode with FailureReason::NavError.
EpisodeResult run_episode(const House& house, const Episode& episode, const RunConfig& cfg,
                          EpisodeModels models = {});

}  // namespace saynav
