#pragma once

#include <optional>
#include <string>
#include <vector>

#include "saynav/agent/episode.hpp"

namespace saynav {

/// S * l / max(p, l). Throws std::invalid_argument unless l > 0 and p >= 0.
double spl_term(bool success, double shortest, double actual);

struct SplSample {
  bool success = false;
  double shortest = 0.0;
  double actual = 0.0;
};

/// Mean of spl_term over the samples; 0 for an empty list.
double spl(const std::vector<SplSample>& samples);

/// 1 - 2D / (n(n-1)/2) with D the number of discordant pairs. Throws
/// std::invalid_argument unless both lists are permutations of the same
/// distinct items, n >= 2.
double kendall_tau(const std::vector<std::string>& order, const std::vector<std::string>& reference);

struct MetricsSummary {
  int n_episodes = 0;
  int n_success = 0;
  double sr = 0.0;
  double spl = 0.0;
  /// Mean over successful episodes; empty when none succeeded or not applicable.
  std::optional<double> kendall_tau;
  /// Successful episodes with zero path length, clamped to SPL 1.
  int degenerate = 0;
};

/// Per-episode record the summary is folded from.
struct EpisodeScore {
  int episode = 0;
  bool success = false;
  double shortest = 0.0;
  double actual = 0.0;
  std::vector<std::string> found_order;
  std::vector<std::string> optimal_order;
};

EpisodeScore score_episode(const Episode& ep, const EpisodeResult& res);

MetricsSummary summarize(const std::vector<EpisodeScore>& scores, bool kendall_applies = true);

}  // namespace saynav
