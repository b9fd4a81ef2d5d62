#pragma once

#include <string>
#include <vector>

#include "saynav/agent/agent.hpp"
#include "saynav/bench/metrics.hpp"

namespace saynav {

/// Privileged reference: drives straight to the ground-truth targets in the
/// optimal order. No scene graph, no planner.
EpisodeResult run_baseline(const House& house, const Episode& ep, LowLevelKind low_level,
                           std::uint64_t seed, SurrogateParams params = {});

struct MatrixEntry {
  std::string name;
  bool baseline = false;
  RunConfig config;  // for the baseline only low_level and seed are used

  static MatrixEntry saynav(RunConfig cfg);
  static MatrixEntry reference(LowLevelKind low_level, std::uint64_t seed);
};

/// Standard comparison: baseline plus {GT,VO} x {OrNav,PNavS} with the given
/// backend and memory.
std::vector<MatrixEntry> standard_matrix(Backend backend, MemoryMode memory, std::uint64_t seed);

struct MatrixRow {
  std::string name;
  MetricsSummary metrics;
  bool kendall_applies = true;
};

/// All episodes of one entry, ordered by episode. Crashing episodes become
/// failed results. `parallel` runs episodes on OpenMP threads.
std::vector<EpisodeResult> run_entry(const std::vector<Episode>& episodes, const std::vector<House>& houses,
                                     const MatrixEntry& entry, bool parallel = true);

std::vector<House> build_houses(const std::vector<Episode>& episodes, bool parallel = true);

MatrixRow summarize_entry(const MatrixEntry& entry, const std::vector<Episode>& episodes,
                          const std::vector<EpisodeResult>& results);

/// Throws std::invalid_argument on an empty entry list.
std::vector<MatrixRow> run_matrix(const std::vector<Episode>& episodes, const std::vector<MatrixEntry>& entries,
                                  bool parallel = true);

std::string report_csv(const std::vector<MatrixRow>& rows);
std::string report_markdown(const std::vector<MatrixRow>& rows);

}  // namespace saynav
