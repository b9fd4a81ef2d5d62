#include "saynav/bench/matrix.hpp"

#include <cstdio>
#include <stdexcept>

#include "saynav/bench/dataset.hpp"
#include "saynav/core/rng.hpp"

namespace saynav {
namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

EpisodeResult run_baseline(const House& house, const Episode& ep, LowLevelKind low_level,
                           std::uint64_t seed, SurrogateParams params) {
  EpisodeResult res;
  res.episode = ep.house_idx;
  Trace trace;
  params.rng_seed = derive_seed(seed, {static_cast<std::uint64_t>(ep.house_idx), 3});
  LowLevelPlanner nav = low_level == LowLevelKind::OrNav ? LowLevelPlanner::oracle() : LowLevelPlanner::surrogate(params);
  AgentState s;
  s.cell = cell_of(ep.start_position);
  s.heading = heading_from_degrees(ep.start_heading);
  trace.emit("header", 0,
             {{"episode", ep.house_idx},
              {"house_seed", ep.house_spec.rng_seed},
              {"config", std::string("baseline-") + std::string(to_string(low_level))}});
  auto pose = [&](const AgentState& a) {
    trace.emit("pose", a.step_count,
               {{"position", {a.position().x, a.position().y}}, {"heading", heading_degrees(a.heading)}});
  };
  pose(s);
  bool ok = true;
  for (const auto& cat : ep.shortest_path_targets_order) {
    const EpisodeTarget* t = nullptr;
    for (const auto& x : ep.targets) {
      if (x.category == cat) t = &x;
    }
    if (t == nullptr) throw std::invalid_argument("baseline: order names an unknown target");
    NavResult r = nav.navigate(house, s, PointGoal{t->position.xy(), 1.5, 300});
    AgentState replay = s;
    for (Action a : r.actions) {
      replay = step(house, replay, a).state;
      pose(replay);
    }
    s = r.terminal;
    trace.emit("nav", s.step_count, {{"purpose", "target"}, {"success", r.success}, {"steps", r.steps_taken}});
    if (!r.success) {
      ok = false;
      break;
    }
    FoundTarget f;
    f.category = cat;
    f.step = s.step_count;
    f.position = t->position;
    f.step_index = trace.emit("found", s.step_count,
                              {{"category", cat}, {"position", {t->position.x, t->position.y, t->position.z}}});
    res.found.push_back(f);
  }
  res.success = ok;
  res.failure_reason = ok ? FailureReason::None : FailureReason::NavError;
  res.steps = s.step_count;
  res.path_length = s.path_length;
  trace.emit("end", s.step_count, {{"success", ok}});
  res.trace = trace.release();
  return res;
}

MatrixEntry MatrixEntry::saynav(RunConfig cfg) {
  MatrixEntry e;
  e.name = cfg.label();
  e.config = std::move(cfg);
  return e;
}

MatrixEntry MatrixEntry::reference(LowLevelKind low_level, std::uint64_t seed) {
  MatrixEntry e;
  e.name = std::string("baseline-") + std::string(to_string(low_level));
  e.baseline = true;
  e.config.low_level = low_level;
  e.config.seed = seed;
  return e;
}

std::vector<MatrixEntry> standard_matrix(Backend backend, MemoryMode memory, std::uint64_t seed) {
  std::vector<MatrixEntry> out{MatrixEntry::reference(LowLevelKind::PNavS, seed)};
  for (auto sg : {SceneGraphMode::GT, SceneGraphMode::VO}) {
    for (auto low : {LowLevelKind::OrNav, LowLevelKind::PNavS}) {
      RunConfig c;
      c.scene_graph = sg;
      c.low_level = low;
      c.backend = backend;
      c.memory = memory;
      c.seed = seed;
      out.push_back(MatrixEntry::saynav(c));
    }
  }
  return out;
}

std::vector<House> build_houses(const std::vector<Episode>& episodes, bool parallel) {
  std::vector<House> houses(episodes.size());
  const int n = static_cast<int>(episodes.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      houses[k] = house_for(episodes[k]);
    } catch (const std::exception&) {
      // Left empty; run_entry reports the episode as failed.
    }
  }
  return houses;
}

std::vector<EpisodeResult> run_entry(const std::vector<Episode>& episodes, const std::vector<House>& houses,
                                     const MatrixEntry& entry, bool parallel) {
  if (houses.size() != episodes.size()) throw std::invalid_argument("one house per episode expected");
  std::vector<EpisodeResult> results(episodes.size());
  const int n = static_cast<int>(episodes.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      if (houses[k].grid().size() == 0) throw std::runtime_error("house could not be regenerated");
      results[k] = entry.baseline
                       ? run_baseline(houses[k], episodes[k], entry.config.low_level, entry.config.seed,
                                      entry.config.surrogate)
                       : run_episode(houses[k], episodes[k], entry.config);
    } catch (const std::exception& e) {
      EpisodeResult r;
      r.episode = episodes[k].house_idx;
      r.failure_reason = FailureReason::NavError;
      r.error = e.what();
      results[k] = r;
    }
  }
  return results;
}

MatrixRow summarize_entry(const MatrixEntry& entry, const std::vector<Episode>& episodes,
                          const std::vector<EpisodeResult>& results) {
  std::vector<EpisodeScore> scores;
  for (std::size_t i = 0; i < episodes.size(); ++i) scores.push_back(score_episode(episodes[i], results[i]));
  return {entry.name, summarize(scores, !entry.baseline), !entry.baseline};
}

std::vector<MatrixRow> run_matrix(const std::vector<Episode>& episodes, const std::vector<MatrixEntry>& entries,
                                  bool parallel) {
  if (entries.empty()) throw std::invalid_argument("run_matrix: no configurations");
  if (episodes.empty()) throw std::invalid_argument("run_matrix: empty dataset");
  const auto houses = build_houses(episodes, parallel);
  std::vector<MatrixRow> rows;
  for (const auto& e : entries) rows.push_back(summarize_entry(e, episodes, run_entry(episodes, houses, e, parallel)));
  return rows;
}

std::string report_csv(const std::vector<MatrixRow>& rows) {
  std::string out = "method,n_episodes,n_success,sr,spl,kendall_tau\n";
  for (const auto& r : rows) {
    out += r.name + "," + std::to_string(r.metrics.n_episodes) + "," + std::to_string(r.metrics.n_success) + "," +
           fixed(r.metrics.sr) + "," + fixed(r.metrics.spl) + "," +
           (r.kendall_applies && r.metrics.kendall_tau ? fixed(*r.metrics.kendall_tau) : std::string("N/A")) + "\n";
  }
  return out;
}

std::string report_markdown(const std::vector<MatrixRow>& rows) {
  std::string out = "| Method | Episodes | SR (%) | SPL | Kendall Tau |\n|---|---:|---:|---:|---:|\n";
  for (const auto& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "| %s | %d | %.2f | %.3f | %s |\n", r.name.c_str(), r.metrics.n_episodes,
                  100.0 * r.metrics.sr, r.metrics.spl,
                  r.kendall_applies && r.metrics.kendall_tau ? fixed(*r.metrics.kendall_tau).substr(0, 5).c_str()
                                                             : "N/A");
    out += buf;
  }
  return out;
}

}  // namespace saynav
