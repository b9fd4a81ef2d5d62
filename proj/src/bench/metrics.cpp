#include "saynav/bench/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace saynav {

double spl_term(bool success, double shortest, double actual) {
  if (!(shortest > 0.0)) throw std::invalid_argument("spl: shortest path must be positive");
  if (!(actual >= 0.0)) throw std::invalid_argument("spl: actual path must be non-negative");
  return success ? shortest / std::max(actual, shortest) : 0.0;
}

double spl(const std::vector<SplSample>& samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : samples) sum += spl_term(s.success, s.shortest, s.actual);
  return sum / static_cast<double>(samples.size());
}

double kendall_tau(const std::vector<std::string>& order, const std::vector<std::string>& reference) {
  const std::size_t n = order.size();
  if (n < 2 || reference.size() != n) throw std::invalid_argument("kendall_tau: need two orders of equal length >= 2");
  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < n; ++i) {
    if (!rank.emplace(reference[i], i).second) throw std::invalid_argument("kendall_tau: repeated item");
  }
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = rank.find(order[i]);
    if (it == rank.end()) throw std::invalid_argument("kendall_tau: orders hold different items");
    r[i] = it->second;
  }
  auto sorted = r;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("kendall_tau: repeated item");
  }
  int discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (r[i] > r[j]) ++discordant;
    }
  }
  const double pairs = static_cast<double>(n * (n - 1) / 2);
  return 1.0 - 2.0 * discordant / pairs;
}

EpisodeScore score_episode(const Episode& ep, const EpisodeResult& res) {
  EpisodeScore s;
  s.episode = ep.house_idx;
  s.success = res.success;
  s.shortest = ep.shortest_path_length;
  s.actual = res.path_length;
  for (const auto& f : res.found) s.found_order.push_back(f.category);
  s.optimal_order = ep.shortest_path_targets_order;
  return s;
}

MetricsSummary summarize(const std::vector<EpisodeScore>& scores, bool kendall_applies) {
  MetricsSummary m;
  m.n_episodes = static_cast<int>(scores.size());
  std::vector<SplSample> samples;
  double tau_sum = 0.0;
  for (const auto& s : scores) {
    samples.push_back({s.success, s.shortest, s.actual});
    if (!s.success) continue;
    ++m.n_success;
    if (s.actual == 0.0) ++m.degenerate;
    if (kendall_applies) tau_sum += kendall_tau(s.found_order, s.optimal_order);
  }
  if (m.n_episodes > 0) m.sr = static_cast<double>(m.n_success) / m.n_episodes;
  m.spl = spl(samples);
  if (kendall_applies && m.n_success > 0) m.kendall_tau = tau_sum / m.n_success;
  return m;
}

}  // namespace saynav
