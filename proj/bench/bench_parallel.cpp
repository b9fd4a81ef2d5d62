// Serial vs OpenMP timings for dataset generation and one matrix entry.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "saynav/bench/dataset.hpp"
#include "saynav/bench/matrix.hpp"

using namespace saynav;

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  DatasetSpec spec;
  spec.num_episodes = argc > 1 ? std::atoi(argv[1]) : 40;
  spec.seed = 99;
  std::printf("threads: %d, episodes: %d\n", omp_get_max_threads(), spec.num_episodes);

  std::vector<Episode> serial, parallel;
  const double gs = seconds([&] { serial = generate_dataset(spec, false); });
  const double gp = seconds([&] { parallel = generate_dataset(spec, true); });
  bool same = serial == parallel;
  std::printf("gen-dataset   serial %8.3fs  openmp %8.3fs  speedup %5.2fx  equal %s\n", gs, gp, gs / gp,
              same ? "yes" : "NO");

  const auto houses = build_houses(serial);
  RunConfig cfg;
  cfg.scene_graph = SceneGraphMode::VO;
  cfg.low_level = LowLevelKind::PNavS;
  cfg.seed = 1;
  const auto entry = MatrixEntry::saynav(cfg);
  std::vector<EpisodeResult> a, b;
  const double rs = seconds([&] { a = run_entry(serial, houses, entry, false); });
  const double rp = seconds([&] { b = run_entry(serial, houses, entry, true); });
  bool same_runs = a.size() == b.size();
  for (std::size_t i = 0; same_runs && i < a.size(); ++i) same_runs = a[i].to_json(true).dump() == b[i].to_json(true).dump();
  std::printf("run vo-pnavs  serial %8.3fs  openmp %8.3fs  speedup %5.2fx  equal %s\n", rs, rp, rs / rp,
              same_runs ? "yes" : "NO");
  return same && same_runs ? 0 : 1;
}
