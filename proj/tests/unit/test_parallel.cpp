#include <doctest.h>

#include "saynav/bench/dataset.hpp"
#include "saynav/bench/matrix.hpp"

using namespace saynav;

namespace {

std::vector<Episode> dataset(int n) {
  DatasetSpec spec;
  spec.num_episodes = n;
  spec.seed = 2718;
  return generate_dataset(spec, false);
}

}  // namespace

TEST_SUITE("parallel") {
  TEST_CASE("OpenMP dataset generation equals the serial loop") {
    DatasetSpec spec;
    spec.num_episodes = 12;
    spec.seed = 2718;
    auto serial = generate_dataset(spec, false);
    auto parallel = generate_dataset(spec, true);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(episode_to_json(serial[i]).dump() == episode_to_json(parallel[i]).dump());
    }
  }

  TEST_CASE("OpenMP episode runs equal the serial loop") {
    auto eps = dataset(10);
    auto houses = build_houses(eps, true);
    REQUIRE(houses == build_houses(eps, false));
    for (const auto& entry : standard_matrix(Backend::Heuristic, MemoryMode::GraphAnnotation, 3)) {
      auto a = run_entry(eps, houses, entry, false);
      auto b = run_entry(eps, houses, entry, true);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].to_json(true).dump() == b[i].to_json(true).dump());
    }
  }

  TEST_CASE("matrix shape") {
    auto eps = dataset(10);
    auto rows = run_matrix(eps, standard_matrix(Backend::Heuristic, MemoryMode::GraphAnnotation, 1));
    REQUIRE(rows.size() == 5);
    CHECK_FALSE(rows[0].kendall_applies);
    for (const auto& r : rows) {
      CHECK(r.metrics.n_episodes == 10);
      CHECK(r.metrics.sr >= 0.0);
      CHECK(r.metrics.sr <= 1.0);
      CHECK(r.metrics.spl <= 1.0);
      if (r.kendall_applies && r.metrics.n_success > 0) {
        REQUIRE(r.metrics.kendall_tau);
        CHECK(*r.metrics.kendall_tau >= -1.0);
        CHECK(*r.metrics.kendall_tau <= 1.0);
      }
    }
    CHECK_THROWS_AS(run_matrix(eps, {}), std::invalid_argument);
    CHECK_THROWS_AS(run_matrix({}, standard_matrix(Backend::Heuristic, MemoryMode::GraphAnnotation, 1)),
                    std::invalid_argument);
  }

  TEST_CASE("baseline with the oracle succeeds on solvable episodes") {
    auto eps = dataset(10);
    for (const auto& ep : eps) {
      House h = house_for(ep);
      auto r = run_baseline(h, ep, LowLevelKind::OrNav, 0);
      CHECK(r.success);
      auto s = score_episode(ep, r);
      CHECK(spl_term(r.success, s.shortest, s.actual) > 0.8);
    }
  }

  TEST_CASE("crashing episodes are recorded as failures") {
    auto eps = dataset(2);
    std::vector<House> houses(2);
    houses[0] = house_for(eps[0]);
    auto res = run_entry(eps, houses, MatrixEntry::saynav(RunConfig{}), true);
    CHECK(res[1].failure_reason == FailureReason::NavError);
    CHECK_FALSE(res[1].error.empty());
  }
}
