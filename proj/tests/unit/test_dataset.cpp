#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "saynav/bench/dataset.hpp"

using namespace saynav;
namespace fs = std::filesystem;

namespace {

// Nearest BFS-reachable cell to a metric point, lowest index on ties.
Cell resolve_oracle(const OccupancyGrid& g, Cell from, Vec2 p) {
  auto d = oracle::bfs_distances(g, from);
  Cell best{};
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 0) continue;
    const double e = distance(cell_center(g.cell_at(i)), p);
    if (e < best_d - 1e-12) {
      best_d = e;
      best = g.cell_at(i);
    }
  }
  return best;
}

// Enumerates all orders with BFS legs; returns the shortest length.
double best_route_oracle(const House& h, Vec2 start, const std::vector<EpisodeTarget>& targets,
                         std::vector<std::string>* best_order = nullptr) {
  std::vector<std::size_t> idx(targets.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  double best = std::numeric_limits<double>::infinity();
  do {
    Cell at = cell_of(start);
    int edges = 0;
    for (auto i : idx) {
      Cell goal = resolve_oracle(h.grid(), at, targets[i].position.xy());
      edges += *oracle::bfs_edges(h.grid(), at, goal);
      at = goal;
    }
    if (edges * kCellSize < best - 1e-12) {
      best = edges * kCellSize;
      if (best_order) {
        best_order->clear();
        for (auto i : idx) best_order->push_back(targets[i].category);
      }
    }
  } while (std::next_permutation(idx.begin(), idx.end()));
  return best;
}

DatasetSpec tiny(int n, std::uint64_t seed) {
  DatasetSpec s;
  s.num_episodes = n;
  s.min_rooms = 3;
  s.max_rooms = 10;
  s.seed = seed;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("collinear targets are swept in order") {
    std::vector<std::string> rows{std::string(42, '#'), "#" + std::string(40, '.') + "#", std::string(42, '#')};
    House h(5, OccupancyGrid::from_ascii(rows), {{0, {1, 1, 40, 1}, "hallway"}}, {},
            {fixture::object(0, "pen", cell_center({30, 1}), 0), fixture::object(1, "book", cell_center({10, 1}), 0),
             fixture::object(2, "key", cell_center({20, 1}), 0)});
    std::vector<EpisodeTarget> t;
    for (const auto& o : h.objects()) t.push_back({o.category, o.position});
    auto best = optimal_target_order(h, cell_center({1, 1}), t);
    CHECK(best.order == std::vector<std::string>{"book", "key", "pen"});
    CHECK(best.length == 29 * kCellSize);
    std::vector<std::string> oracle_order;
    CHECK(best_route_oracle(h, cell_center({1, 1}), t, &oracle_order) == best.length);
    CHECK(oracle_order == best.order);
  }

  TEST_CASE("property: stored shortest path equals the permutation oracle") {
    auto eps = generate_dataset(tiny(15, 77), false);
    for (const auto& ep : eps) {
      House h = house_for(ep);
      CHECK(ep.num_targets == 3);
      CHECK(ep.targets.size() == 3);
      CHECK(static_cast<int>(h.rooms().size()) == ep.num_rooms);
      CHECK(ep.num_rooms >= 3);
      CHECK(ep.num_rooms <= 10);
      CHECK(ep.shortest_path_length == doctest::Approx(best_route_oracle(h, ep.start_position, ep.targets)).epsilon(1e-12));
      CHECK(route_length(h, ep.start_position, ep.targets, ep.shortest_path_targets_order) ==
            doctest::Approx(ep.shortest_path_length));
      CHECK_NOTHROW(verify_episode(ep, h));
    }
  }

  TEST_CASE("target categories are distinct and unique in their house") {
    for (const auto& ep : generate_dataset(tiny(10, 5), false)) {
      House h = house_for(ep);
      std::set<std::string> cats;
      for (const auto& t : ep.targets) {
        cats.insert(t.category);
        CHECK(std::count_if(h.objects().begin(), h.objects().end(),
                            [&](const ObjectInstance& o) { return o.category == t.category; }) == 1);
      }
      CHECK(cats.size() == 3);
    }
  }

  TEST_CASE("round trip and byte-identical regeneration") {
    const auto dir = fs::temp_directory_path() / "saynav_dataset_test";
    fs::create_directories(dir);
    auto eps = generate_dataset(tiny(8, 3), false);
    save_dataset(eps, dir / "a.jsonl");
    save_dataset(generate_dataset(tiny(8, 3), false), dir / "b.jsonl");
    CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
    auto back = load_dataset(dir / "a.jsonl");
    CHECK(back == eps);
    for (std::size_t i = 0; i < eps.size(); ++i) CHECK(episode_to_json(back[i]) == episode_to_json(eps[i]));
    fs::remove_all(dir);
  }

  TEST_CASE("corrupt files are rejected") {
    const auto dir = fs::temp_directory_path() / "saynav_dataset_corrupt";
    fs::create_directories(dir);
    auto eps = generate_dataset(tiny(3, 9), false);
    auto write = [&](const std::vector<Episode>& e) { save_dataset(e, dir / "c.jsonl"); };

    SUBCASE("tampered shortest path") {
      auto bad = eps;
      bad[1].shortest_path_length += 0.25;
      write(bad);
      CHECK_THROWS_AS(load_dataset(dir / "c.jsonl"), DatasetError);
      CHECK_NOTHROW(load_dataset(dir / "c.jsonl", false));
    }
    SUBCASE("suboptimal order") {
      auto bad = eps;
      auto& ep = bad[0];
      std::reverse(ep.shortest_path_targets_order.begin(), ep.shortest_path_targets_order.end());
      ep.shortest_path_length = route_length(house_for(ep), ep.start_position, ep.targets, ep.shortest_path_targets_order);
      write(bad);
      const auto best = optimal_target_order(house_for(eps[0]), eps[0].start_position, eps[0].targets);
      if (ep.shortest_path_length > best.length + 1e-6) CHECK_THROWS_AS(load_dataset(dir / "c.jsonl"), DatasetError);
    }
    SUBCASE("moved target") {
      auto bad = eps;
      bad[2].targets[0].position.x += 0.5;
      write(bad);
      CHECK_THROWS_AS(load_dataset(dir / "c.jsonl"), DatasetError);
    }
    SUBCASE("unknown schema version") {
      auto j = episode_to_json(eps[0]);
      j["schema_version"] = kEpisodeSchemaVersion + 1;
      CHECK_THROWS(episode_from_json(j));
    }
    SUBCASE("missing field") {
      auto j = episode_to_json(eps[0]);
      j.erase("targets");
      CHECK_THROWS(episode_from_json(j));
    }
    SUBCASE("not json") {
      std::ofstream(dir / "c.jsonl") << "{\"data_type\": \n";
      CHECK_THROWS_AS(load_dataset(dir / "c.jsonl"), DatasetError);
    }
    fs::remove_all(dir);
  }

  TEST_CASE("episode json uses the documented field names") {
    auto j = episode_to_json(generate_dataset(tiny(1, 1), false).front());
    for (const char* k : {"data_type", "house_idx", "num_rooms", "num_targets", "targets", "start_position",
                          "start_heading", "shortest_path_targets_order", "shortest_path_length"}) {
      CHECK_MESSAGE(j.contains(k), k);
    }
  }

  TEST_CASE("spec validation") {
    auto s = tiny(0, 1);
    CHECK_THROWS(s.validate());
    s = tiny(1, 1);
    s.min_rooms = 5;
    s.max_rooms = 4;
    CHECK_THROWS(s.validate());
    s = tiny(1, 1);
    s.data_type = "train";
    CHECK_THROWS(s.validate());
  }
}
