#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "saynav/house_sim/generator.hpp"
#include "saynav/house_sim/house_io.hpp"
#include "saynav/house_sim/simulator.hpp"

using namespace saynav;

namespace {

HouseSpec spec_of(int rooms, std::uint64_t seed) {
  HouseSpec s;
  s.num_rooms = rooms;
  s.rng_seed = seed;
  return s;
}

// Room adjacency over open doors, checked by plain union of edges.
bool rooms_connected(const House& h) {
  std::vector<int> comp(h.rooms().size());
  for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = static_cast<int>(i);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& d : h.doors()) {
      if (!d.open) continue;
      int m = std::min(comp[d.room_a], comp[d.room_b]);
      for (int* c : {&comp[d.room_a], &comp[d.room_b]}) {
        if (*c != m) {
          *c = m;
          changed = true;
        }
      }
    }
  }
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

}  // namespace

TEST_SUITE("house-sim") {
  TEST_CASE("three-room house is connected through at least two doors") {
    House h = generate_house(spec_of(3, 7));
    CHECK(h.rooms().size() == 3);
    CHECK(h.doors().size() >= 2);
    CHECK(rooms_connected(h));
    CHECK_NOTHROW(validate_house(h));
  }

  TEST_CASE("generation is deterministic in the seed") {
    House a = generate_house(spec_of(3, 7));
    House b = generate_house(spec_of(3, 7));
    CHECK(a == b);
    CHECK(house_to_json(a).dump() == house_to_json(b).dump());
    CHECK_FALSE(a == generate_house(spec_of(3, 8)));
  }

  TEST_CASE("every bedroom holds the categories the table guarantees there") {
    const auto& kb = KnowledgeBase::builtin();
    std::vector<std::string> certain;
    for (const auto& c : kb.categories()) {
      if (c.size_class == SizeClass::Large && kb.room_prior(c.name, "bedroom") >= 1.0) certain.push_back(c.name);
    }
    REQUIRE(std::find(certain.begin(), certain.end(), "bed") != certain.end());
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      HouseSpec s = spec_of(3, seed);
      s.room_type_mix = {{"bedroom", 1}};
      House h = generate_house(s);
      for (const auto& r : h.rooms()) {
        if (r.room_type != "bedroom") continue;
        for (const auto& cat : certain) {
          bool present = std::any_of(h.objects().begin(), h.objects().end(),
                                     [&](const ObjectInstance& o) { return o.room_id == r.id && o.category == cat; });
          CHECK_MESSAGE(present, "seed " << seed << " missing " << cat);
        }
      }
    }
  }

  TEST_CASE("generated houses satisfy invariants across sizes") {
    for (int rooms = 1; rooms <= 10; ++rooms) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        House h = generate_house(spec_of(rooms, seed * 31 + static_cast<std::uint64_t>(rooms)));
        CHECK(static_cast<int>(h.rooms().size()) == rooms);
        CHECK_NOTHROW(validate_house(h));
        CHECK(rooms_connected(h));
      }
    }
  }

  TEST_CASE("infeasible specs raise instead of returning a partial house") {
    CHECK_THROWS_AS(generate_house(spec_of(0, 1)), GenerationError);
    HouseSpec s = spec_of(2, 1);
    s.room_type_mix = {{"bedroom", 3}};
    CHECK_THROWS_AS(generate_house(s), GenerationError);
    s.room_type_mix = {{"throne_room", 1}};
    CHECK_THROWS_AS(generate_house(s), GenerationError);
  }

  TEST_CASE("turns rotate in place") {
    House h = fixture::one_room({});
    AgentState s{{4, 4}, Heading::East};
    auto r = step(h, s, Action::TurnLeft);
    CHECK(heading_degrees(r.state.heading) == 90);
    CHECK(r.state.cell == s.cell);
    CHECK(r.state.step_count == 1);
    AgentState t = s;
    for (int i = 0; i < 4; ++i) t = step(h, t, Action::TurnLeft).state;
    CHECK(t.heading == s.heading);
    CHECK(t.step_count == 4);
  }

  TEST_CASE("moving into a wall collides and stays put") {
    House h = fixture::one_room({});
    AgentState s{{1, 1}, Heading::West};
    auto r = step(h, s, Action::MoveForward);
    CHECK(r.collided);
    CHECK(r.state.cell == s.cell);
    CHECK(r.state.path_length == 0.0);
    CHECK(r.state.step_count == 1);
  }

  TEST_CASE("property: left then right is the identity up to step count") {
    House h = fixture::one_room({});
    for (int hd = 0; hd < 4; ++hd) {
      AgentState s{{3, 3}, static_cast<Heading>(hd), 5, 1.25};
      AgentState t = step(h, step(h, s, Action::TurnLeft).state, Action::TurnRight).state;
      t.step_count = s.step_count;
      CHECK(t == s);
    }
  }

  TEST_CASE("property: path length is a quarter meter per successful move") {
    House h = generate_house(spec_of(4, 11));
    std::mt19937_64 rng(3);
    auto cells = reachable_cells(h, fixture::first_free_cell(h));
    AgentState s{cells.front(), Heading::North};
    int moves = 0;
    for (int i = 0; i < 2000; ++i) {
      auto a = static_cast<Action>(std::uniform_int_distribution<int>(0, 2)(rng));
      auto r = step(h, s, a);
      if (a == Action::MoveForward && !r.collided) ++moves;
      s = r.state;
    }
    CHECK(s.path_length == moves * kCellSize);
    CHECK(s.step_count == 2000);
  }

  TEST_CASE("unobstructed object two meters away passes every gate") {
    // Agent at cell (4,6) centre (1.125, 1.625); object 2 m east.
    auto o = fixture::object(0, "armchair", {3.125, 1.625}, 0);
    o.max_dimension = 1.0;
    House h = fixture::one_room({o});
    AgentState s{{4, 6}, Heading::East};
    PerceptionConfig cfg;
    cfg.position_noise_sigma = 0.0;
    auto obs = look_around(h, s, cfg);
    auto it = std::find_if(obs.percepts.begin(), obs.percepts.end(),
                           [](const Percept& p) { return p.kind == EntityKind::Object; });
    REQUIRE(it != obs.percepts.end());
    CHECK(it->category == "armchair");
    CHECK(it->size / distance(s.position(), it->position.xy()) == doctest::Approx(0.5));
    CHECK(s.step_count == kLookAroundCost);
  }

  TEST_CASE("objects behind a wall are not seen") {
    // Closed door between the rooms: nothing in room 1 is visible from room 0.
    auto o = fixture::object(0, "fridge", {5.0, 1.625}, 1);
    House h = fixture::two_rooms({o}, 'X');
    AgentState s{{14, 6}, Heading::East};
    PerceptionConfig cfg;
    auto obs = look_around(h, s, cfg);
    for (const auto& p : obs.percepts) CHECK(p.kind != EntityKind::Object);
  }

  TEST_CASE("tiny distant object falls under the angular size gate") {
    // 0.05 m at 4 m subtends 0.0125 rad, below the 0.02 default.
    auto o = fixture::object(0, "pen", {5.125, 1.625}, 0);
    o.max_dimension = 0.05;
    House h = fixture::one_room({o}, 24, 12);
    AgentState s{cell_of({1.125, 1.625}), Heading::East};
    PerceptionConfig cfg;
    REQUIRE(0.05 / 4.0 < cfg.min_angular_size);
    auto obs = look_around(h, s, cfg);
    CHECK(std::none_of(obs.percepts.begin(), obs.percepts.end(),
                       [](const Percept& p) { return p.kind == EntityKind::Object; }));
    cfg.min_angular_size = 0.01;
    AgentState t{cell_of({1.125, 1.625}), Heading::East};
    auto wide = look_around(h, t, cfg);
    CHECK(std::any_of(wide.percepts.begin(), wide.percepts.end(),
                      [](const Percept& p) { return p.kind == EntityKind::Object; }));
  }

  TEST_CASE("property: ground-truth perception reports exact positions") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      House h = generate_house(spec_of(5, seed));
      PerceptionConfig cfg;
      cfg.gt_mode = true;
      auto cells = reachable_cells(h, fixture::first_free_cell(h));
      AgentState s{cells[cells.size() / 2], Heading::East};
      auto obs = look_around(h, s, cfg);
      for (const auto& p : obs.percepts) {
        if (p.kind != EntityKind::Object) continue;
        CHECK(p.position == h.objects()[static_cast<std::size_t>(p.truth_id)].position);
      }
    }
  }

  TEST_CASE("property: larger range and smaller size gate never hide a percept") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      House h = generate_house(spec_of(4, 100 + seed));
      auto cells = reachable_cells(h, fixture::first_free_cell(h));
      std::mt19937_64 rng(seed);
      for (int k = 0; k < 5; ++k) {
        AgentState s{cells[std::uniform_int_distribution<std::size_t>(0, cells.size() - 1)(rng)], Heading::East};
        PerceptionConfig narrow;
        narrow.position_noise_sigma = 0;
        PerceptionConfig wide = narrow;
        wide.max_range = 8.0;
        wide.min_angular_size = 0.01;
        AgentState a = s, b = s;
        auto o1 = look_around(h, a, narrow);
        auto o2 = look_around(h, b, wide);
        for (const auto& p : o1.percepts) {
          if (p.kind == EntityKind::Wall) continue;
          bool kept = std::any_of(o2.percepts.begin(), o2.percepts.end(), [&](const Percept& q) {
            return q.kind == p.kind && q.truth_id == p.truth_id;
          });
          CHECK(kept);
        }
      }
    }
  }

  TEST_CASE("property: observations are determined by house, seed and actions") {
    House h = generate_house(spec_of(4, 5));
    auto run = [&] {
      PerceptionConfig cfg;
      cfg.noise_seed = 99;
      AgentState s{reachable_cells(h, fixture::first_free_cell(h)).front(), Heading::East};
      std::vector<Observation> out;
      std::mt19937_64 rng(1);
      for (int i = 0; i < 50; ++i) {
        s = step(h, s, static_cast<Action>(std::uniform_int_distribution<int>(0, 2)(rng))).state;
        if (i % 10 == 0) out.push_back(look_around(h, s, cfg));
      }
      return out;
    };
    CHECK(run() == run());
  }

  TEST_CASE("VO noise stays within three sigma") {
    House h = generate_house(spec_of(3, 21));
    PerceptionConfig cfg;
    cfg.noise_seed = 4;
    for (const auto& c : reachable_cells(h, fixture::first_free_cell(h))) {
      if (c.x % 3 || c.y % 3) continue;
      AgentState s{c, Heading::East};
      for (const auto& p : look_around(h, s, cfg).percepts) {
        if (p.kind != EntityKind::Object) continue;
        const auto& t = h.objects()[static_cast<std::size_t>(p.truth_id)].position;
        CHECK(std::abs(p.position.x - t.x) <= 3 * cfg.position_noise_sigma + 1e-12);
        CHECK(std::abs(p.position.y - t.y) <= 3 * cfg.position_noise_sigma + 1e-12);
      }
    }
  }

  TEST_CASE("flood fill matches a BFS oracle") {
    SUBCASE("single open room") {
      House h = fixture::one_room({}, 4, 4);
      CHECK(reachable_cells(h, {1, 1}).size() == 16);
    }
    SUBCASE("closed door keeps to the start room") {
      House h = fixture::two_rooms({}, 'X', 4, 4);
      auto cells = reachable_cells(h, {1, 1});
      CHECK(cells.size() == 16);
      for (auto c : cells) CHECK(h.room_at(c) == std::optional<int>(0));
    }
    SUBCASE("open door joins both rooms") {
      House h = fixture::two_rooms({}, 'D', 4, 4);
      auto cells = reachable_cells(h, {1, 1});
      CHECK(cells == oracle::bfs_reachable(h.grid(), {1, 1}));
      CHECK(cells.size() == 16 + 16 + 1);
    }
  }

  TEST_CASE("house json round-trips and rejects unknown schema versions") {
    House h = generate_house(spec_of(5, 3));
    auto j = house_to_json(h);
    CHECK(house_from_json(j) == h);
    auto bad = j;
    bad["schema_version"] = kHouseSchemaVersion + 1;
    CHECK_THROWS_AS(house_from_json(bad), SchemaError);

    auto path = std::filesystem::temp_directory_path() / "saynav_house_rt.json";
    save_house(h, path);
    CHECK(load_house(path) == h);
    std::filesystem::remove(path);
  }

  TEST_CASE("validate_house names a broken invariant") {
    House h = fixture::two_rooms({fixture::object(0, "bed", {30.0, 30.0}, 0)});
    CHECK_THROWS_AS(validate_house(h), std::logic_error);
  }
}
