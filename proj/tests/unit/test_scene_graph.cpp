#include <doctest.h>

#include <fstream>
#include <limits>
#include <sstream>

#include "generators.hpp"
#include "oracles.hpp"
#include "fixtures.hpp"
#include "saynav/low_planner/astar.hpp"
#include "saynav/scene_graph/scene_graph.hpp"

using namespace saynav;

namespace {

Percept obj(std::string cat, Vec3 p, double size) {
  Percept q;
  q.kind = EntityKind::Object;
  q.category = std::move(cat);
  q.position = p;
  q.size = size;
  return q;
}

Observation obs_of(std::vector<Percept> ps, int step = 0) {
  Observation o;
  o.pose.step_count = step;
  o.percepts = std::move(ps);
  return o;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("scene-graph") {
  TEST_CASE("size classification") {
    CHECK(classify_size("dining table", 1.6) == SizeClass::Large);
    CHECK(classify_size("spoon", 0.15) == SizeClass::Small);
    CHECK(classify_size("floor lamp", 1.5) == SizeClass::Large);
    CHECK(classify_size("floor lamp", 0.5) == SizeClass::Small);
    CHECK(classify_size("bed", std::nullopt) == SizeClass::Large);
    CHECK_THROWS_AS(classify_size("floor lamp", std::nullopt), std::invalid_argument);
    CHECK_THROWS_AS(classify_size("spoon", 0.0), std::invalid_argument);
  }

  TEST_CASE("small object next to a landmark gets a near edge") {
    SceneGraph g;
    NodeId r = g.add_room();
    NodeId desk = g.add_large("desk", {2.2, 1.1, 0}, r);
    auto o = obs_of({obj("laptop", {2, 1, 0.7}, 0.35)});
    auto delta = g.integrate(o, r);
    REQUIRE(delta.created.size() == 1);
    const auto* s = g.small(delta.created.front());
    REQUIRE(s != nullptr);
    CHECK(s->relation == ParentRelation::Near);
    CHECK(s->parent == desk);
    CHECK(distance({2, 1}, {2.2, 1.1}) < g.config().near_radius);

    auto again = g.integrate(o, r);
    CHECK(again.empty());
    CHECK(again.duplicate);
  }

  TEST_CASE("small object without a landmark nearby goes into the room") {
    SceneGraph g;
    NodeId r = g.add_room();
    g.add_large("bed", {5, 5, 0}, r);
    auto delta = g.integrate(obs_of({obj("pillow", {1, 1, 0}, 0.5)}), r);
    REQUIRE(delta.created.size() == 1);
    const auto* s = g.small(delta.created.front());
    CHECK(s->relation == ParentRelation::In);
    CHECK(s->parent == r);
  }

  TEST_CASE("non-finite percepts are dropped one by one") {
    SceneGraph g;
    NodeId r = g.add_room();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto delta = g.integrate(obs_of({obj("bed", {nan, 1, 0}, 2.0), obj("desk", {3, 3, 0}, 1.4)}), r);
    CHECK(delta.rejected == 1);
    CHECK(g.large_nodes().size() == 1);
    CHECK(g.check_invariants().empty());
  }

  TEST_CASE("subgraph counts") {
    SceneGraph g;
    NodeId r = g.add_room();
    NodeId other = g.add_room();
    NodeId bed = g.add_large("bed", {1, 1, 0}, r);
    g.add_large("desk", {3, 1, 0}, r);
    g.add_small("pillow", {1, 1, 0.5}, bed, ParentRelation::Near);
    g.add_small("book", {1.2, 1, 0.5}, bed, ParentRelation::Near);
    g.add_small("pen", {2, 2, 0}, r, ParentRelation::In);
    g.add_door({0, 1, 0}, r, kUnexploredRoom, true);
    g.add_door({4, 1, 0}, r, other, true);
    g.add_large("fridge", {9, 9, 0}, other);
    auto sub = g.extract_subgraph(r);
    CHECK(sub.node_count() == 1 + 2 + 3);
    CHECK(sub.edge_count() == 3 + 2 + 2);
    for (const auto& l : sub.large) CHECK(l.category != "fridge");
  }

  TEST_CASE("empty room subgraph holds only its doors") {
    SceneGraph g;
    NodeId r = g.add_room();
    g.add_door({0, 1, 0}, r, kUnexploredRoom, true);
    auto sub = g.extract_subgraph(r);
    CHECK(sub.empty());
    CHECK(sub.doors.size() == 1);
    CHECK(subgraph_to_text(sub) == "room_1: unknown\nno objects observed\ndoor_2 (open)\n");
    CHECK_THROWS(g.extract_subgraph(99));
  }

  TEST_CASE("golden subgraph text") {
    SceneGraph g;
    NodeId r = g.add_room(std::nullopt, 10);
    g.room(r).room_type = "bedroom";
    g.add_large("bed", {1, 1, 0}, r, 1);
    g.add_small("pillow", {1, 1, 0.5}, 1, ParentRelation::Near, 2);
    g.add_large("desk", {3, 1, 0}, r, 3);
    g.add_small("laptop", {3, 1, 0.7}, 3, ParentRelation::Near, 4);
    g.add_door({0, 1, 0}, r, kUnexploredRoom, true, 5);
    const std::string text = subgraph_to_text(g.extract_subgraph(r));
    CHECK(text == read_file(SAYNAV_TEST_DATA "/golden/bedroom_subgraph.txt"));
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  }

  TEST_CASE("text does not depend on insertion order") {
    auto build = [](bool reversed) {
      SceneGraph g;
      NodeId r = g.add_room(std::nullopt, 1);
      std::vector<std::function<void()>> ops{
          [&] { g.add_large("bed", {1, 1, 0}, r, 2); },
          [&] { g.add_large("desk", {3, 1, 0}, r, 3); },
          [&] { g.add_door({0, 1, 0}, r, kUnexploredRoom, false, 4); },
          [&] { g.add_small("pen", {2, 2, 0}, r, ParentRelation::In, 5); },
          [&] { g.add_small("cup", {2, 3, 0}, r, ParentRelation::In, 6); },
      };
      if (reversed) std::reverse(ops.begin(), ops.end());
      for (auto& op : ops) op();
      return subgraph_to_text(g.extract_subgraph(r));
    };
    CHECK(build(false) == build(true));
    CHECK(build(false) == "room_1: unknown\nbed_2\ndesk_3\nloose: pen_5, cup_6\ndoor_4 (closed)\n");
  }

  TEST_CASE("door bookkeeping") {
    SceneGraph g;
    NodeId r = g.add_room();
    NodeId other = g.add_room();
    SUBCASE("all doors traversed means explored") {
      NodeId d = g.add_door({1, 0, 0}, r, kUnexploredRoom, true);
      CHECK_FALSE(g.all_doors_explored());
      g.connect_door(d, r, other);
      CHECK(g.door(d).traversed);
      CHECK(g.all_doors_explored());
      CHECK_THROWS_AS(g.find_next_unexplored_door([](Vec2) { return 1.0; }), SceneGraphError);
    }
    SUBCASE("closed door is never a candidate") {
      g.add_door({1, 0, 0}, r, kUnexploredRoom, false);
      CHECK(g.all_doors_explored());
    }
  }

  TEST_CASE("nearest unexplored door by path distance") {
    // A wall forces a detour, so the Euclidean-nearer door is farther by path.
    auto grid = OccupancyGrid::from_ascii({
        "..........",
        "..........",
        "...#######",
        "..........",
        "..........",
    });
    Cell agent{5, 3};
    Cell near_euclid{5, 1};
    Cell near_path{9, 4};
    SceneGraph g;
    NodeId r = g.add_room();
    NodeId a = g.add_door({cell_center(near_euclid).x, cell_center(near_euclid).y, 0}, r, kUnexploredRoom, true);
    NodeId b = g.add_door({cell_center(near_path).x, cell_center(near_path).y, 0}, r, kUnexploredRoom, true);
    DistanceFn dist = [&](Vec2 p) -> std::optional<double> {
      auto path = astar_path(grid, agent, cell_of(p));
      if (!path) return std::nullopt;
      return path->length();
    };
    const double da = *oracle::bfs_edges(grid, agent, near_euclid) * kCellSize;
    const double db = *oracle::bfs_edges(grid, agent, near_path) * kCellSize;
    REQUIRE(db < da);
    CHECK(*dist(cell_center(near_euclid)) == da);
    CHECK(g.find_next_unexplored_door(dist).id == b);
    CHECK(a != b);
  }

  TEST_CASE("json export lists every node and edge") {
    SceneGraph g;
    NodeId r = g.add_room();
    NodeId bed = g.add_large("bed", {1, 1, 0}, r);
    g.add_small("pillow", {1, 1, 0.5}, bed, ParentRelation::Near);
    auto j = g.to_json();
    CHECK(j.at("nodes").size() == g.node_count());
    CHECK(j.at("edges").size() == g.triplets().size());
  }

  TEST_CASE("property: idempotence, single parent and monotone knowledge") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      HouseSpec spec;
      spec.num_rooms = 3 + static_cast<int>(seed % 6);
      spec.rng_seed = 500 + seed;
      House h = generate_house(spec);
      auto walk = gen::observation_walk(h, seed, 12, seed % 2 == 0);
      gen::Feeder f;
      std::size_t nodes = f.graph.node_count();
      std::map<NodeId, bool> traversed;
      for (const auto& st : walk) {
        f.feed(st);
        SceneGraph once = f.graph;
        auto again = f.graph.integrate(st.obs, f.node_for(st.gt_room));
        CHECK(again.empty());
        CHECK(f.graph == once);

        CHECK(f.graph.check_invariants().empty());
        std::map<NodeId, int> parents;
        for (const auto& t : f.graph.triplets()) {
          const bool known = t.relation == "in" || t.relation == "near" || t.relation.rfind("door_", 0) == 0;
          CHECK(known);
          if (t.relation == "in" || t.relation == "near") ++parents[t.subject];
        }
        for (const auto& [id, n] : parents) CHECK(n == 1);
        CHECK(parents.size() == f.graph.rooms().size() + f.graph.large_nodes().size() + f.graph.small_nodes().size());

        CHECK(f.graph.node_count() >= nodes);
        nodes = f.graph.node_count();
        for (const auto& [id, d] : f.graph.doors()) {
          if (traversed[id]) CHECK(d.traversed);
          traversed[id] = d.traversed;
        }
      }
    }
  }

  TEST_CASE("property: ground-truth mode never duplicates an object") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      HouseSpec spec;
      spec.num_rooms = 4;
      spec.rng_seed = 900 + seed;
      House h = generate_house(spec);
      gen::Feeder f;
      std::set<int> seen;
      for (const auto& st : gen::observation_walk(h, seed, 15, true)) {
        f.feed(st);
        for (const auto& p : st.obs.percepts) {
          if (p.kind == EntityKind::Object) seen.insert(p.truth_id);
        }
      }
      // Exact positions: one node per distinct (category, position) among the seen objects.
      std::set<std::pair<std::string, std::pair<double, double>>> distinct;
      for (int id : seen) {
        const auto& o = h.objects()[static_cast<std::size_t>(id)];
        distinct.insert({o.category, {o.position.x, o.position.y}});
      }
      CHECK(f.graph.large_nodes().size() + f.graph.small_nodes().size() <= distinct.size());
      for (int id : seen) {
        const auto& o = h.objects()[static_cast<std::size_t>(id)];
        int matches = 0;
        for (const auto& [nid, l] : f.graph.large_nodes()) {
          if (l.category == o.category && distance(l.position.xy(), o.position.xy()) < 1e-9) ++matches;
        }
        for (const auto& [nid, s] : f.graph.small_nodes()) {
          if (s.category == o.category && distance(s.position.xy(), o.position.xy()) < 1e-9) ++matches;
        }
        CHECK(matches == 1);
      }
    }
  }
}
