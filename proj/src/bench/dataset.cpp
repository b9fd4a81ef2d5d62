#include "saynav/bench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "saynav/core/rng.hpp"
#include "saynav/house_sim/generator.hpp"
#include "saynav/low_planner/astar.hpp"
#include "saynav/low_planner/point_nav.hpp"

namespace saynav {
namespace {

const EpisodeTarget& target_named(const std::vector<EpisodeTarget>& targets, const std::string& c) {
  for (const auto& t : targets) {
    if (t.category == c) return t;
  }
  throw DatasetError("order names unknown target '" + c + "'");
}

HouseSpec house_spec_for(const DatasetSpec& spec, int num_rooms, std::uint64_t seed) {
  HouseSpec h;
  h.num_rooms = num_rooms;
  h.rng_seed = seed;
  h.min_objects_per_room = spec.min_objects_per_room;
  h.max_objects_per_room = spec.max_objects_per_room;
  return h;
}

}  // namespace

void DatasetSpec::validate() const {
  if (num_episodes < 1) throw std::invalid_argument("dataset needs at least one episode");
  if (min_rooms < 1 || max_rooms < min_rooms) throw std::invalid_argument("bad room count range");
  if (data_type != "val" && data_type != "test") throw std::invalid_argument("data_type must be val or test");
  if (max_attempts < 1) throw std::invalid_argument("max_attempts must be positive");
}

double route_length(const House& house, Vec2 start, const std::vector<EpisodeTarget>& targets,
                    const std::vector<std::string>& order) {
  const auto& grid = house.grid();
  Cell at = cell_of(start);
  double total = 0.0;
  for (const auto& c : order) {
    const auto& t = target_named(targets, c);
    auto goal = resolve_goal_cell(grid, at, t.position.xy());
    auto path = goal ? astar_path(grid, at, *goal) : std::nullopt;
    if (!path) throw DatasetError("target '" + c + "' is unreachable");
    total += path->length();
    at = *goal;
  }
  return total;
}

TargetOrder optimal_target_order(const House& house, Vec2 start, const std::vector<EpisodeTarget>& targets) {
  std::vector<std::string> order;
  for (const auto& t : targets) order.push_back(t.category);
  std::sort(order.begin(), order.end());
  TargetOrder best;
  bool first = true;
  do {
    const double len = route_length(house, start, targets, order);
    if (first || len < best.length - 1e-9) {
      best = {order, len};
      first = false;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

Episode generate_episode(const DatasetSpec& spec, int index) {
  spec.validate();
  const auto idx = static_cast<std::uint64_t>(index);
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    const auto a = static_cast<std::uint64_t>(attempt);
    Rng rng = make_rng(spec.seed, {idx, a, 0x65});
    const int rooms = std::uniform_int_distribution<int>(spec.min_rooms, spec.max_rooms)(rng);
    const HouseSpec hs = house_spec_for(spec, rooms, derive_seed(spec.seed, {idx, a}));
    House house;
    try {
      house = generate_house(hs);
    } catch (const GenerationError&) {
      continue;
    }

    // Targets are small objects whose category occurs exactly once, so the
    // stored position names the only instance that counts.
    std::map<std::string, std::vector<const ObjectInstance*>> by_category;
    for (const auto& o : house.objects()) by_category[o.category].push_back(&o);
    std::vector<const ObjectInstance*> pool;
    for (const auto& [cat, list] : by_category) {
      if (list.size() == 1 && !KnowledgeBase::builtin().is_landmark(cat)) pool.push_back(list.front());
    }
    if (pool.size() < 3) continue;
    std::shuffle(pool.begin(), pool.end(), rng);

    std::vector<Cell> starts;
    for (std::size_t i = 0; i < house.grid().size(); ++i) {
      const Cell c = house.grid().cell_at(i);
      if (house.grid().at(c) == CellType::Free && house.room_at(c)) starts.push_back(c);
    }
    if (starts.empty()) continue;

    Episode ep;
    ep.data_type = spec.data_type;
    ep.house_idx = index;
    ep.num_rooms = rooms;
    ep.num_targets = 3;
    for (int k = 0; k < 3; ++k) ep.targets.push_back({pool[k]->category, pool[k]->position});
    ep.start_position = cell_center(starts[std::uniform_int_distribution<std::size_t>(0, starts.size() - 1)(rng)]);
    ep.start_heading = 90 * std::uniform_int_distribution<int>(0, 3)(rng);
    ep.house_spec = hs;
    try {
      auto best = optimal_target_order(house, ep.start_position, ep.targets);
      ep.shortest_path_targets_order = best.order;
      ep.shortest_path_length = best.length;
    } catch (const DatasetError&) {
      continue;
    }
    if (!(ep.shortest_path_length > 0.0)) continue;
    return ep;
  }
  throw DatasetError("episode " + std::to_string(index) + ": no usable house after " +
                     std::to_string(spec.max_attempts) + " attempts");
}

std::vector<Episode> generate_dataset(const DatasetSpec& spec, bool parallel) {
  spec.validate();
  std::vector<Episode> out(static_cast<std::size_t>(spec.num_episodes));
  std::vector<std::string> errors(out.size());
  const int n = spec.num_episodes;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = generate_episode(spec, i);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw DatasetError(e);
  }
  return out;
}

House house_for(const Episode& ep) { return generate_house(ep.house_spec); }

nlohmann::json episode_to_json(const Episode& ep) {
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& t : ep.targets) {
    targets.push_back({{"category", t.category}, {"position", {t.position.x, t.position.y, t.position.z}}});
  }
  return {{"schema_version", kEpisodeSchemaVersion},
          {"data_type", ep.data_type},
          {"house_idx", ep.house_idx},
          {"num_rooms", ep.num_rooms},
          {"num_targets", ep.num_targets},
          {"targets", targets},
          {"start_position", {ep.start_position.x, ep.start_position.y}},
          {"start_heading", ep.start_heading},
          {"shortest_path_targets_order", ep.shortest_path_targets_order},
          {"shortest_path_length", ep.shortest_path_length},
          {"house_seed", ep.house_spec.rng_seed},
          {"house_spec",
           {{"num_rooms", ep.house_spec.num_rooms},
            {"min_objects_per_room", ep.house_spec.min_objects_per_room},
            {"max_objects_per_room", ep.house_spec.max_objects_per_room},
            {"area_per_room", ep.house_spec.area_per_room},
            {"min_room_side", ep.house_spec.min_room_side},
            {"door_open_probability", ep.house_spec.door_open_probability}}}};
}

Episode episode_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kEpisodeSchemaVersion) {
      throw DatasetError("unsupported episode schema_version " + j.at("schema_version").dump());
    }
    Episode ep;
    ep.data_type = j.at("data_type").get<std::string>();
    ep.house_idx = j.at("house_idx").get<int>();
    ep.num_rooms = j.at("num_rooms").get<int>();
    ep.num_targets = j.at("num_targets").get<int>();
    for (const auto& t : j.at("targets")) {
      const auto& p = t.at("position");
      ep.targets.push_back({t.at("category").get<std::string>(),
                            {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()}});
    }
    const auto& s = j.at("start_position");
    ep.start_position = {s.at(0).get<double>(), s.at(1).get<double>()};
    ep.start_heading = j.at("start_heading").get<int>();
    ep.shortest_path_targets_order = j.at("shortest_path_targets_order").get<std::vector<std::string>>();
    ep.shortest_path_length = j.at("shortest_path_length").get<double>();
    const auto& hs = j.at("house_spec");
    ep.house_spec.rng_seed = j.at("house_seed").get<std::uint64_t>();
    ep.house_spec.num_rooms = hs.at("num_rooms").get<int>();
    ep.house_spec.min_objects_per_room = hs.at("min_objects_per_room").get<int>();
    ep.house_spec.max_objects_per_room = hs.at("max_objects_per_room").get<int>();
    ep.house_spec.area_per_room = hs.at("area_per_room").get<double>();
    ep.house_spec.min_room_side = hs.at("min_room_side").get<double>();
    ep.house_spec.door_open_probability = hs.at("door_open_probability").get<double>();
    return ep;
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(std::string("malformed episode: ") + e.what());
  }
}

void verify_episode(const Episode& ep, const House& house) {
  const std::string who = "episode " + std::to_string(ep.house_idx) + ": ";
  if (ep.data_type != "val" && ep.data_type != "test") throw DatasetError(who + "bad data_type");
  if (ep.num_targets != 3 || ep.targets.size() != 3) throw DatasetError(who + "expected 3 targets");
  if (ep.num_rooms != static_cast<int>(house.rooms().size())) throw DatasetError(who + "num_rooms mismatch");
  if (ep.start_heading % 90 != 0 || ep.start_heading < 0 || ep.start_heading >= 360) {
    throw DatasetError(who + "start_heading must be 0, 90, 180 or 270");
  }
  std::vector<std::string> cats;
  for (const auto& t : ep.targets) {
    cats.push_back(t.category);
    const bool present = std::any_of(house.objects().begin(), house.objects().end(), [&](const auto& o) {
      return o.category == t.category && distance(o.position.xy(), t.position.xy()) < 1e-6;
    });
    if (!present) throw DatasetError(who + "target '" + t.category + "' not in the house");
  }
  std::sort(cats.begin(), cats.end());
  if (std::adjacent_find(cats.begin(), cats.end()) != cats.end()) throw DatasetError(who + "duplicate target category");
  auto order = ep.shortest_path_targets_order;
  std::sort(order.begin(), order.end());
  if (order != cats) throw DatasetError(who + "order is not a permutation of the targets");
  if (!house.grid().traversable(cell_of(ep.start_position))) throw DatasetError(who + "start is not free");

  const double stored = route_length(house, ep.start_position, ep.targets, ep.shortest_path_targets_order);
  const auto best = optimal_target_order(house, ep.start_position, ep.targets);
  if (std::abs(stored - ep.shortest_path_length) > 1e-6 || std::abs(best.length - ep.shortest_path_length) > 1e-6) {
    throw DatasetError(who + "shortest_path_length does not match A*");
  }
}

void save_dataset(const std::vector<Episode>& episodes, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DatasetError("cannot write " + path.string());
  for (const auto& ep : episodes) out << episode_to_json(ep).dump() << '\n';
}

std::vector<Episode> load_dataset(const std::filesystem::path& path, bool verify) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path.string());
  std::vector<Episode> eps;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    eps.push_back(episode_from_json(j));
  }
  if (verify) {
    std::vector<std::string> errors(eps.size());
    const int n = static_cast<int>(eps.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
      try {
        verify_episode(eps[static_cast<std::size_t>(i)], house_for(eps[static_cast<std::size_t>(i)]));
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw DatasetError(e);
    }
  }
  return eps;
}

}  // namespace saynav
