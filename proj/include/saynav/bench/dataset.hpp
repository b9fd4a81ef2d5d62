#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "saynav/agent/episode.hpp"
#include "saynav/house_sim/house.hpp"

namespace saynav {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetSpec {
  int num_episodes = 100;
  int min_rooms = 3;
  int max_rooms = 10;
  std::uint64_t seed = 0;
  std::string data_type = "test";
  int min_objects_per_room = 2;
  int max_objects_per_room = 5;
  /// Sub-seeds tried per episode before giving up.
  int max_attempts = 16;

  void validate() const;
};

struct TargetOrder {
  std::vector<std::string> order;
  double length = 0.0;
};

/// Cheapest visiting order of the targets from `start`, by enumerating every
/// permutation with A* legs between resolved goal cells. Ties keep the
/// lexicographically first order of categories.
TargetOrder optimal_target_order(const House& house, Vec2 start, const std::vector<EpisodeTarget>& targets);

/// Length of the route through the targets in the given category order.
double route_length(const House& house, Vec2 start, const std::vector<EpisodeTarget>& targets,
                    const std::vector<std::string>& order);

Episode generate_episode(const DatasetSpec& spec, int index);

/// Episodes are independent; `parallel` spreads them over OpenMP threads and
/// gives the same result as the serial loop.
std::vector<Episode> generate_dataset(const DatasetSpec& spec, bool parallel = true);

House house_for(const Episode& ep);

nlohmann::json episode_to_json(const Episode& ep);
/// Structural parse only; see verify_episode for the semantic checks.
Episode episode_from_json(const nlohmann::json& j);

/// Regenerates the house and checks targets, start and shortest path. Throws DatasetError.
void verify_episode(const Episode& ep, const House& house);

void save_dataset(const std::vector<Episode>& episodes, const std::filesystem::path& path);
std::vector<Episode> load_dataset(const std::filesystem::path& path, bool verify = true);

}  // namespace saynav
