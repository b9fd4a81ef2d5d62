#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "saynav/core/knowledge_base.hpp"
#include "saynav/house_sim/house.hpp"

namespace saynav {

struct HouseSpec {
  int num_rooms = 3;
  /// Requested room types with counts; remaining rooms are drawn at random.
  std::vector<std::pair<std::string, int>> room_type_mix;
  int min_objects_per_room = 2;
  int max_objects_per_room = 5;
  std::uint64_t rng_seed = 0;
  /// Target interior area per room, square meters.
  double area_per_room = 18.0;
  /// Shortest allowed interior side of a room, meters.
  double min_room_side = 2.5;
  /// Probability that a generated door starts open.
  double door_open_probability = 0.9;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds a house satisfying every validate_house() invariant, or throws
/// GenerationError. Deterministic in spec.rng_seed.
House generate_house(const HouseSpec& spec,
                     const KnowledgeBase& kb = KnowledgeBase::builtin());

}  // namespace saynav
