#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "saynav/house_sim/house.hpp"

namespace saynav {

inline constexpr int kHouseSchemaVersion = 1;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rooms, doors and objects verbatim; the grid run-length encoded row-major
/// as [cell_type, count] pairs.
nlohmann::json house_to_json(const House& house);
House house_from_json(const nlohmann::json& j);

void save_house(const House& house, const std::filesystem::path& path);
House load_house(const std::filesystem::path& path);

}  // namespace saynav
