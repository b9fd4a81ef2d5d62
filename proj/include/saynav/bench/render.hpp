#pragma once

#include <string>
#include <vector>

#include "saynav/house_sim/house.hpp"

namespace saynav {

struct RenderOptions {
  double pixels_per_meter = 40.0;
  /// Categories drawn as highlighted targets.
  std::vector<std::string> targets;
};

/// Top-down SVG of the house with the agent trajectory and found markers
/// taken from a JSON-lines trace. Throws std::invalid_argument when the
/// trace header names another house.
std::string render_topdown(const House& house, const std::vector<std::string>& trace, const RenderOptions& opts = {});

}  // namespace saynav
