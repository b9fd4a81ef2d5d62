#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace saynav {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::string to_lower(std::string_view s);

/// Category names may contain spaces; ids use underscores.
std::string id_token(std::string_view category);

inline bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace saynav
