#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace saynav {

enum class SizeClass { Large, Small };

/// Label used when a room's type cannot be inferred.
inline constexpr std::string_view kUnknownRoomType = "unknown";

struct CategoryInfo {
  std::string name;
  SizeClass size_class = SizeClass::Small;
  double max_dimension = 0.0;
  double z = 0.0;
  /// Indexed like KnowledgeBase::room_types().
  std::vector<double> room_prior;
  /// Landmark category -> likelihood of lying on or next to it.
  std::map<std::string, double, std::less<>> near;
  /// Room type -> vote, for landmarks only.
  std::map<std::string, double, std::less<>> signature;
};

class KnowledgeBaseError : public std::runtime_error {
 public:
  KnowledgeBaseError(int line, const std::string& what)
      : std::runtime_error("knowledge base line " + std::to_string(line) +
                           ": " + what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

/// Common-sense object/room priors. A single table feeds house generation,
/// the heuristic planner backend and test expectations.
class KnowledgeBase {
 public:
  /// The table compiled into the binary from data/kb/objects.kb.
  static const KnowledgeBase& builtin();

  static KnowledgeBase parse(std::string_view text);
  static KnowledgeBase load(const std::filesystem::path& path);

  const std::vector<std::string>& room_types() const { return room_types_; }
  bool is_room_type(std::string_view label) const;
  int room_type_index(std::string_view label) const;

  const std::vector<CategoryInfo>& categories() const { return categories_; }
  const CategoryInfo* find(std::string_view category) const;
  bool is_landmark(std::string_view category) const;

  /// 0 for unknown categories or room types.
  double room_prior(std::string_view category, std::string_view room_type) const;
  double landmark_prior(std::string_view object, std::string_view landmark) const;
  double signature_vote(std::string_view landmark, std::string_view room_type) const;

  std::vector<std::string> landmark_categories() const;
  std::vector<std::string> small_categories() const;

 private:
  std::vector<std::string> room_types_;
  std::vector<CategoryInfo> categories_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace saynav
