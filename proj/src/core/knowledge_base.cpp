#include "saynav/core/knowledge_base.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "saynav/core/strings.hpp"
#include "saynav_core_resources.hpp"

namespace saynav {
namespace {

double parse_score(std::string_view tok, int line) {
  tok = trim(tok);
  double v = 0.0;
  auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || end != tok.data() + tok.size()) {
    throw KnowledgeBaseError(line, "not a number: '" + std::string(tok) + "'");
  }
  return v;
}

void check_unit(double v, int line) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw KnowledgeBaseError(line, "score outside [0,1]");
  }
}

std::map<std::string, double, std::less<>> parse_pairs(std::string_view field, int line) {
  std::map<std::string, double, std::less<>> out;
  field = trim(field);
  if (field.empty() || field == "-") return out;
  for (auto item : split(field, ',')) {
    auto kv = split(item, ':');
    if (kv.size() != 2) throw KnowledgeBaseError(line, "expected name:score");
    double v = parse_score(kv[1], line);
    check_unit(v, line);
    out[std::string(trim(kv[0]))] = v;
  }
  return out;
}

}  // namespace

const KnowledgeBase& KnowledgeBase::builtin() {
  static const KnowledgeBase kb = parse(resources::objects_kb());
  return kb;
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open knowledge base " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

KnowledgeBase KnowledgeBase::parse(std::string_view text) {
  KnowledgeBase kb;
  int line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (starts_with(line, "rooms ")) {
      std::istringstream ss{std::string(line.substr(6))};
      std::string room;
      while (ss >> room) kb.room_types_.push_back(room);
      continue;
    }
    if (kb.room_types_.empty()) {
      throw KnowledgeBaseError(line_no, "row before the 'rooms' line");
    }

    auto fields = split(line, '|');
    if (fields.size() != 7) throw KnowledgeBaseError(line_no, "expected 7 fields");

    CategoryInfo info;
    info.name = std::string(trim(fields[0]));
    auto cls = trim(fields[1]);
    if (cls == "large") {
      info.size_class = SizeClass::Large;
    } else if (cls == "small") {
      info.size_class = SizeClass::Small;
    } else {
      throw KnowledgeBaseError(line_no, "class must be large or small");
    }
    info.max_dimension = parse_score(fields[2], line_no);
    if (info.max_dimension <= 0) throw KnowledgeBaseError(line_no, "size must be positive");
    info.z = parse_score(fields[3], line_no);

    std::istringstream priors{std::string(fields[4])};
    std::string tok;
    while (priors >> tok) {
      double v = parse_score(tok, line_no);
      check_unit(v, line_no);
      info.room_prior.push_back(v);
    }
    if (info.room_prior.size() != kb.room_types_.size()) {
      throw KnowledgeBaseError(line_no, "room prior count does not match rooms line");
    }
    if (std::none_of(info.room_prior.begin(), info.room_prior.end(),
                     [](double v) { return v > 0; })) {
      throw KnowledgeBaseError(line_no, "category has no room prior");
    }
    info.near = parse_pairs(fields[5], line_no);
    info.signature = parse_pairs(fields[6], line_no);
    for (const auto& [room, vote] : info.signature) {
      if (!kb.is_room_type(room)) throw KnowledgeBaseError(line_no, "unknown room " + room);
    }
    if (kb.index_.count(info.name)) throw KnowledgeBaseError(line_no, "duplicate " + info.name);
    kb.index_[info.name] = kb.categories_.size();
    kb.categories_.push_back(std::move(info));
  }

  for (const auto& c : kb.categories_) {
    for (const auto& [landmark, score] : c.near) {
      if (!kb.is_landmark(landmark)) {
        throw KnowledgeBaseError(0, c.name + " references unknown landmark " + landmark);
      }
    }
  }
  return kb;
}

bool KnowledgeBase::is_room_type(std::string_view label) const {
  return room_type_index(label) >= 0;
}

int KnowledgeBase::room_type_index(std::string_view label) const {
  auto it = std::find(room_types_.begin(), room_types_.end(), label);
  return it == room_types_.end() ? -1 : static_cast<int>(it - room_types_.begin());
}

const CategoryInfo* KnowledgeBase::find(std::string_view category) const {
  auto it = index_.find(category);
  return it == index_.end() ? nullptr : &categories_[it->second];
}

bool KnowledgeBase::is_landmark(std::string_view category) const {
  const auto* c = find(category);
  return c != nullptr && c->size_class == SizeClass::Large;
}

double KnowledgeBase::room_prior(std::string_view category,
                                 std::string_view room_type) const {
  const auto* c = find(category);
  int idx = room_type_index(room_type);
  if (c == nullptr || idx < 0) return 0.0;
  return c->room_prior[static_cast<std::size_t>(idx)];
}

double KnowledgeBase::landmark_prior(std::string_view object,
                                     std::string_view landmark) const {
  const auto* c = find(object);
  if (c == nullptr) return 0.0;
  auto it = c->near.find(landmark);
  return it == c->near.end() ? 0.0 : it->second;
}

double KnowledgeBase::signature_vote(std::string_view landmark,
                                     std::string_view room_type) const {
  const auto* c = find(landmark);
  if (c == nullptr) return 0.0;
  auto it = c->signature.find(room_type);
  return it == c->signature.end() ? 0.0 : it->second;
}

std::vector<std::string> KnowledgeBase::landmark_categories() const {
  std::vector<std::string> out;
  for (const auto& c : categories_) {
    if (c.size_class == SizeClass::Large) out.push_back(c.name);
  }
  return out;
}

std::vector<std::string> KnowledgeBase::small_categories() const {
  std::vector<std::string> out;
  for (const auto& c : categories_) {
    if (c.size_class == SizeClass::Small) out.push_back(c.name);
  }
  return out;
}

}  // namespace saynav
