#include "saynav/bench/render.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "saynav/core/knowledge_base.hpp"

namespace saynav {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_topdown(const House& house, const std::vector<std::string>& trace, const RenderOptions& opts) {
  const double s = opts.pixels_per_meter;
  const auto& grid = house.grid();
  const double w = grid.width() * kCellSize * s;
  const double h = grid.height() * kCellSize * s;
  auto X = [&](double x) { return num(x * s); };
  auto Y = [&](double y) { return num(h - y * s); };

  std::vector<nlohmann::json> events;
  for (const auto& line : trace) events.push_back(nlohmann::json::parse(line));
  for (const auto& e : events) {
    if (e.at("type") == "header" && e.at("payload").at("house_seed").get<std::uint64_t>() != house.seed()) {
      throw std::invalid_argument("trace belongs to another house");
    }
  }

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
                    "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  const double cs = kCellSize * s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Cell c = grid.cell_at(i);
    const char* fill = nullptr;
    switch (grid.at(c)) {
      case CellType::Wall: fill = "#333333"; break;
      case CellType::Door: fill = "#6abf69"; break;
      case CellType::ClosedDoor: fill = "#d9534f"; break;
      case CellType::Furniture: fill = "#c8b08a"; break;
      case CellType::Free: break;
    }
    if (fill == nullptr) continue;
    svg += "<rect class=\"cell\" x=\"" + X(c.x * kCellSize) + "\" y=\"" + Y((c.y + 1) * kCellSize) + "\" width=\"" +
           num(cs) + "\" height=\"" + num(cs) + "\" fill=\"" + fill + "\"/>\n";
  }
  for (const auto& r : house.rooms()) {
    const Rect b = r.bounds();
    svg += "<rect class=\"room\" x=\"" + X(b.min_x) + "\" y=\"" + Y(b.max_y) + "\" width=\"" + num(b.width() * s) +
           "\" height=\"" + num(b.height() * s) + "\" fill=\"none\" stroke=\"#888888\"/>\n";
    svg += "<text x=\"" + X(b.min_x + 0.1) + "\" y=\"" + Y(b.max_y - 0.3) + "\" font-size=\"10\" fill=\"#555555\">" +
           escape(r.room_type) + "</text>\n";
  }
  for (const auto& o : house.objects()) {
    const bool target = std::find(opts.targets.begin(), opts.targets.end(), o.category) != opts.targets.end();
    const bool landmark = KnowledgeBase::builtin().is_landmark(o.category);
    svg += "<circle class=\"object\" cx=\"" + X(o.position.x) + "\" cy=\"" + Y(o.position.y) + "\" r=\"" +
           num(landmark ? 4.0 : 2.5) + "\" fill=\"" + (target ? "#e67e22" : landmark ? "#8d6e63" : "#5c6bc0") +
           "\"><title>" + escape(o.category) + "</title></circle>\n";
  }

  std::vector<std::pair<double, double>> poly;
  for (const auto& e : events) {
    if (e.at("type") != "pose") continue;
    const auto& p = e.at("payload").at("position");
    poly.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  }
  if (!poly.empty()) {
    svg += "<polyline class=\"trajectory\" fill=\"none\" stroke=\"#1e88e5\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < poly.size(); ++i) {
      if (i) svg += ' ';
      svg += X(poly[i].first) + "," + Y(poly[i].second);
    }
    svg += "\"/>\n";
  }
  for (const auto& e : events) {
    if (e.at("type") != "found") continue;
    const auto& p = e.at("payload").at("position");
    const double x = p.at(0).get<double>();
    const double y = p.at(1).get<double>();
    svg += "<g class=\"found\"><circle cx=\"" + X(x) + "\" cy=\"" + Y(y) +
           "\" r=\"7\" fill=\"none\" stroke=\"#c62828\" stroke-width=\"2\"/><text x=\"" + X(x + 0.2) + "\" y=\"" +
           Y(y + 0.2) + "\" font-size=\"10\" fill=\"#c62828\">" +
           escape(e.at("payload").at("category").get<std::string>()) + " @" + std::to_string(e.at("seq").get<int>()) +
           "</text></g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace saynav
