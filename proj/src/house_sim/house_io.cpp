#include "saynav/house_sim/house_io.hpp"

#include <fstream>

namespace saynav {

using nlohmann::json;

json house_to_json(const House& house) {
  json rooms = json::array();
  for (const auto& r : house.rooms()) {
    rooms.push_back({{"id", r.id},
                     {"interior", {r.interior.x0, r.interior.y0, r.interior.x1, r.interior.y1}},
                     {"bounds", {r.bounds().min_x, r.bounds().min_y, r.bounds().max_x, r.bounds().max_y}},
                     {"room_type", r.room_type}});
  }
  json doors = json::array();
  for (const auto& d : house.doors()) {
    doors.push_back({{"id", d.id},
                     {"cell", {d.cell.x, d.cell.y}},
                     {"position", {d.position().x, d.position().y}},
                     {"connects", {d.room_a, d.room_b}},
                     {"open", d.open}});
  }
  json objects = json::array();
  for (const auto& o : house.objects()) {
    objects.push_back({{"id", o.id},
                       {"category", o.category},
                       {"position", {o.position.x, o.position.y, o.position.z}},
                       {"max_dimension", o.max_dimension},
                       {"room_id", o.room_id}});
  }
  json rle = json::array();
  const auto& cells = house.grid().cells();
  for (std::size_t i = 0; i < cells.size();) {
    std::size_t j = i;
    while (j < cells.size() && cells[j] == cells[i]) ++j;
    rle.push_back({static_cast<int>(cells[i]), j - i});
    i = j;
  }
  return {{"schema_version", kHouseSchemaVersion},
          {"seed", house.seed()},
          {"rooms", rooms},
          {"doors", doors},
          {"objects", objects},
          {"grid",
           {{"cell_size", kCellSize},
            {"width", house.grid().width()},
            {"height", house.grid().height()},
            {"rle", rle}}}};
}

House house_from_json(const json& j) {
  if (!j.contains("schema_version") || j.at("schema_version") != kHouseSchemaVersion) {
    throw SchemaError("unsupported house schema version " +
                      (j.contains("schema_version") ? j.at("schema_version").dump() : "<missing>"));
  }
  const auto& g = j.at("grid");
  if (g.at("cell_size").get<double>() != kCellSize) throw SchemaError("unsupported cell size");
  OccupancyGrid grid(g.at("width").get<int>(), g.at("height").get<int>());
  std::size_t i = 0;
  for (const auto& run : g.at("rle")) {
    int type = run.at(0).get<int>();
    auto count = run.at(1).get<std::size_t>();
    if (type < 0 || type > static_cast<int>(CellType::Furniture)) throw SchemaError("bad cell type");
    for (std::size_t k = 0; k < count; ++k, ++i) {
      if (i >= grid.size()) throw SchemaError("grid run-length overflows dimensions");
      grid.set(grid.cell_at(i), static_cast<CellType>(type));
    }
  }
  if (i != grid.size()) throw SchemaError("grid run-length does not cover dimensions");

  std::vector<Room> rooms;
  for (const auto& r : j.at("rooms")) {
    const auto& in = r.at("interior");
    rooms.push_back({r.at("id").get<int>(),
                     {in.at(0).get<int>(), in.at(1).get<int>(), in.at(2).get<int>(), in.at(3).get<int>()},
                     r.at("room_type").get<std::string>()});
  }
  std::vector<Door> doors;
  for (const auto& d : j.at("doors")) {
    doors.push_back({d.at("id").get<int>(),
                     {d.at("cell").at(0).get<int>(), d.at("cell").at(1).get<int>()},
                     d.at("connects").at(0).get<int>(),
                     d.at("connects").at(1).get<int>(),
                     d.at("open").get<bool>()});
  }
  std::vector<ObjectInstance> objects;
  for (const auto& o : j.at("objects")) {
    const auto& p = o.at("position");
    objects.push_back({o.at("id").get<int>(), o.at("category").get<std::string>(),
                       {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()},
                       o.at("max_dimension").get<double>(), o.at("room_id").get<int>()});
  }
  House house(j.at("seed").get<std::uint64_t>(), std::move(grid), std::move(rooms),
              std::move(doors), std::move(objects));
  validate_house(house);
  return house;
}

void save_house(const House& house, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << house_to_json(house).dump() << '\n';
}

House load_house(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return house_from_json(json::parse(in));
}

}  // namespace saynav
