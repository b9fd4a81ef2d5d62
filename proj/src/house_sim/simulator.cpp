#include "saynav/house_sim/simulator.hpp"

namespace saynav {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::MoveForward: return "move_forward";
    case Action::TurnLeft: return "turn_left";
    case Action::TurnRight: return "turn_right";
    case Action::Stop: return "stop";
  }
  return "?";
}

std::string_view to_string(EntityKind k) {
  switch (k) {
    case EntityKind::Object: return "object";
    case EntityKind::Door: return "door";
    case EntityKind::Wall: return "wall";
  }
  return "?";
}

StepResult step(const OccupancyGrid& grid, const AgentState& state, Action action) {
  StepResult r{state, false};
  r.state.step_count += 1;
  switch (action) {
    case Action::TurnLeft:
      r.state.heading = turned_left(state.heading);
      break;
    case Action::TurnRight:
      r.state.heading = turned_right(state.heading);
      break;
    case Action::MoveForward: {
      Cell d = step_of(state.heading);
      Cell next{state.cell.x + d.x, state.cell.y + d.y};
      if (grid.traversable(next)) {
        r.state.cell = next;
        r.state.path_length += kCellSize;
      } else {
        r.collided = true;
      }
      break;
    }
    case Action::Stop:
      break;
  }
  return r;
}

StepResult step(const House& house, const AgentState& state, Action action) {
  return step(house.grid(), state, action);
}

}  // namespace saynav
