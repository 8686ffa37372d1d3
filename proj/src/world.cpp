#include "driver_warning/world.hpp"

#include "driver_warning/kinematics.hpp"

#include <stdexcept>

namespace driver_warning
{

std::vector<VehicleState> ConstantVelocityAgents::next_frames(const ScenarioState & state) const
{
  std::vector<VehicleState> out;
  out.reserve(state.agents.size());
  for (const auto & agent : state.agents) {
    out.push_back(integrate_longitudinal(agent.current(), 0.0, state.dt));
  }
  return out;
}

ScenarioState advance_world(
  const ScenarioState & state, const DriverAction & ego_action, const AgentModel & agents)
{
  std::vector<VehicleState> frames = agents.next_frames(state);
  if (frames.size() != state.agents.size()) {
    throw std::logic_error("AgentModel returned the wrong number of frames");
  }
  ScenarioState next = state;
  next.ego.push(ego_dynamics(state.ego_now(), ego_action, state.dt));
  for (std::size_t i = 0; i < frames.size(); ++i) {
    next.agents[i].history.push(frames[i]);
  }
  next.t = state.t + state.dt;
  return next;
}

}  // namespace driver_warning
