#pragma once

#include "driver_warning/types.hpp"

#include <vector>

namespace driver_warning
{

/// Surrounding-agent model: maps the current scenario to every agent's next frame.
class AgentModel
{
public:
  virtual ~AgentModel() = default;

  /// One frame per entry of state.agents, in the same order.
  virtual std::vector<VehicleState> next_frames(const ScenarioState & state) const = 0;
};

/// Agents that keep their speed in their lane.
class ConstantVelocityAgents final : public AgentModel
{
public:
  std::vector<VehicleState> next_frames(const ScenarioState & state) const override;
};

/**
 * @brief One full scenario transition: ego through its kinematics, agents through `agents`.
 *
 * `ego_action.accel` is the commanded acceleration; the returned ego frame
 * carries the realized one.
 */
ScenarioState advance_world(
  const ScenarioState & state, const DriverAction & ego_action, const AgentModel & agents);

}  // namespace driver_warning
