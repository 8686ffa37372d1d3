#include "driver_warning/rewards.hpp"

#include "driver_warning/kinematics.hpp"

#include <stdexcept>

namespace driver_warning
{

void validate(const RewardWeights & weights)
{
  if (weights.w_v < 0.0 || weights.w_acc < 0.0) {
    throw std::invalid_argument("reward weights must be non-negative");
  }
  if (!(weights.gamma > 0.0 && weights.gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1]");
  }
  const auto & c = weights.warning_costs;
  if (c[index_of(Warning::NoWarning)] != 0.0) {
    throw std::invalid_argument("NoWarning must cost 0");
  }
  for (std::size_t i = 1; i + 1 < c.size(); ++i) {
    if (c[i + 1] > c[i]) {
      throw std::invalid_argument("warning costs must not increase with severity");
    }
  }
}

Reward traj_reward(
  const ScenarioState & state, const DriverAction & a, const RewardWeights & weights,
  const VehicleFootprint & fp)
{
  if (any_overlap(state, fp)) {
    return Reward::collision();
  }
  const double dv = state.ego_now().v - weights.v_desire;
  return Reward(-weights.w_v * dv * dv - weights.w_acc * a.accel * a.accel);
}

Reward edge_reward(
  const ScenarioState & from, const ScenarioState & to, const RewardWeights & weights,
  const VehicleFootprint & fp)
{
  if (swept_collision(from, to, fp)) {
    return Reward::collision();
  }
  const DriverAction realized{to.ego_now().a, LaneCommand::Keep};
  return traj_reward(from, realized, weights, fp);
}

double warning_cost(Warning w, const RewardWeights & weights)
{
  return weights.warning_costs[index_of(w)];
}

}  // namespace driver_warning
