#include "driver_warning/driver_policies.hpp"

#include "driver_warning/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace driver_warning
{

double idm_accel(
  double v, std::optional<double> gap, double v_lead, const IdmParams & p,
  const AccelLimits & limits)
{
  double accel = p.a_max * (1.0 - std::pow(v / p.v_desired, p.delta));
  if (gap) {
    const double dv = v - v_lead;
    const double s_star =
      p.s_min + std::max(0.0, v * p.time_headway + v * dv / (2.0 * std::sqrt(p.a_max * p.b_comfort)));
    const double g = std::max(*gap, 1e-3);
    accel -= p.a_max * (s_star / g) * (s_star / g);
  }
  return std::clamp(accel, limits.acc_min, limits.acc_max);
}

std::string_view to_string(PolicyKind k)
{
  switch (k) {
    case PolicyKind::Safe:
      return "Safe";
    case PolicyKind::Blind:
      return "Blind";
    case PolicyKind::Brake:
      return "Brake";
    case PolicyKind::DelayBlindToSafe:
      return "DelayBlindToSafe";
    case PolicyKind::DelayBlindToBrake:
      return "DelayBlindToBrake";
  }
  return "?";
}

std::optional<PolicyKind> policy_kind_from_string(std::string_view name)
{
  for (PolicyKind k : kAllPolicyKinds) {
    if (to_string(k) == name) {
      return k;
    }
  }
  return std::nullopt;
}

int tie_rank(PolicyKind k)
{
  // Safe < Brake < DelayBlindToBrake < DelayBlindToSafe < Blind
  switch (k) {
    case PolicyKind::Safe:
      return 0;
    case PolicyKind::Brake:
      return 1;
    case PolicyKind::DelayBlindToBrake:
      return 2;
    case PolicyKind::DelayBlindToSafe:
      return 3;
    case PolicyKind::Blind:
      return 4;
  }
  return 5;
}

std::string to_string(const PolicyState & p)
{
  std::string out(to_string(p.kind));
  if (p.kind != PolicyKind::Safe && p.kind != PolicyKind::Blind) {
    out += "(" + std::to_string(p.timer) + ")";
  }
  return out;
}

double ActionDistribution::density(const DriverAction & a) const
{
  const double z = (a.accel - mean.accel) / accel_sigma;
  double d = std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * accel_sigma);
  if (a.lane_cmd != mean.lane_cmd) {
    d *= lane_mismatch_prob;
  }
  return d;
}

DriverAction ActionDistribution::sample(RngStream & rng, const AccelLimits & limits) const
{
  DriverAction a = mean;
  a.accel = std::clamp(mean.accel + accel_sigma * rng.normal(), limits.acc_min, limits.acc_max);
  return a;
}

int steps_for(double duration, double dt)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("steps_for: dt must be positive");
  }
  return std::max(0, static_cast<int>(std::ceil(duration / dt - 1e-9)));
}

DriverModel::DriverModel(DriverParams params)
: params_(params),
  brake_steps_(steps_for(params.brake_duration, params.dt)),
  delay_steps_(steps_for(params.delay_duration, params.dt))
{
  const auto & p = params_.idm;
  if (!(p.v_desired > 0 && p.time_headway > 0 && p.s_min > 0 && p.a_max > 0 && p.b_comfort > 0 &&
        p.delta > 0)) {
    throw std::invalid_argument("IdmParams must all be positive");
  }
  if (p.b_comfort > std::abs(params_.limits.acc_min)) {
    throw std::invalid_argument("IdmParams.b_comfort exceeds |acc_min|");
  }
  if (!(params_.accel_sigma > 0.0)) {
    throw std::invalid_argument("accel_sigma must be positive");
  }
  if (params_.a_decelerate >= 0.0 || params_.a_decelerate < params_.limits.acc_min) {
    throw std::invalid_argument("a_decelerate must be negative and within acc_min");
  }
}

ActionDistribution DriverModel::wrap(const DriverAction & mean) const
{
  return ActionDistribution{mean, params_.accel_sigma, params_.lane_mismatch_prob};
}

DriverAction DriverModel::safe_mean(
  const ScenarioState & state, std::span<const AgentTrack> agents) const
{
  const VehicleState & ego = state.ego_now();
  const auto & fp = params_.footprint;
  const auto & idm = params_.idm;
  const auto & limits = params_.limits;

  const auto lead = lead_in_lane(ego, ego.lane, agents, state.map, fp);
  const double acc_keep = lead ? idm_accel(ego.v, lead->gap, lead->v_lead, idm, limits)
                               : idm_accel(ego.v, std::nullopt, 0.0, idm, limits);
  DriverAction action{acc_keep, LaneCommand::Keep};
  if (acc_keep >= -idm.b_comfort || !lead) {
    return action;
  }

  // Clearance so the lateral move does not clip the current leader.
  const double closing = std::max(0.0, ego.v - lead->v_lead) * state.dt;
  if (lead->gap - closing <= 0.0) {
    return action;
  }

  double best_acc = acc_keep;
  for (const auto & [target, cmd] :
       {std::pair{ego.lane + 1, LaneCommand::ShiftLeft},
        std::pair{ego.lane - 1, LaneCommand::ShiftRight}}) {
    if (target < 0 || target >= state.map.lane_count) {
      continue;
    }
    bool blocked = false;
    std::optional<LeadInfo> target_lead;
    std::optional<std::pair<double, double>> follower;  // gap, speed
    for (const auto & agent : agents) {
      const VehicleState & other = agent.current();
      if (!occupies_lane(other, target, state.map, fp)) {
        continue;
      }
      if (std::abs(other.s - ego.s) < fp.length) {
        blocked = true;
        break;
      }
      if (other.s > ego.s) {
        const double gap = other.s - fp.length - ego.s;
        if (!target_lead || gap < target_lead->gap) {
          target_lead = LeadInfo{gap, other.v, agent.id};
        }
      } else {
        const double gap = ego.s - fp.length - other.s;
        if (!follower || gap < follower->first) {
          follower = std::pair{gap, other.v};
        }
      }
    }
    if (blocked) {
      continue;
    }
    const double target_gap =
      target_lead ? target_lead->gap : std::numeric_limits<double>::infinity();
    if (target_gap <= lead->gap || target_gap < idm.s_min) {
      continue;
    }
    if (follower) {
      if (follower->first < idm.s_min) {
        continue;
      }
      const double follower_acc = idm_accel(follower->second, follower->first, ego.v, idm, limits);
      if (follower_acc < -idm.b_comfort) {
        continue;
      }
    }
    const double acc_target = target_lead
                                ? idm_accel(ego.v, target_lead->gap, target_lead->v_lead, idm, limits)
                                : idm_accel(ego.v, std::nullopt, 0.0, idm, limits);
    if (acc_target > best_acc) {
      best_acc = acc_target;
      action = DriverAction{acc_target, cmd};
    }
  }
  return action;
}

ActionDistribution DriverModel::policy_action(
  const PolicyState & pi, const ScenarioState & state) const
{
  switch (pi.kind) {
    case PolicyKind::Safe:
      return wrap(safe_mean(state, state.agents));
    case PolicyKind::Blind:
      return wrap(safe_mean(state, {}));
    case PolicyKind::Brake:
      if (pi.timer < brake_steps_) {
        return wrap(DriverAction{params_.a_decelerate, LaneCommand::Keep});
      }
      return policy_action(PolicyState{PolicyKind::Safe, 0}, state);
    case PolicyKind::DelayBlindToSafe:
      if (pi.timer < delay_steps_) {
        return policy_action(PolicyState{PolicyKind::Blind, 0}, state);
      }
      return policy_action(PolicyState{PolicyKind::Safe, 0}, state);
    case PolicyKind::DelayBlindToBrake:
      if (pi.timer < delay_steps_) {
        return policy_action(PolicyState{PolicyKind::Blind, 0}, state);
      }
      return policy_action(PolicyState{PolicyKind::Brake, pi.timer - delay_steps_}, state);
  }
  throw std::logic_error("unknown policy kind");
}

double DriverModel::action_likelihood(
  const PolicyState & pi, const DriverAction & a, const ScenarioState & state) const
{
  return policy_action(pi, state).density(a);
}

PolicyState DriverModel::tick(const PolicyState & pi) const
{
  switch (pi.kind) {
    case PolicyKind::Safe:
    case PolicyKind::Blind:
      return PolicyState{pi.kind, 0};
    case PolicyKind::Brake: {
      const int t = pi.timer + 1;
      return t >= brake_steps_ ? PolicyState{PolicyKind::Safe, 0} : PolicyState{pi.kind, t};
    }
    case PolicyKind::DelayBlindToSafe: {
      const int t = pi.timer + 1;
      return t >= delay_steps_ ? PolicyState{PolicyKind::Safe, 0} : PolicyState{pi.kind, t};
    }
    case PolicyKind::DelayBlindToBrake: {
      const int t = pi.timer + 1;
      if (t < delay_steps_) {
        return PolicyState{pi.kind, t};
      }
      // The Brake phase may itself be zero-length.
      return brake_steps_ > 0 ? PolicyState{PolicyKind::Brake, 0} : PolicyState{PolicyKind::Safe, 0};
    }
  }
  throw std::logic_error("unknown policy kind");
}

bool DriverModel::acts_blind(const PolicyState & pi) const
{
  return pi.kind == PolicyKind::Blind || (is_delay(pi.kind) && pi.timer < delay_steps_);
}

}  // namespace driver_warning
