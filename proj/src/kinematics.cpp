#include "driver_warning/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace driver_warning
{

namespace
{

bool finite(const VehicleState & x)
{
  return std::isfinite(x.s) && std::isfinite(x.lat_offset) && std::isfinite(x.v) &&
         std::isfinite(x.a);
}

struct Box
{
  double x_min, x_max, y_min, y_max;
};

Box box_of(double s, double y, const VehicleFootprint & fp)
{
  return {s - fp.length, s, y - 0.5 * fp.width, y + 0.5 * fp.width};
}

bool overlap(const Box & a, const Box & b)
{
  return a.x_min < b.x_max && b.x_min < a.x_max && a.y_min < b.y_max && b.y_min < a.y_max;
}

}  // namespace

VehicleState integrate_longitudinal(const VehicleState & x, double accel, double dt)
{
  VehicleState next = x;
  const double v_end = x.v + accel * dt;
  if (v_end >= 0.0) {
    next.s = x.s + x.v * dt + 0.5 * accel * dt * dt;
    next.v = v_end;
    next.a = accel;
    return next;
  }
  // Stops inside the step. accel < 0 here because v >= 0.
  const double t_stop = -x.v / accel;
  next.s = x.s + x.v * t_stop + 0.5 * accel * t_stop * t_stop;
  next.v = 0.0;
  next.a = -x.v / dt;
  return next;
}

VehicleState ego_dynamics(const VehicleState & x, const DriverAction & a, double dt)
{
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("ego_dynamics: dt must be positive and finite");
  }
  if (!finite(x) || !std::isfinite(a.accel)) {
    throw std::invalid_argument("ego_dynamics: non-finite input");
  }
  if (x.v < 0.0) {
    throw std::invalid_argument("ego_dynamics: negative speed");
  }
  VehicleState next = integrate_longitudinal(x, a.accel, dt);
  switch (a.lane_cmd) {
    case LaneCommand::Keep:
      break;
    case LaneCommand::ShiftLeft:
      next.lane = x.lane + 1;
      next.lat_offset = 0.0;
      break;
    case LaneCommand::ShiftRight:
      next.lane = x.lane - 1;
      next.lat_offset = 0.0;
      break;
  }
  return next;
}

double lateral_center(const VehicleState & x, const MapInfo & map)
{
  return x.lane * map.lane_width + x.lat_offset;
}

bool occupies_lane(
  const VehicleState & x, int lane, const MapInfo & map, const VehicleFootprint & fp)
{
  const double y = lateral_center(x, map);
  const double band_lo = (lane - 0.5) * map.lane_width;
  const double band_hi = (lane + 0.5) * map.lane_width;
  return y - 0.5 * fp.width < band_hi && band_lo < y + 0.5 * fp.width;
}

std::optional<LeadInfo> lead_in_lane(
  const VehicleState & self, int lane, std::span<const AgentTrack> agents, const MapInfo & map,
  const VehicleFootprint & fp)
{
  std::optional<LeadInfo> best;
  for (const auto & agent : agents) {
    const VehicleState & other = agent.current();
    if (other.s <= self.s || !occupies_lane(other, lane, map, fp)) {
      continue;
    }
    const double gap = other.s - fp.length - self.s;
    if (!best || gap < best->gap) {
      best = LeadInfo{gap, other.v, agent.id};
    }
  }
  return best;
}

std::optional<LeadInfo> gap_to_lead(const ScenarioState & state, const VehicleFootprint & fp)
{
  const VehicleState & ego = state.ego_now();
  return lead_in_lane(ego, ego.lane, state.agents, state.map, fp);
}

bool footprints_overlap(
  const VehicleState & a, const VehicleState & b, const MapInfo & map, const VehicleFootprint & fp)
{
  return overlap(
    box_of(a.s, lateral_center(a, map), fp), box_of(b.s, lateral_center(b, map), fp));
}

bool any_overlap(const ScenarioState & state, const VehicleFootprint & fp)
{
  const VehicleState & ego = state.ego_now();
  for (const auto & agent : state.agents) {
    if (footprints_overlap(ego, agent.current(), state.map, fp)) {
      return true;
    }
  }
  return false;
}

bool swept_collision(
  const ScenarioState & from, const ScenarioState & to, const VehicleFootprint & fp, int samples)
{
  samples = std::max(samples, 1);
  const VehicleState & e0 = from.ego_now();
  const VehicleState & e1 = to.ego_now();
  const double ey0 = lateral_center(e0, from.map);
  const double ey1 = lateral_center(e1, to.map);
  for (const auto & agent1 : to.agents) {
    const VehicleState & o1 = agent1.current();
    const VehicleState * o0 = &o1;
    for (const auto & agent0 : from.agents) {
      if (agent0.id == agent1.id) {
        o0 = &agent0.current();
        break;
      }
    }
    const double oy0 = lateral_center(*o0, from.map);
    const double oy1 = lateral_center(o1, to.map);
    for (int k = 0; k <= samples; ++k) {
      const double u = static_cast<double>(k) / samples;
      const Box ego_box = box_of(e0.s + u * (e1.s - e0.s), ey0 + u * (ey1 - ey0), fp);
      const Box other_box = box_of(o0->s + u * (o1.s - o0->s), oy0 + u * (oy1 - oy0), fp);
      if (overlap(ego_box, other_box)) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace driver_warning
