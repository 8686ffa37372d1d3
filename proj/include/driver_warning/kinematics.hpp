#pragma once

#include "driver_warning/types.hpp"

#include <optional>
#include <span>

namespace driver_warning
{

struct LeadInfo
{
  double gap{0.0};     ///< bumper-to-bumper distance (m)
  double v_lead{0.0};  ///< leader speed (m/s)
  int agent_id{-1};
};

/**
 * @brief Ego kinematic update over one step.
 *
 * Constant acceleration, speed clamped at zero (the vehicle stops at the
 * analytic stopping point instead of reversing). A lane command completes
 * within the step. The stored acceleration is the realized one.
 *
 * @throws std::invalid_argument on non-finite inputs or dt <= 0
 */
VehicleState ego_dynamics(const VehicleState & x, const DriverAction & a, double dt);

/// Same integration for any vehicle, without the lane command.
VehicleState integrate_longitudinal(const VehicleState & x, double accel, double dt);

double lateral_center(const VehicleState & x, const MapInfo & map);

/// True when the vehicle's lateral footprint overlaps the band of `lane`.
bool occupies_lane(const VehicleState & x, int lane, const MapInfo & map, const VehicleFootprint & fp);

/// Nearest vehicle ahead of `self` whose footprint overlaps `lane`.
std::optional<LeadInfo> lead_in_lane(
  const VehicleState & self, int lane, std::span<const AgentTrack> agents, const MapInfo & map,
  const VehicleFootprint & fp);

/// Gap to the nearest same-lane agent ahead of the ego, or none.
std::optional<LeadInfo> gap_to_lead(const ScenarioState & state, const VehicleFootprint & fp = {});

/// Axis-aligned footprint overlap in road coordinates. Touching is not overlap.
bool footprints_overlap(
  const VehicleState & a, const VehicleState & b, const MapInfo & map, const VehicleFootprint & fp);

/**
 * @brief Swept collision test between ego and every agent over one step.
 *
 * Both endpoints and `samples - 1` interior points of the linear interpolation
 * between consecutive frames are checked.
 */
bool swept_collision(
  const ScenarioState & from, const ScenarioState & to, const VehicleFootprint & fp,
  int samples = 10);

bool any_overlap(const ScenarioState & state, const VehicleFootprint & fp);

}  // namespace driver_warning
