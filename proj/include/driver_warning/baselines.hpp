#pragma once

#include "driver_warning/types.hpp"

#include <array>
#include <optional>

namespace driver_warning
{

struct RuleParams
{
  double acc_min{-6.0};
  double delay{1.0};  ///< T_D assumed by the rule (s)
  /// alpha_w per warning, indexed by index_of(Warning); NoWarning unused.
  std::array<double, 5> alpha{0.0, 0.15, 0.4, 0.7, 1.0};
  /// TTC threshold per warning (s); NoWarning unused.
  std::array<double, 5> ttc_threshold{0.0, 5.0, 3.5, 2.5, 1.5};
  VehicleFootprint footprint;

  bool operator==(const RuleParams &) const = default;
};

/// Throws std::invalid_argument when the tables are not monotone or alpha(TakeOver) != 1.
void validate(const RuleParams & params);

/// gap / (v_ego - v_front) while closing on the leader, else none.
std::optional<double> time_to_collision(const ScenarioState & state, const VehicleFootprint & fp = {});

/// Most severe warning whose threshold exceeds `ttc`.
Warning ttc_warning(std::optional<double> ttc, const RuleParams & params);

/// Minimum gap left if both vehicles brake at acc_min and the ego reacts after T_D.
struct RuleGaps
{
  double d_front{0.0};
  double d_ego{0.0};
  double d_min{0.0};
};
RuleGaps rule_gaps(double d_gap, double v_ego, double v_front, const RuleParams & params);

/// Left-hand side of the take-over condition: gap left by an undelayed hard brake.
double take_over_margin(double d_gap, double v_ego, double v_front, const RuleParams & params);

/// Adaptive rule for explicit kinematics.
Warning rule_based_warning(double d_gap, double v_ego, double v_front, const RuleParams & params);

/// Adaptive rule against the current leader; NoWarning without one.
Warning rule_based_warning(const ScenarioState & state, const RuleParams & params);

}  // namespace driver_warning
