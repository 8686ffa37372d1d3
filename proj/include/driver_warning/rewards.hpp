#pragma once

#include "driver_warning/types.hpp"

#include <array>
#include <compare>
#include <limits>

namespace driver_warning
{

/**
 * @brief Scalar reward where a collision is an absorbing minus-infinity.
 *
 * Sums involving a collision stay a collision, and scaling by a zero
 * probability yields zero instead of NaN.
 */
class Reward
{
public:
  constexpr Reward() = default;
  constexpr explicit Reward(double v) : value_(v) {}

  static constexpr Reward collision() { return Reward(-std::numeric_limits<double>::infinity()); }

  constexpr double value() const { return value_; }
  constexpr bool is_collision() const { return value_ == -std::numeric_limits<double>::infinity(); }

  constexpr Reward operator+(Reward other) const
  {
    if (is_collision() || other.is_collision()) {
      return collision();
    }
    return Reward(value_ + other.value_);
  }
  constexpr Reward & operator+=(Reward other) { return *this = *this + other; }

  /// Probability or discount weighting; weight 0 drops the term.
  constexpr Reward scaled(double weight) const
  {
    if (weight == 0.0) {
      return Reward(0.0);
    }
    return is_collision() ? collision() : Reward(weight * value_);
  }

  constexpr auto operator<=>(const Reward & other) const { return value_ <=> other.value_; }
  constexpr bool operator==(const Reward & other) const { return value_ == other.value_; }

private:
  double value_{0.0};
};

struct RewardWeights
{
  double w_v{0.5};
  double w_acc{0.1};
  double v_desire{11.0};
  double gamma{0.95};
  /// Indexed by index_of(Warning).
  std::array<double, 5> warning_costs{0.0, -1.0, -20.0, -50.0, -1e8};

  bool operator==(const RewardWeights &) const = default;
};

/// Throws std::invalid_argument when weights break their invariants.
void validate(const RewardWeights & weights);

/**
 * @brief -w_v (v - v_desire)^2 - w_acc acc^2, or a collision if the ego
 * footprint overlaps any agent in `state`.
 *
 * v is the ego speed in `state`; acc is `a.accel`, the realized acceleration.
 */
Reward traj_reward(
  const ScenarioState & state, const DriverAction & a, const RewardWeights & weights,
  const VehicleFootprint & fp = {});

/// Trajectory reward of one transition, with the swept collision check between the frames.
Reward edge_reward(
  const ScenarioState & from, const ScenarioState & to, const RewardWeights & weights,
  const VehicleFootprint & fp = {});

double warning_cost(Warning w, const RewardWeights & weights);

}  // namespace driver_warning
