#pragma once

#include "driver_warning/rng.hpp"
#include "driver_warning/types.hpp"

#include <array>
#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace driver_warning
{

struct IdmParams
{
  double v_desired{11.0};
  double time_headway{1.0};
  double s_min{2.0};
  double a_max{2.0};
  double b_comfort{2.5};
  double delta{4.0};

  bool operator==(const IdmParams &) const = default;
};

/**
 * @brief Intelligent driver model acceleration, clamped to `limits`.
 *
 * Without a leader only the free-road term applies.
 */
double idm_accel(
  double v, std::optional<double> gap, double v_lead, const IdmParams & p,
  const AccelLimits & limits);

enum class PolicyKind : std::uint8_t { Safe, Blind, Brake, DelayBlindToSafe, DelayBlindToBrake };

inline constexpr std::array<PolicyKind, 5> kAllPolicyKinds = {
  PolicyKind::Safe, PolicyKind::Blind, PolicyKind::Brake, PolicyKind::DelayBlindToSafe,
  PolicyKind::DelayBlindToBrake};

std::string_view to_string(PolicyKind k);
std::optional<PolicyKind> policy_kind_from_string(std::string_view name);

/// Kinds whose current actions are Blind's (or will be, for Delay before expiry).
inline constexpr bool is_delay(PolicyKind k)
{
  return k == PolicyKind::DelayBlindToSafe || k == PolicyKind::DelayBlindToBrake;
}

/// Brake and the delay wrapper heading to Brake; these never reach Safe through a warning.
inline constexpr bool is_brake_family(PolicyKind k)
{
  return k == PolicyKind::Brake || k == PolicyKind::DelayBlindToBrake;
}

/// Rank used to break argmax ties: lower rank wins.
int tie_rank(PolicyKind k);

/**
 * @brief A driver policy with its step timer.
 *
 * The timer counts steps since the policy was entered and is meaningful for
 * Brake and the two Delay kinds only; it stays 0 for Safe and Blind.
 */
struct PolicyState
{
  PolicyKind kind{PolicyKind::Blind};
  int timer{0};

  auto operator<=>(const PolicyState &) const = default;
};

std::string to_string(const PolicyState & p);

struct ActionDistribution
{
  DriverAction mean;
  double accel_sigma{0.4};
  double lane_mismatch_prob{0.01};

  /// Gaussian density in accel, scaled by the mismatch probability if lane commands differ.
  double density(const DriverAction & a) const;
  DriverAction sample(RngStream & rng, const AccelLimits & limits) const;
};

struct DriverParams
{
  IdmParams idm;
  AccelLimits limits;
  VehicleFootprint footprint;
  double a_decelerate{-3.0};
  double brake_duration{1.0};  ///< T_R (s)
  double delay_duration{1.0};  ///< T_D (s)
  double accel_sigma{0.4};
  double lane_mismatch_prob{0.01};
  double dt{0.5};

  bool operator==(const DriverParams &) const = default;
};

/// Number of whole steps covering `duration`.
int steps_for(double duration, double dt);

/**
 * @brief The four ego behaviors over one shared parameter set.
 *
 * Safe follows the true leader with IDM and may shift lanes when braking
 * harder than b_comfort and an adjacent lane is both free and roomier.
 * Blind runs the same computation with no agents. Brake holds a_decelerate
 * for T_R then acts as Safe. Delay kinds act as Blind until T_D, then as
 * their target.
 */
class DriverModel
{
public:
  explicit DriverModel(DriverParams params = {});

  const DriverParams & params() const { return params_; }
  int brake_steps() const { return brake_steps_; }
  int delay_steps() const { return delay_steps_; }

  ActionDistribution policy_action(const PolicyState & pi, const ScenarioState & state) const;
  double action_likelihood(
    const PolicyState & pi, const DriverAction & a, const ScenarioState & state) const;

  /// Mean action of Safe against an explicit agent list (empty for Blind).
  DriverAction safe_mean(const ScenarioState & state, std::span<const AgentTrack> agents) const;

  /// Advance the policy timer by one step, relabeling expired Brake and Delay states.
  PolicyState tick(const PolicyState & pi) const;

  /// Whether the policy currently acts as Blind.
  bool acts_blind(const PolicyState & pi) const;

private:
  ActionDistribution wrap(const DriverAction & mean) const;

  DriverParams params_;
  int brake_steps_;
  int delay_steps_;
};

}  // namespace driver_warning
