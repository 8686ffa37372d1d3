#pragma once

#include "driver_warning/behavior_transition.hpp"
#include "driver_warning/driver_policies.hpp"
#include "driver_warning/types.hpp"

#include <array>
#include <map>
#include <stdexcept>

namespace driver_warning
{

class DegenerateObservation : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Discrete distribution over timer-indexed policy states.
class Belief
{
public:
  Belief() = default;
  /// Normalizes `probs`; throws if the total mass is not positive.
  explicit Belief(std::map<PolicyState, double> probs);

  static Belief one_hot(PolicyState pi);

  double operator[](const PolicyState & pi) const;
  const std::map<PolicyState, double> & probs() const { return probs_; }

  double total() const;
  double kind_mass(PolicyKind k) const;
  std::array<double, 5> kind_masses() const;

  bool operator==(const Belief &) const = default;

private:
  std::map<PolicyState, double> probs_;
};

/// b-(pi') = sum_pi T(pi, w)(pi') b(pi)
Belief predict(const Belief & b, Warning w, const TransitionModel & model);

/**
 * @brief Bayesian correction with the observed driver action.
 * @throws DegenerateObservation when the total likelihood is below 1e-300
 */
Belief correct(
  const Belief & b_minus, const DriverAction & a, const ScenarioState & state,
  const DriverModel & drivers);

/// Timer advance to the next step; expired Brake and Delay mass is relabeled.
Belief advance(const Belief & b_plus, const DriverModel & drivers);

/**
 * @brief Point estimate used by the estimated-state planner.
 *
 * Returns Blind when the not-yet-reacting mass (Blind plus Delay states still
 * inside their delay) exceeds th_safety. Otherwise returns the most probable
 * kind, ties broken by tie_rank, at its most probable timer.
 */
PolicyState extract_estimate(const Belief & b, double th_safety, const DriverModel & drivers);

/// Mass of Blind plus every Delay state still acting Blind.
double blind_acting_mass(const Belief & b, const DriverModel & drivers);

/// Full predict-correct-advance cycle. A degenerate observation keeps the prediction.
struct FilterStep
{
  Belief next;
  bool degenerate{false};
};
FilterStep filter_step(
  const Belief & b, Warning w, const DriverAction & a, const ScenarioState & state,
  const TransitionModel & model, const DriverModel & drivers);

}  // namespace driver_warning
