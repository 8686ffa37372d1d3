#include "driver_warning/estimator.hpp"

#include <iostream>

namespace driver_warning
{

Belief::Belief(std::map<PolicyState, double> probs)
{
  double sum = 0.0;
  for (const auto & [pi, p] : probs) {
    if (!(p >= 0.0)) {
      throw std::invalid_argument("Belief: negative or NaN probability");
    }
    sum += p;
  }
  if (!(sum > 0.0)) {
    throw std::invalid_argument("Belief: total mass must be positive");
  }
  for (const auto & [pi, p] : probs) {
    if (p > 0.0) {
      probs_[pi] = p / sum;
    }
  }
}

Belief Belief::one_hot(PolicyState pi) { return Belief({{pi, 1.0}}); }

double Belief::operator[](const PolicyState & pi) const
{
  const auto it = probs_.find(pi);
  return it == probs_.end() ? 0.0 : it->second;
}

double Belief::total() const
{
  double sum = 0.0;
  for (const auto & [pi, p] : probs_) {
    sum += p;
  }
  return sum;
}

double Belief::kind_mass(PolicyKind k) const
{
  double sum = 0.0;
  for (const auto & [pi, p] : probs_) {
    if (pi.kind == k) {
      sum += p;
    }
  }
  return sum;
}

std::array<double, 5> Belief::kind_masses() const
{
  std::array<double, 5> out{};
  for (const auto & [pi, p] : probs_) {
    out[static_cast<std::size_t>(pi.kind)] += p;
  }
  return out;
}

Belief predict(const Belief & b, Warning w, const TransitionModel & model)
{
  std::map<PolicyState, double> out;
  for (const auto & [pi, p] : b.probs()) {
    for (const auto & outcome : model.query(pi, w)) {
      out[outcome.policy] += outcome.probability * p;
    }
  }
  return Belief(std::move(out));
}

Belief correct(
  const Belief & b_minus, const DriverAction & a, const ScenarioState & state,
  const DriverModel & drivers)
{
  std::map<PolicyState, double> out;
  double total = 0.0;
  for (const auto & [pi, p] : b_minus.probs()) {
    const double w = drivers.action_likelihood(pi, a, state) * p;
    out[pi] = w;
    total += w;
  }
  if (!(total >= 1e-300)) {
    throw DegenerateObservation("correct: total likelihood below 1e-300");
  }
  return Belief(std::move(out));
}

Belief advance(const Belief & b_plus, const DriverModel & drivers)
{
  std::map<PolicyState, double> out;
  for (const auto & [pi, p] : b_plus.probs()) {
    out[drivers.tick(pi)] += p;
  }
  return Belief(std::move(out));
}

double blind_acting_mass(const Belief & b, const DriverModel & drivers)
{
  double sum = 0.0;
  for (const auto & [pi, p] : b.probs()) {
    if (drivers.acts_blind(pi)) {
      sum += p;
    }
  }
  return sum;
}

PolicyState extract_estimate(const Belief & b, double th_safety, const DriverModel & drivers)
{
  if (blind_acting_mass(b, drivers) > th_safety) {
    return PolicyState{PolicyKind::Blind, 0};
  }
  const auto masses = b.kind_masses();
  PolicyKind best = PolicyKind::Blind;
  double best_mass = -1.0;
  for (PolicyKind k : kAllPolicyKinds) {
    const double m = masses[static_cast<std::size_t>(k)];
    if (m > best_mass || (m == best_mass && tie_rank(k) < tie_rank(best))) {
      best = k;
      best_mass = m;
    }
  }
  PolicyState pick{best, 0};
  double pick_mass = -1.0;
  for (const auto & [pi, p] : b.probs()) {
    if (pi.kind == best && p > pick_mass) {
      pick = pi;
      pick_mass = p;
    }
  }
  return pick;
}

FilterStep filter_step(
  const Belief & b, Warning w, const DriverAction & a, const ScenarioState & state,
  const TransitionModel & model, const DriverModel & drivers)
{
  const Belief b_minus = predict(b, w, model);
  FilterStep step;
  try {
    step.next = advance(correct(b_minus, a, state, drivers), drivers);
  } catch (const DegenerateObservation & e) {
    std::clog << "estimator: " << e.what() << " at t=" << state.t << ", keeping prediction\n";
    step.next = advance(b_minus, drivers);
    step.degenerate = true;
  }
  return step;
}

}  // namespace driver_warning
