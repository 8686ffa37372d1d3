#pragma once

#include "driver_warning/driver_policies.hpp"
#include "driver_warning/types.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace driver_warning
{

class TransitionConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct TransitionOutcome
{
  PolicyState policy;
  double probability{0.0};
};

/**
 * @brief Warning-conditioned policy switching table.
 *
 * Rows are keyed by (source kind, warning). Target timers follow three rules:
 * TakeOver always lands on Brake with timer 0; a target of the same kind, or
 * a Delay-to-Delay upgrade, keeps the source timer; anything else starts at 0.
 *
 * Validation runs at construction and rejects any table violating the
 * take-over rule, the no-warning identity, the Brake-to-Safe ban, or the
 * row sums.
 */
class TransitionModel
{
public:
  using Row = std::vector<std::pair<PolicyKind, double>>;
  using Table = std::map<std::pair<PolicyKind, Warning>, Row>;

  TransitionModel(std::set<PolicyKind> kinds, Table table);

  /// Default five-kind table.
  static TransitionModel make_default();
  /// The default table with Delay kinds collapsed onto their targets: {Safe, Blind, Brake}.
  static TransitionModel make_default_without_delays();

  std::vector<TransitionOutcome> query(const PolicyState & pi, Warning w) const;

  const std::set<PolicyKind> & kinds() const { return kinds_; }
  const Table & table() const { return table_; }
  const Row & row(PolicyKind source, Warning w) const;

  /// Probability mass that leaves Blind under `w`.
  double leave_blind_mass(Warning w) const;

private:
  void validate() const;

  std::set<PolicyKind> kinds_;
  Table table_;
};

}  // namespace driver_warning
