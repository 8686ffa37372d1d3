#pragma once

#include "driver_warning/behavior_transition.hpp"
#include "driver_warning/driver_policies.hpp"
#include "driver_warning/estimator.hpp"
#include "driver_warning/rewards.hpp"
#include "driver_warning/types.hpp"
#include "driver_warning/world.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace driver_warning
{

struct PlannerConfig
{
  int horizon{10};
  double dt{0.5};
  double gamma{0.95};
  /// Take over at the first spine depth where every reacting outcome collides.
  bool early_take_over{true};
  /// Belief states below this mass are skipped by the expected-Q selector.
  double support_cutoff{1e-3};

  bool operator==(const PlannerConfig &) const = default;
};

/// Everything the searcher needs to roll the world forward.
struct PlanningModel
{
  const DriverModel & drivers;
  const TransitionModel & transitions;
  const RewardWeights & weights;
  const AgentModel & agents;
};

struct SearchNode
{
  struct Outcome
  {
    int child{-1};
    double probability{0.0};
  };
  struct OutcomeList
  {
    std::array<Outcome, kAllPolicyKinds.size()> items{};
    int size{0};
  };

  ScenarioState state;
  PolicyState policy_bw;
  int depth{0};
  int parent{-1};
  /// Post-warning policy on the edge from the parent.
  PolicyState policy_aw;
  Reward edge;
  /// Simplified branch: warnings fixed to NoWarning.
  bool rollout{false};
  /// Reached through a colliding edge; never expanded.
  bool terminal{false};
  /// Early take-over fired here; the spine ends at this node.
  bool take_over_forced{false};
  std::vector<int> children;
  /// Per warning, the children reached and their probabilities. Empty for leaves.
  std::array<OutcomeList, kAllWarnings.size()> outcomes{};
  /// Q per warning; only warnings with outcomes are evaluated, others stay collision.
  std::array<Reward, kAllWarnings.size()> q{};
  Reward value;
  Warning best_warning{Warning::NoWarning};
};

/// Arena-backed tree; children always have larger indices than their parent.
struct SearchTree
{
  std::vector<SearchNode> nodes;
  /// Deepest spine node reached by forward simulation.
  int spine_leaf{0};
  int horizon{0};

  const SearchNode & root() const { return nodes.front(); }
  std::size_t size() const { return nodes.size(); }
  /// Spine node indices from the root down to spine_leaf.
  std::vector<int> spine() const;

  /// One node per line: index, parent, depth, policy_bw, rollout, value, best warning.
  void dump(std::ostream & os) const;
};

struct SearchResult
{
  SearchTree tree;
  /// Spine warnings w_0..w_{H-1}; NoWarning past the end of the spine.
  std::vector<Warning> warnings;

  const std::array<Reward, kAllWarnings.size()> & root_q() const { return tree.root().q; }
};

struct PomdpDecision
{
  Warning warning{Warning::NoWarning};
  std::array<Reward, kAllWarnings.size()> expected_q{};
  std::vector<std::pair<PolicyState, double>> support;
};

/// Argmax over warnings with ties broken toward the less severe one; TakeOver when all collide.
Warning best_of(const std::array<Reward, kAllWarnings.size()> & q);

/// Closed-form node bound of the simplified tree.
std::size_t simplified_node_bound(int horizon, int outcomes_per_node);

class WarningPlanner
{
public:
  WarningPlanner(PlanningModel model, PlannerConfig config);

  const PlannerConfig & config() const { return config_; }

  SearchResult search(const ScenarioState & state0, const PolicyState & pi_hat) const;

  SearchTree forward_simulation(const ScenarioState & state0, const PolicyState & pi_hat) const;
  std::vector<Warning> back_propagation(SearchTree & tree) const;

  Warning select_warning_mdp(
    const Belief & b, const ScenarioState & state, double th_safety) const;
  PomdpDecision select_warning_pomdp(const Belief & b, const ScenarioState & state) const;

private:
  int add_child(SearchTree & tree, int parent, const PolicyState & pi_aw) const;
  void roll_out(SearchTree & tree, int start) const;
  bool chain_collides(const SearchTree & tree, int start) const;
  bool reactions_fail(const SearchTree & tree, int node) const;

  PlanningModel model_;
  PlannerConfig config_;
};

}  // namespace driver_warning
