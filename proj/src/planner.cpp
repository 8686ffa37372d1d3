#include "driver_warning/planner.hpp"

#include "driver_warning/kinematics.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace driver_warning
{

Warning best_of(const std::array<Reward, kAllWarnings.size()> & q)
{
  // When every option collides, hand over control rather than stay silent.
  if (std::all_of(q.begin(), q.end(), [](const Reward & r) { return r.is_collision(); })) {
    return Warning::TakeOver;
  }
  Warning best = Warning::NoWarning;
  for (Warning w : kAllWarnings) {
    if (q[index_of(w)] > q[index_of(best)]) {
      best = w;
    }
  }
  return best;
}

std::size_t simplified_node_bound(int horizon, int outcomes_per_node)
{
  const auto h = static_cast<std::size_t>(horizon);
  return 1 + h * static_cast<std::size_t>(outcomes_per_node) * (h + 1);
}

std::vector<int> SearchTree::spine() const
{
  std::vector<int> out;
  for (int i = spine_leaf; i >= 0; i = nodes[static_cast<std::size_t>(i)].parent) {
    out.push_back(i);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

void SearchTree::dump(std::ostream & os) const
{
  os << "index\tparent\tdepth\tpolicy_bw\trollout\tvalue\tbest_warning\n";
  os << std::setprecision(10);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto & n = nodes[i];
    os << i << '\t' << n.parent << '\t' << n.depth << '\t' << to_string(n.policy_bw) << '\t'
       << (n.rollout ? 1 : 0) << '\t' << n.value.value() << '\t' << to_string(n.best_warning)
       << '\n';
  }
}

WarningPlanner::WarningPlanner(PlanningModel model, PlannerConfig config)
: model_(model), config_(config)
{
  if (config_.horizon < 1) {
    throw std::invalid_argument("PlannerConfig.horizon must be at least 1");
  }
  if (!(config_.gamma > 0.0 && config_.gamma <= 1.0)) {
    throw std::invalid_argument("PlannerConfig.gamma must lie in (0, 1]");
  }
}

int WarningPlanner::add_child(SearchTree & tree, int parent, const PolicyState & pi_aw) const
{
  const auto p = static_cast<std::size_t>(parent);
  for (int c : tree.nodes[p].children) {
    if (tree.nodes[static_cast<std::size_t>(c)].policy_aw == pi_aw) {
      return c;
    }
  }
  const ScenarioState & from = tree.nodes[p].state;
  const DriverAction action = model_.drivers.policy_action(pi_aw, from).mean;

  SearchNode child;
  child.state = advance_world(from, action, model_.agents);
  child.edge = edge_reward(from, child.state, model_.weights, model_.drivers.params().footprint);
  child.terminal = child.edge.is_collision();
  child.policy_aw = pi_aw;
  child.policy_bw = model_.drivers.tick(pi_aw);
  child.depth = tree.nodes[p].depth + 1;
  child.parent = parent;

  const int index = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back(std::move(child));
  tree.nodes[p].children.push_back(index);
  return index;
}

void WarningPlanner::roll_out(SearchTree & tree, int start) const
{
  int current = start;
  while (true) {
    auto & node = tree.nodes[static_cast<std::size_t>(current)];
    node.rollout = true;
    if (node.terminal || node.depth >= tree.horizon) {
      return;
    }
    const PolicyState pi = node.policy_bw;
    const int next = add_child(tree, current, pi);
    auto & list = tree.nodes[static_cast<std::size_t>(current)].outcomes[index_of(Warning::NoWarning)];
    list.items[0] = {next, 1.0};
    list.size = 1;
    current = next;
  }
}

bool WarningPlanner::chain_collides(const SearchTree & tree, int start) const
{
  for (int i = start;;) {
    const auto & node = tree.nodes[static_cast<std::size_t>(i)];
    if (node.terminal) {
      return true;
    }
    if (node.children.empty()) {
      return false;
    }
    i = node.children.front();
  }
}

bool WarningPlanner::reactions_fail(const SearchTree & tree, int node) const
{
  const auto & n = tree.nodes[static_cast<std::size_t>(node)];
  bool any_reaction = false;
  for (Warning w : {Warning::Text, Warning::Voice, Warning::Alarm}) {
    const auto & list = n.outcomes[index_of(w)];
    bool fails = false;
    for (int k = 0; k < list.size; ++k) {
      const auto & child = tree.nodes[static_cast<std::size_t>(list.items[k].child)];
      if (child.policy_aw.kind == PolicyKind::Blind) {
        continue;
      }
      any_reaction = true;
      if (chain_collides(tree, list.items[k].child)) {
        fails = true;
        break;
      }
    }
    if (!fails) {
      return false;
    }
  }
  return any_reaction;
}

SearchTree WarningPlanner::forward_simulation(
  const ScenarioState & state0, const PolicyState & pi_hat) const
{
  SearchTree tree;
  tree.horizon = config_.horizon;
  tree.nodes.reserve(simplified_node_bound(config_.horizon, 4));
  {
    SearchNode root;
    root.state = state0;
    root.policy_bw = pi_hat;
    root.policy_aw = pi_hat;
    tree.nodes.push_back(std::move(root));
  }

  int current = 0;
  while (true) {
    tree.spine_leaf = current;
    if (tree.nodes[static_cast<std::size_t>(current)].depth >= config_.horizon) {
      break;
    }
    const PolicyState pi_bw = tree.nodes[static_cast<std::size_t>(current)].policy_bw;
    const bool spine_node = pi_bw.kind == PolicyKind::Blind;

    for (Warning w : kAllWarnings) {
      for (const auto & outcome : model_.transitions.query(pi_bw, w)) {
        const int child = add_child(tree, current, outcome.policy);
        auto & list = tree.nodes[static_cast<std::size_t>(current)].outcomes[index_of(w)];
        list.items[static_cast<std::size_t>(list.size++)] = {child, outcome.probability};
      }
    }

    int next_spine = -1;
    const std::vector<int> children = tree.nodes[static_cast<std::size_t>(current)].children;
    for (int c : children) {
      const auto & child = tree.nodes[static_cast<std::size_t>(c)];
      if (spine_node && child.policy_aw.kind == PolicyKind::Blind) {
        next_spine = c;
      } else {
        roll_out(tree, c);
      }
    }

    if (spine_node && config_.early_take_over && reactions_fail(tree, current)) {
      // The Blind continuation is left unexpanded: postponing a certain take-over is not allowed.
      tree.nodes[static_cast<std::size_t>(current)].take_over_forced = true;
      break;
    }
    if (next_spine < 0 || tree.nodes[static_cast<std::size_t>(next_spine)].terminal) {
      break;
    }
    current = next_spine;
  }
  return tree;
}

std::vector<Warning> WarningPlanner::back_propagation(SearchTree & tree) const
{
  const double gamma = config_.gamma;
  for (auto it = tree.nodes.rbegin(); it != tree.nodes.rend(); ++it) {
    SearchNode & node = *it;
    node.q.fill(Reward::collision());
    bool has_outcomes = false;
    for (Warning w : kAllWarnings) {
      const auto & list = node.outcomes[index_of(w)];
      if (list.size == 0) {
        continue;
      }
      has_outcomes = true;
      Reward q(warning_cost(w, model_.weights));
      for (int k = 0; k < list.size; ++k) {
        const auto & child = tree.nodes[static_cast<std::size_t>(list.items[k].child)];
        q += (child.edge + child.value.scaled(gamma)).scaled(list.items[k].probability);
      }
      node.q[index_of(w)] = q;
    }
    if (!has_outcomes) {
      // Leaf, terminal node, or a cut spine continuation.
      node.value = Reward(0.0);
      node.best_warning = Warning::NoWarning;
      node.q[index_of(Warning::NoWarning)] = node.value;
      continue;
    }
    if (node.take_over_forced) {
      for (Warning w : kAllWarnings) {
        if (w != Warning::TakeOver) {
          node.q[index_of(w)] = Reward::collision();
        }
      }
    }
    node.best_warning = best_of(node.q);
    node.value = node.q[index_of(node.best_warning)];
  }

  std::vector<Warning> warnings(static_cast<std::size_t>(config_.horizon), Warning::NoWarning);
  for (int i : tree.spine()) {
    const auto & node = tree.nodes[static_cast<std::size_t>(i)];
    if (node.depth < config_.horizon && !node.children.empty()) {
      warnings[static_cast<std::size_t>(node.depth)] = node.best_warning;
    }
  }
  return warnings;
}

SearchResult WarningPlanner::search(const ScenarioState & state0, const PolicyState & pi_hat) const
{
  if (!model_.transitions.kinds().contains(pi_hat.kind)) {
    throw std::invalid_argument("search: policy outside the transition model");
  }
  SearchResult result;
  result.tree = forward_simulation(state0, pi_hat);
  result.warnings = back_propagation(result.tree);
  return result;
}

Warning WarningPlanner::select_warning_mdp(
  const Belief & b, const ScenarioState & state, double th_safety) const
{
  const PolicyState pi_hat = extract_estimate(b, th_safety, model_.drivers);
  return search(state, pi_hat).warnings.front();
}

PomdpDecision WarningPlanner::select_warning_pomdp(
  const Belief & b, const ScenarioState & state) const
{
  PomdpDecision decision;
  double mass = 0.0;
  for (const auto & [pi, p] : b.probs()) {
    if (p >= config_.support_cutoff && model_.transitions.kinds().contains(pi.kind)) {
      decision.support.emplace_back(pi, p);
      mass += p;
    }
  }
  if (decision.support.empty()) {
    throw std::invalid_argument("select_warning_pomdp: empty support");
  }
  decision.expected_q.fill(Reward(0.0));
  for (auto & [pi, p] : decision.support) {
    p /= mass;
    const SearchResult result = search(state, pi);
    for (Warning w : kAllWarnings) {
      decision.expected_q[index_of(w)] += result.root_q()[index_of(w)].scaled(p);
    }
  }
  decision.warning = best_of(decision.expected_q);
  return decision;
}

}  // namespace driver_warning
