#include "driver_warning/simulator.hpp"

#include "driver_warning/kinematics.hpp"
#include "driver_warning/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace driver_warning
{

std::string_view to_string(ScenarioKind k)
{
  switch (k) {
    case ScenarioKind::FrontHardBrake:
      return "FrontHardBrake";
    case ScenarioKind::LaneChange:
      return "LaneChange";
  }
  return "?";
}

std::optional<ScenarioKind> scenario_kind_from_string(std::string_view name)
{
  for (ScenarioKind k : {ScenarioKind::FrontHardBrake, ScenarioKind::LaneChange}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  return std::nullopt;
}

std::string_view to_string(Method m)
{
  switch (m) {
    case Method::EstStateMdp:
      return "EstStateMdp";
    case Method::ApproxPomdp:
      return "ApproxPomdp";
    case Method::TtcBaseline:
      return "TtcBaseline";
    case Method::RuleBaseline:
      return "RuleBaseline";
    case Method::NoWarningControl:
      return "NoWarningControl";
  }
  return "?";
}

std::optional<Method> method_from_string(std::string_view name)
{
  for (Method m : kAllMethods) {
    if (to_string(m) == name) {
      return m;
    }
  }
  return std::nullopt;
}

int ScenarioConfig::steps() const { return static_cast<int>(std::lround(episode_length / dt)); }

void validate(const ScenarioConfig & c)
{
  if (!(c.d_gap0 > 0.0)) {
    throw std::invalid_argument("scenario d_gap0 must be positive");
  }
  if (!(c.dt > 0.0)) {
    throw std::invalid_argument("scenario dt must be positive");
  }
  if (!(c.episode_length > 0.0) ||
      std::abs(c.episode_length / c.dt - std::round(c.episode_length / c.dt)) > 1e-9) {
    throw std::invalid_argument("episode length must be a positive multiple of dt");
  }
  if (c.lane_count < 1 || c.ego_lane < 0 || c.ego_lane >= c.lane_count) {
    throw std::invalid_argument("ego lane outside the map");
  }
  if (c.kind == ScenarioKind::LaneChange && c.ego_lane + 1 >= c.lane_count) {
    throw std::invalid_argument("lane-change scenario needs a lane left of the ego");
  }
  if (!(c.lane_width > 0.0) || c.ego_v0 < 0.0 || c.hazard_v0 < 0.0 || c.hazard_v_target < 0.0) {
    throw std::invalid_argument("scenario speeds and widths must be non-negative");
  }
  if (!(c.hazard_decel < 0.0)) {
    throw std::invalid_argument("hazard deceleration must be negative");
  }
  if (!(c.cut_in_duration > 0.0)) {
    throw std::invalid_argument("cut-in duration must be positive");
  }
  for (const auto & bg : c.background) {
    if (bg.lane < 0 || bg.lane >= c.lane_count || bg.v0 < 0.0 || !(bg.v_desired > 0.0)) {
      throw std::invalid_argument("background vehicle outside the map or with invalid speed");
    }
  }
}

ScenarioConfig build_scenario(ScenarioKind kind, double d_gap0)
{
  if (!(d_gap0 > 0.0)) {
    throw std::invalid_argument("build_scenario: d_gap0 must be positive");
  }
  ScenarioConfig c;
  c.kind = kind;
  c.d_gap0 = d_gap0;
  c.background.push_back(BackgroundVehicle{0, -34.5, 11.0, 11.0});
  switch (kind) {
    case ScenarioKind::FrontHardBrake:
      c.hazard_v0 = 12.0;
      c.hazard_v_target = 8.0;
      // A vehicle pacing the ego in the adjacent lane keeps the hazard an in-lane problem.
      c.background.push_back(BackgroundVehicle{1, 0.0, 11.0, 11.0});
      break;
    case ScenarioKind::LaneChange:
      c.hazard_v0 = 8.0;
      c.hazard_v_target = 8.0;
      // The hazard leaves a congested adjacent lane moving at its speed. The
      // platoon head cruises at 8 m/s; the others run IDM at their 8 m/s
      // equilibrium spacing (gap ~11.8 m with v_desired 11).
      c.background.push_back(BackgroundVehicle{1, 16.3, 8.0, 8.0, true});
      for (double rel : {-16.3, -32.6, -48.9}) {
        c.background.push_back(BackgroundVehicle{1, rel, 8.0, 11.0, true});
      }
      break;
  }
  return c;
}

ScenarioState initial_state(const ScenarioConfig & c, const VehicleFootprint & fp)
{
  validate(c);
  ScenarioState state;
  state.map = MapInfo{c.lane_count, c.lane_width, c.speed_limit};
  state.dt = c.dt;
  state.t = 0.0;
  state.ego.push(VehicleState{0.0, c.ego_lane, 0.0, c.ego_v0, 0.0});

  const double hazard_s = c.d_gap0 + fp.length;
  const int hazard_lane = c.kind == ScenarioKind::LaneChange ? c.ego_lane + 1 : c.ego_lane;
  state.agents.push_back(
    AgentTrack{kHazardId, StateHistory(VehicleState{hazard_s, hazard_lane, 0.0, c.hazard_v0, 0.0})});
  int id = kHazardId + 1;
  for (const auto & bg : c.background) {
    const double s = bg.rel_s + (bg.relative_to_hazard ? hazard_s : 0.0);
    state.agents.push_back(
      AgentTrack{id++, StateHistory(VehicleState{s, bg.lane, 0.0, bg.v0, 0.0})});
  }
  return state;
}

ScriptedAgents::ScriptedAgents(
  ScenarioConfig config, IdmParams idm, AccelLimits limits, VehicleFootprint fp)
: config_(std::move(config)), idm_(idm), limits_(limits), fp_(fp)
{
  validate(config_);
}

VehicleState ScriptedAgents::step_hard_brake(
  const VehicleState & x, const ScenarioState & state) const
{
  const bool active = config_.hazard_enabled && state.t >= config_.trigger_time - 1e-9;
  if (!active || x.v <= config_.hazard_v_target) {
    return integrate_longitudinal(x, 0.0, state.dt);
  }
  const double a = config_.hazard_decel;
  const double t_reach = (config_.hazard_v_target - x.v) / a;
  if (t_reach >= state.dt) {
    return integrate_longitudinal(x, a, state.dt);
  }
  // Reaches the target speed inside the step, then holds it.
  VehicleState next = x;
  next.s = x.s + x.v * t_reach + 0.5 * a * t_reach * t_reach +
           config_.hazard_v_target * (state.dt - t_reach);
  next.v = config_.hazard_v_target;
  next.a = (next.v - x.v) / state.dt;
  return next;
}

VehicleState ScriptedAgents::step_idm(
  const VehicleState & x, double v_desired, const ScenarioState & state, int self) const
{
  std::optional<double> gap;
  double v_lead = 0.0;
  auto consider = [&](const VehicleState & other) {
    if (other.s <= x.s || !occupies_lane(other, x.lane, state.map, fp_)) {
      return;
    }
    const double g = other.s - fp_.length - x.s;
    if (!gap || g < *gap) {
      gap = g;
      v_lead = other.v;
    }
  };
  consider(state.ego_now());
  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    if (static_cast<int>(i) != self) {
      consider(state.agents[i].current());
    }
  }
  IdmParams p = idm_;
  p.v_desired = v_desired;
  const double accel = idm_accel(x.v, gap, v_lead, p, limits_);
  return integrate_longitudinal(x, accel, state.dt);
}

VehicleState ScriptedAgents::step_cut_in(
  const VehicleState & x, const ScenarioState & state, int self) const
{
  const int target_lane = config_.ego_lane;
  const bool active = config_.hazard_enabled && state.t >= config_.trigger_time - 1e-9;
  if (x.lane == target_lane) {
    return step_idm(x, config_.hazard_v0, state, self);
  }
  if (!active) {
    return integrate_longitudinal(x, 0.0, state.dt);
  }
  VehicleState next = integrate_longitudinal(x, 0.0, state.dt);
  const double direction = target_lane < x.lane ? -1.0 : 1.0;
  const double rate = state.map.lane_width / config_.cut_in_duration;
  next.lat_offset = x.lat_offset + direction * rate * state.dt;
  if (std::abs(next.lat_offset) >= state.map.lane_width - 1e-9) {
    next.lane = target_lane;
    next.lat_offset = 0.0;
  }
  return next;
}

std::vector<VehicleState> ScriptedAgents::next_frames(const ScenarioState & state) const
{
  std::vector<VehicleState> out;
  out.reserve(state.agents.size());
  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    const auto & agent = state.agents[i];
    const VehicleState & x = agent.current();
    const int self = static_cast<int>(i);
    if (agent.id == kHazardId) {
      out.push_back(
        config_.kind == ScenarioKind::FrontHardBrake ? step_hard_brake(x, state)
                                                     : step_cut_in(x, state, self));
      continue;
    }
    const auto bg_index = static_cast<std::size_t>(agent.id - kHazardId - 1);
    const double v_desired =
      bg_index < config_.background.size() ? config_.background[bg_index].v_desired : idm_.v_desired;
    out.push_back(step_idm(x, v_desired, state, self));
  }
  return out;
}

std::vector<VehicleState> surrounding_step(
  const ScenarioState & state, const ScenarioConfig & config, const IdmParams & idm,
  const AccelLimits & limits, const VehicleFootprint & fp)
{
  return ScriptedAgents(config, idm, limits, fp).next_frames(state);
}

void validate(const ModelConfig & m)
{
  DriverModel check(m.driver);
  validate(m.weights);
  validate(m.rule);
  if (std::abs(m.planner.dt - m.driver.dt) > 1e-12) {
    throw std::invalid_argument("planner and driver dt differ");
  }
  if (std::abs(m.planner.gamma - m.weights.gamma) > 1e-12) {
    throw std::invalid_argument("planner and reward discount differ");
  }
  if (!(m.estimator.th_safety > 0.0 && m.estimator.th_safety < 1.0)) {
    throw std::invalid_argument("th_safety must lie in (0, 1)");
  }
  const Belief initial(m.estimator.initial_belief);
  for (const auto & [pi, p] : initial.probs()) {
    if (!m.transitions.kinds().contains(pi.kind)) {
      throw std::invalid_argument("initial belief outside the transition model");
    }
  }
  if (!m.transitions.kinds().contains(m.initial_policy.kind)) {
    throw std::invalid_argument("initial policy outside the transition model");
  }
}

Warning select_warning(
  Method method, const WarningPlanner & planner, const Belief & belief,
  const ScenarioState & state, const ModelConfig & models)
{
  switch (method) {
    case Method::EstStateMdp:
      return planner.select_warning_mdp(belief, state, models.estimator.th_safety);
    case Method::ApproxPomdp:
      return planner.select_warning_pomdp(belief, state).warning;
    case Method::TtcBaseline:
      return ttc_warning(time_to_collision(state, models.rule.footprint), models.rule);
    case Method::RuleBaseline:
      return rule_based_warning(state, models.rule);
    case Method::NoWarningControl:
      return Warning::NoWarning;
  }
  throw std::logic_error("unknown method");
}

namespace
{

constexpr std::uint64_t kTransitionStream = 1;
constexpr std::uint64_t kActionStream = 2;

PolicyState sample_outcome(const std::vector<TransitionOutcome> & outcomes, double u)
{
  double cumulative = 0.0;
  for (const auto & o : outcomes) {
    cumulative += o.probability;
    if (u < cumulative) {
      return o.policy;
    }
  }
  return outcomes.back().policy;
}

}  // namespace

EpisodeResult episode(
  const ScenarioConfig & config, Method method, std::uint64_t seed, const ModelConfig & models,
  const EpisodeOptions & options)
{
  validate(config);
  if (std::abs(config.dt - models.driver.dt) > 1e-12) {
    throw std::invalid_argument("scenario and driver dt differ");
  }
  const DriverModel drivers(models.driver);
  const ScriptedAgents agents(config, models.driver.idm, models.driver.limits, models.driver.footprint);
  const WarningPlanner planner(
    PlanningModel{drivers, models.transitions, models.weights, agents}, models.planner);
  const VehicleFootprint & fp = models.driver.footprint;

  RngStream transition_rng(seed, kTransitionStream);
  RngStream action_rng(seed, kActionStream);

  EpisodeResult result;
  result.total = Reward(0.0);
  ScenarioState state = initial_state(config, fp);
  Belief belief(models.estimator.initial_belief);
  PolicyState pi_bw = models.initial_policy;

  const int steps = config.steps();
  result.steps.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    Warning w = Warning::NoWarning;
    if (options.warnings) {
      const auto it = options.warnings->find(k);
      w = it == options.warnings->end() ? Warning::NoWarning : it->second;
    } else {
      w = select_warning(method, planner, belief, state, models);
    }

    const double u = transition_rng.uniform();
    PolicyState pi_aw = sample_outcome(models.transitions.query(pi_bw, w), u);
    if (options.true_policy) {
      const auto it = options.true_policy->find(k);
      if (it != options.true_policy->end()) {
        pi_aw = it->second;
      }
    }

    const DriverAction action =
      drivers.policy_action(pi_aw, state).sample(action_rng, models.driver.limits);
    const ScenarioState next = advance_world(state, action, agents);
    const FilterStep filtered =
      filter_step(belief, w, action, state, models.transitions, drivers);
    const Reward r = edge_reward(state, next, models.weights, fp);

    result.max_belief_norm_error =
      std::max(result.max_belief_norm_error, std::abs(filtered.next.total() - 1.0));
    result.total += r;
    ++result.warning_counts[index_of(w)];
    result.steps.push_back(
      StepRecord{state, w, pi_aw, action, filtered.next, r, filtered.degenerate});

    state = next;
    belief = filtered.next;
    pi_bw = drivers.tick(pi_aw);
    if (r.is_collision()) {
      result.collision = true;
      break;
    }
  }
  result.final_state = state;
  return result;
}

namespace
{

void write_number(std::ostream & os, double v)
{
  if (std::isnan(v)) {
    os << "nan";
  } else if (std::isinf(v)) {
    os << (v < 0 ? "-inf" : "inf");
  } else {
    os << v;
  }
}

}  // namespace

void write_trace_csv(std::ostream & os, const EpisodeResult & result, const DriverModel & drivers)
{
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::fixed << std::setprecision(6);
  os << "t,ego_s,ego_v,ego_a,lane,gap,warning,true_policy,belief_blind,belief_safe,belief_brake,"
        "r_traj\n";
  const VehicleFootprint & fp = drivers.params().footprint;
  for (const auto & step : result.steps) {
    const VehicleState & ego = step.state.ego_now();
    const auto lead = gap_to_lead(step.state, fp);
    os << step.state.t << ',' << ego.s << ',' << ego.v << ',' << ego.a << ',' << ego.lane << ',';
    write_number(os, lead ? lead->gap : std::numeric_limits<double>::quiet_NaN());
    os << ',' << to_string(step.warning) << ',' << to_string(step.true_policy) << ','
       << blind_acting_mass(step.belief, drivers) << ','
       << step.belief.kind_mass(PolicyKind::Safe) << ','
       << step.belief.kind_mass(PolicyKind::Brake) << ',';
    write_number(os, step.r_traj.value());
    os << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

void write_belief_csv(std::ostream & os, const EpisodeResult & result, const DriverModel & drivers)
{
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::fixed << std::setprecision(6);
  os << 't';
  for (PolicyKind k : kAllPolicyKinds) {
    os << ',' << to_string(k);
  }
  os << ",blind_acting\n";
  for (const auto & step : result.steps) {
    // The stored belief is the one held at the start of the next step.
    os << step.state.t + step.state.dt;
    for (double m : step.belief.kind_masses()) {
      os << ',' << m;
    }
    os << ',' << blind_acting_mass(step.belief, drivers) << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

EstimateDemoResult estimate_demo(
  const EstimateDemoConfig & demo, std::uint64_t seed, const ModelConfig & models,
  double threshold)
{
  ModelConfig m = models;
  m.driver.delay_duration = demo.delay_duration;
  const DriverModel drivers(m.driver);
  const double dt = m.driver.dt;

  ScenarioConfig scenario = build_scenario(ScenarioKind::FrontHardBrake, demo.d_gap0);
  scenario.dt = dt;
  scenario.episode_length = demo.episode_length;

  auto step_of = [dt](double t) { return static_cast<int>(std::lround(t / dt)); };
  EpisodeOptions options;
  options.warnings = WarningScript{};
  for (double t : demo.voice_times) {
    (*options.warnings)[step_of(t)] = Warning::Voice;
  }
  // The true driver enters the delay at the switch and stays on that track.
  options.true_policy = PolicyScript{};
  PolicyState pi{PolicyKind::DelayBlindToSafe, 0};
  for (int k = step_of(demo.switch_time); k < scenario.steps() && drivers.acts_blind(pi); ++k) {
    (*options.true_policy)[k] = pi;
    pi = drivers.tick(pi);
  }

  EstimateDemoResult out;
  out.episode = episode(scenario, Method::NoWarningControl, seed, m, options);
  out.safe_from = demo.switch_time + drivers.delay_steps() * dt;
  for (const auto & step : out.episode.steps) {
    const double t = step.state.t + step.state.dt;
    if (t >= out.safe_from - 1e-9 && step.belief.kind_mass(PolicyKind::Safe) > threshold) {
      out.converged_at = t;
      break;
    }
  }
  return out;
}

}  // namespace driver_warning
