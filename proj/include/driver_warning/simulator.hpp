#pragma once

#include "driver_warning/baselines.hpp"
#include "driver_warning/behavior_transition.hpp"
#include "driver_warning/driver_policies.hpp"
#include "driver_warning/estimator.hpp"
#include "driver_warning/planner.hpp"
#include "driver_warning/rewards.hpp"
#include "driver_warning/types.hpp"
#include "driver_warning/world.hpp"

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace driver_warning
{

enum class ScenarioKind : std::uint8_t { FrontHardBrake, LaneChange };

std::string_view to_string(ScenarioKind k);
std::optional<ScenarioKind> scenario_kind_from_string(std::string_view name);

enum class Method : std::uint8_t { EstStateMdp, ApproxPomdp, TtcBaseline, RuleBaseline, NoWarningControl };

inline constexpr std::array<Method, 5> kAllMethods = {
  Method::EstStateMdp, Method::ApproxPomdp, Method::TtcBaseline, Method::RuleBaseline,
  Method::NoWarningControl};

std::string_view to_string(Method m);
std::optional<Method> method_from_string(std::string_view name);

/// A background vehicle placed relative to the ego; it drives IDM in its lane.
struct BackgroundVehicle
{
  int lane{0};
  /// Front-bumper position relative to the anchor's front bumper (m); negative is behind.
  double rel_s{-34.5};
  double v0{11.0};
  double v_desired{11.0};
  /// Anchor of rel_s: the hazard vehicle when true, else the ego.
  bool relative_to_hazard{false};

  bool operator==(const BackgroundVehicle &) const = default;
};

struct ScenarioConfig
{
  ScenarioKind kind{ScenarioKind::FrontHardBrake};
  double d_gap0{13.5};
  double ego_v0{11.0};
  int ego_lane{0};
  int lane_count{2};
  double lane_width{3.5};
  double speed_limit{16.7};

  /// Hazard script. FrontHardBrake: same lane, brakes from hazard_v0 to
  /// hazard_v_target at hazard_decel. LaneChange: adjacent lane at hazard_v0,
  /// cuts into the ego lane over cut_in_duration.
  bool hazard_enabled{true};
  double hazard_v0{12.0};
  double hazard_v_target{8.0};
  double hazard_decel{-6.0};
  double trigger_time{1.0};
  double cut_in_duration{1.0};

  std::vector<BackgroundVehicle> background;

  double episode_length{8.0};
  double dt{0.5};

  bool operator==(const ScenarioConfig &) const = default;

  int steps() const;
};

/// Throws std::invalid_argument on a malformed scenario.
void validate(const ScenarioConfig & config);

/// Default scenario of the given kind with initial gap `d_gap0` to the hazard.
ScenarioConfig build_scenario(ScenarioKind kind, double d_gap0);

/// Agent id of the hazard vehicle; background vehicles follow from kHazardId + 1.
inline constexpr int kHazardId = 1;

ScenarioState initial_state(const ScenarioConfig & config, const VehicleFootprint & fp = {});

/**
 * @brief Surrounding-agent model g for the scripted scenarios.
 *
 * The hazard runs its maneuver from the trigger time on; background vehicles
 * and the hazard after its cut-in follow IDM against the nearest vehicle
 * ahead in their lane, ego included. Deterministic in the scenario state.
 */
class ScriptedAgents final : public AgentModel
{
public:
  ScriptedAgents(
    ScenarioConfig config, IdmParams idm, AccelLimits limits, VehicleFootprint fp = {});

  std::vector<VehicleState> next_frames(const ScenarioState & state) const override;

private:
  VehicleState step_hard_brake(const VehicleState & x, const ScenarioState & state) const;
  VehicleState step_cut_in(const VehicleState & x, const ScenarioState & state, int self) const;
  VehicleState step_idm(
    const VehicleState & x, double v_desired, const ScenarioState & state, int self) const;

  ScenarioConfig config_;
  IdmParams idm_;
  AccelLimits limits_;
  VehicleFootprint fp_;
};

/// Agents' next frames under the scenario script.
std::vector<VehicleState> surrounding_step(
  const ScenarioState & state, const ScenarioConfig & config, const IdmParams & idm,
  const AccelLimits & limits, const VehicleFootprint & fp = {});

struct EstimatorConfig
{
  double th_safety{0.2};
  std::map<PolicyState, double> initial_belief{
    {PolicyState{PolicyKind::Safe, 0}, 0.5}, {PolicyState{PolicyKind::Blind, 0}, 0.5}};

  bool operator==(const EstimatorConfig &) const = default;
};

/// Every model parameter an episode needs.
struct ModelConfig
{
  DriverParams driver;
  TransitionModel transitions{TransitionModel::make_default()};
  RewardWeights weights;
  RuleParams rule;
  PlannerConfig planner;
  EstimatorConfig estimator;
  PolicyState initial_policy{PolicyKind::Blind, 0};
};

/// Throws std::invalid_argument when the parts disagree (dt, discount) or are invalid.
void validate(const ModelConfig & models);

struct StepRecord
{
  /// World at the start of the step.
  ScenarioState state;
  Warning warning{Warning::NoWarning};
  /// Post-warning true policy that produced the action.
  PolicyState true_policy;
  /// Sampled driver action (commanded).
  DriverAction action;
  /// Belief after the filter update, i.e. before the next warning.
  Belief belief;
  /// Trajectory reward of this step's transition.
  Reward r_traj;
  bool degenerate_observation{false};
};

struct EpisodeResult
{
  std::vector<StepRecord> steps;
  /// World after the last executed step.
  ScenarioState final_state;
  Reward total;
  std::array<int, kAllWarnings.size()> warning_counts{};
  bool collision{false};
  /// Largest |sum(b) - 1| seen across the filter updates.
  double max_belief_norm_error{0.0};
};

/// Scripted true-policy override: at step k the true post-warning policy is set.
using PolicyScript = std::map<int, PolicyState>;
/// Scripted warnings: at step k this warning is issued regardless of the method.
using WarningScript = std::map<int, Warning>;

struct EpisodeOptions
{
  std::optional<WarningScript> warnings;
  std::optional<PolicyScript> true_policy;
};

/**
 * @brief One closed-loop episode.
 *
 * Per step: select a warning, sample the true policy transition, sample the
 * driver action from the post-warning policy, advance the world, update the
 * belief, and accumulate the edge reward. A collision ends the episode.
 * Randomness comes from two streams of `seed`: one for policy transitions and
 * one for action noise, each drawn exactly once per step.
 */
EpisodeResult episode(
  const ScenarioConfig & config, Method method, std::uint64_t seed, const ModelConfig & models,
  const EpisodeOptions & options = {});

/// Warning chosen by `method` for the current world and belief.
Warning select_warning(
  Method method, const WarningPlanner & planner, const Belief & belief,
  const ScenarioState & state, const ModelConfig & models);

/// Per-step trace: t, ego_s, ego_v, ego_a, lane, gap, warning, true_policy, belief_blind, belief_safe, belief_brake, r_traj.
void write_trace_csv(std::ostream & os, const EpisodeResult & result, const DriverModel & drivers);

/// Estimator demo: scripted Voice warnings and a scripted true-policy switch.
struct EstimateDemoConfig
{
  double d_gap0{13.5};
  std::vector<double> voice_times{0.5, 1.0};
  /// True policy becomes DelayBlindToSafe(0) at this time.
  double switch_time{0.5};
  double delay_duration{1.5};
  double episode_length{8.0};
};

struct EstimateDemoResult
{
  EpisodeResult episode;
  /// Time from which the true driver acts as Safe.
  double safe_from{0.0};
  /// First time at or after safe_from that b(Safe) exceeded the threshold, if ever.
  std::optional<double> converged_at;
};

EstimateDemoResult estimate_demo(
  const EstimateDemoConfig & demo, std::uint64_t seed, const ModelConfig & models,
  double threshold = 0.9);

/// Belief trace CSV: t, one column per policy kind aggregate, then blind_acting.
void write_belief_csv(std::ostream & os, const EpisodeResult & result, const DriverModel & drivers);

}  // namespace driver_warning
