#include "test_support.hpp"

#include "driver_warning/simulator.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace driver_warning;
using K = PolicyKind;

namespace
{

const AgentTrack & hazard(const ScenarioState & s)
{
  for (const auto & a : s.agents) {
    if (a.id == kHazardId) {
      return a;
    }
  }
  throw std::logic_error("no hazard");
}

ScenarioState step_agents_only(const ScenarioState & s, const ScenarioConfig & config)
{
  const ModelConfig models;
  const ScriptedAgents agents(config, models.driver.idm, models.driver.limits);
  return advance_world(s, DriverAction{0.0}, agents);
}

}  // namespace

TEST_CASE("build_scenario: defaults")
{
  const auto fhb = build_scenario(ScenarioKind::FrontHardBrake, 13.5);
  CHECK(fhb.hazard_v0 == 12.0);
  CHECK(fhb.hazard_v_target == 8.0);
  CHECK(fhb.ego_v0 == 11.0);
  CHECK(fhb.steps() == 16);
  const auto lc = build_scenario(ScenarioKind::LaneChange, 8.5);
  CHECK(lc.hazard_v0 == 8.0);
  CHECK_THROWS_AS(build_scenario(ScenarioKind::FrontHardBrake, 0.0), std::invalid_argument);

  const auto s = initial_state(build_scenario(ScenarioKind::FrontHardBrake, 18.5));
  const auto lead = gap_to_lead(s);
  REQUIRE(lead);
  CHECK(lead->gap == doctest::Approx(18.5));
  CHECK(lead->agent_id == kHazardId);

  // The trailing vehicle sits 30 m behind the ego.
  bool found_trailer = false;
  for (const auto & a : s.agents) {
    const auto & x = a.current();
    if (x.lane == s.ego_now().lane && x.s < s.ego_now().s) {
      CHECK(s.ego_now().s - 4.5 - x.s == doctest::Approx(30.0));
      found_trailer = true;
    }
  }
  CHECK(found_trailer);
}

TEST_CASE("hard-brake script: 12 -> 9 -> 8 from the trigger")
{
  const auto config = build_scenario(ScenarioKind::FrontHardBrake, 13.5);
  auto s = initial_state(config);
  std::vector<double> speeds{hazard(s).current().v};
  for (int i = 0; i < 5; ++i) {
    s = step_agents_only(s, config);
    speeds.push_back(hazard(s).current().v);
  }
  // Trigger at 1.0 s: constant until then, then -6 m/s^2 until 8 m/s.
  CHECK(speeds == std::vector<double>{12.0, 12.0, 12.0, 9.0, 8.0, 8.0});
}

TEST_CASE("cut-in script: lateral position moves linearly over one lane width")
{
  auto config = build_scenario(ScenarioKind::LaneChange, 13.5);
  config.cut_in_duration = 1.5;
  auto s = initial_state(config);
  const auto & map = s.map;
  const double rate = map.lane_width / config.cut_in_duration;
  std::vector<double> lateral{lateral_center(hazard(s).current(), map)};
  while (s.t < config.trigger_time + config.cut_in_duration + 1.0) {
    s = step_agents_only(s, config);
    lateral.push_back(lateral_center(hazard(s).current(), map));
  }
  const double y0 = lateral.front();
  for (std::size_t k = 0; k < lateral.size(); ++k) {
    const double t = 0.5 * static_cast<double>(k);
    const double elapsed = std::clamp(t - config.trigger_time, 0.0, config.cut_in_duration);
    CAPTURE(t);
    CHECK(lateral[k] == doctest::Approx(y0 - rate * elapsed));
  }
  CHECK(hazard(s).current().lane == config.ego_lane);
  CHECK(hazard(s).current().v == doctest::Approx(8.0).epsilon(0.05));
}

TEST_CASE("background vehicle without a leader drives free-road IDM")
{
  ScenarioConfig config = build_scenario(ScenarioKind::FrontHardBrake, 13.5);
  config.hazard_enabled = false;
  config.background = {BackgroundVehicle{1, 200.0, 5.0, 11.0}};
  const ModelConfig models;
  auto s = initial_state(config);
  const auto next = surrounding_step(s, config, models.driver.idm, models.driver.limits);
  const double a = dw_test::idm_oracle(5.0, std::nullopt, 0.0, 11.0, 1.0, 2.0, 2.0, 2.5, 4.0, -6.0, 2.0);
  CHECK(next.back().v == doctest::Approx(5.0 + a * 0.5));
}

TEST_CASE("constant-velocity world keeps the gap")
{
  ScenarioConfig config = build_scenario(ScenarioKind::FrontHardBrake, 13.5);
  config.hazard_enabled = false;
  config.hazard_v0 = 11.0;
  config.background.clear();
  auto s = initial_state(config);
  const ModelConfig models;
  const ScriptedAgents agents(config, models.driver.idm, models.driver.limits);
  for (int i = 0; i < 10; ++i) {
    s = advance_world(s, DriverAction{0.0}, agents);
    CHECK(gap_to_lead(s)->gap == doctest::Approx(13.5));
  }
}

TEST_CASE("NoWarningControl collides at 8.5 m in both scenarios")
{
  const ModelConfig models;
  for (ScenarioKind kind : {ScenarioKind::FrontHardBrake, ScenarioKind::LaneChange}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto r = episode(build_scenario(kind, 8.5), Method::NoWarningControl, seed, models);
      CAPTURE(to_string(kind));
      CHECK(r.collision);
      CHECK(r.total.is_collision());
      for (Warning w : {Warning::Text, Warning::Voice, Warning::Alarm, Warning::TakeOver}) {
        CHECK(r.warning_counts[index_of(w)] == 0);
      }
    }
  }
}

TEST_CASE("no hazard: planners issue no warnings")
{
  const ModelConfig models;
  for (ScenarioKind kind : {ScenarioKind::FrontHardBrake, ScenarioKind::LaneChange}) {
    auto config = build_scenario(kind, 13.5);
    config.hazard_enabled = false;
    for (Method m : {Method::EstStateMdp, Method::ApproxPomdp}) {
      const auto r = episode(config, m, 7, models);
      CHECK_FALSE(r.collision);
      int warnings = 0;
      for (Warning w : kAllWarnings) {
        if (w != Warning::NoWarning) {
          warnings += r.warning_counts[index_of(w)];
        }
      }
      CHECK(warnings == 0);
      CHECK(r.total.value() <= 0.0);
    }
  }
}

TEST_CASE("episode bookkeeping and determinism")
{
  const ModelConfig models;
  const auto config = build_scenario(ScenarioKind::FrontHardBrake, 13.5);
  for (Method m : kAllMethods) {
    const auto a = episode(config, m, 42, models);
    const auto b = episode(config, m, 42, models);
    std::ostringstream ta, tb;
    write_trace_csv(ta, a, DriverModel(models.driver));
    write_trace_csv(tb, b, DriverModel(models.driver));
    CHECK(ta.str() == tb.str());
    CHECK(a.total == b.total);

    std::array<int, 5> counts{};
    Reward sum(0.0);
    for (const auto & step : a.steps) {
      counts[index_of(step.warning)] += 1;
      sum += step.r_traj;
    }
    CHECK(counts == a.warning_counts);
    if (a.collision) {
      CHECK(sum.is_collision());
      CHECK(a.total.is_collision());
    } else {
      CHECK(sum.value() == doctest::Approx(a.total.value()).epsilon(1e-12));
    }
    CHECK(a.max_belief_norm_error <= 1e-9);
    if (!a.collision) {
      CHECK(a.steps.size() == static_cast<std::size_t>(config.steps()));
    }
  }
}

TEST_CASE("true policy bookkeeping: pi_bw(t+1) = tick(pi_aw(t)) and TakeOver means Brake(0)")
{
  const ModelConfig models;
  const DriverModel drivers(models.driver);
  const auto r = episode(build_scenario(ScenarioKind::FrontHardBrake, 8.5), Method::TtcBaseline, 3, models);
  for (std::size_t k = 0; k < r.steps.size(); ++k) {
    if (r.steps[k].warning == Warning::TakeOver) {
      CHECK(r.steps[k].true_policy == PolicyState{K::Brake, 0});
    }
    if (k + 1 < r.steps.size() && r.steps[k + 1].warning == Warning::NoWarning) {
      CHECK(r.steps[k + 1].true_policy == drivers.tick(r.steps[k].true_policy));
    }
  }
}

TEST_CASE("the belief is a function of observations only")
{
  const ModelConfig models;
  const DriverModel drivers(models.driver);
  const auto config = build_scenario(ScenarioKind::FrontHardBrake, 13.5);
  EpisodeOptions corrupted;
  // Force the true driver into Brake mid-episode.
  corrupted.true_policy = PolicyScript{{6, PolicyState{K::Brake, 0}}};
  for (const EpisodeOptions & opts : {EpisodeOptions{}, corrupted}) {
    const auto r = episode(config, Method::ApproxPomdp, 9, models, opts);
    Belief b(models.estimator.initial_belief);
    for (const auto & step : r.steps) {
      b = filter_step(b, step.warning, step.action, step.state, models.transitions, drivers).next;
      CHECK(b == step.belief);
    }
  }
  const auto clean = episode(config, Method::ApproxPomdp, 9, models);
  const auto forced = episode(config, Method::ApproxPomdp, 9, models, corrupted);
  REQUIRE(forced.steps.size() > 6);
  CHECK(forced.steps[6].true_policy == PolicyState{K::Brake, 0});
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(clean.steps[k].belief == forced.steps[k].belief);
  }
}

TEST_CASE("estimate demo: posterior on Safe after the switch")
{
  const ModelConfig models;
  const EstimateDemoConfig demo;
  const auto r = estimate_demo(demo, 1, models);
  CHECK(r.safe_from == doctest::Approx(demo.switch_time + demo.delay_duration));
  CHECK(r.episode.steps[1].warning == Warning::Voice);
  CHECK(r.episode.steps[2].warning == Warning::Voice);
  REQUIRE(r.converged_at);
  CHECK(*r.converged_at >= r.safe_from);
  std::ostringstream os;
  write_belief_csv(os, r.episode, DriverModel(models.driver));
  CHECK(os.str().rfind("t,", 0) == 0);
}

TEST_CASE("validation errors")
{
  auto config = build_scenario(ScenarioKind::FrontHardBrake, 13.5);
  config.dt = 0.0;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  config = build_scenario(ScenarioKind::FrontHardBrake, 13.5);
  config.lane_count = 0;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);

  ModelConfig models;
  models.planner.dt = 0.25;
  CHECK_THROWS_AS(validate(models), std::invalid_argument);
  models = ModelConfig{};
  models.planner.gamma = 0.9;
  CHECK_THROWS_AS(validate(models), std::invalid_argument);

  for (Method m : kAllMethods) {
    CHECK(method_from_string(to_string(m)) == m);
  }
  CHECK_FALSE(method_from_string("Oracle"));
  CHECK(scenario_kind_from_string("LaneChange") == ScenarioKind::LaneChange);
}
