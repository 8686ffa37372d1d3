#include "test_support.hpp"

#include "driver_warning/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <span>

using namespace driver_warning;
using dw_test::make_state;

namespace
{

double idm_default_oracle(double v, std::optional<double> gap, double v_lead)
{
  return dw_test::idm_oracle(v, gap, v_lead, 11.0, 1.0, 2.0, 2.0, 2.5, 4.0, -6.0, 2.0);
}

}  // namespace

TEST_CASE("idm_accel: examples")
{
  const IdmParams p;
  const AccelLimits lim;
  CHECK(idm_accel(p.v_desired, std::nullopt, 0.0, p, lim) == doctest::Approx(0.0));
  CHECK(idm_accel(0.0, std::nullopt, 0.0, p, lim) == doctest::Approx(p.a_max));
  const double expected = idm_default_oracle(11.0, 13.5, 8.0);
  CHECK(idm_accel(11.0, 13.5, 8.0, p, lim) == doctest::Approx(expected).epsilon(1e-14));
  // Hand value: s* = 2 + 11 + 11*3/(2*sqrt(5)) = 20.3793; 2*(1 - 1 - (s*/13.5)^2) -> clamped at -6? no: -4.557
  CHECK(expected == doctest::Approx(-2.0 * std::pow((13.0 + 33.0 / (2.0 * std::sqrt(5.0))) / 13.5, 2)));
}

TEST_CASE("idm_accel: clamps to the limits")
{
  const IdmParams p;
  const AccelLimits lim;
  CHECK(idm_accel(11.0, 0.5, 0.0, p, lim) == lim.acc_min);
  CHECK(idm_accel(0.0, std::nullopt, 0.0, IdmParams{11.0, 1.0, 2.0, 5.0, 2.5, 4.0}, lim) == lim.acc_max);
}

TEST_CASE("idm_accel: monotone in speed and gap")
{
  const IdmParams p;
  const AccelLimits lim;
  RngStream rng(3, 0);
  for (int i = 0; i < 500; ++i) {
    const double gap = 1.0 + 40.0 * rng.uniform();
    const double v_lead = 15.0 * rng.uniform();
    const double v = 15.0 * rng.uniform();
    const double dv = 0.5 * rng.uniform();
    const double dg = 2.0 * rng.uniform();
    CHECK(idm_accel(v + dv, gap, v_lead, p, lim) <= idm_accel(v, gap, v_lead, p, lim) + 1e-12);
    CHECK(idm_accel(v, gap + dg, v_lead, p, lim) >= idm_accel(v, gap, v_lead, p, lim) - 1e-12);
    CHECK(idm_accel(v, gap, v_lead, p, lim) == doctest::Approx(idm_default_oracle(v, gap, v_lead)).epsilon(1e-12));
  }
}

TEST_CASE("policy_action: Blind equals Safe on the agent-stripped state")
{
  const DriverModel drivers;
  const PolicyState blind{PolicyKind::Blind, 0};
  const PolicyState safe{PolicyKind::Safe, 0};
  // Leader 5 m ahead and decelerating.
  auto s = make_state(11.0, {{5.0, 6.0}});
  auto stripped = s;
  stripped.agents.clear();
  CHECK(drivers.policy_action(blind, s).mean == drivers.policy_action(safe, stripped).mean);
  CHECK(drivers.policy_action(blind, s).mean.accel == doctest::Approx(idm_default_oracle(11.0, std::nullopt, 0.0)));
  CHECK(drivers.policy_action(safe, s).mean.accel == doctest::Approx(idm_default_oracle(11.0, 5.0, 6.0)));
}

TEST_CASE("policy_action: Brake holds a_decelerate for T_R, then acts as Safe")
{
  const DriverModel drivers;
  const auto s = make_state(11.0, {{20.0, 11.0}});
  CHECK(drivers.brake_steps() == 2);
  CHECK(drivers.policy_action({PolicyKind::Brake, 0}, s).mean.accel == -3.0);
  CHECK(drivers.policy_action({PolicyKind::Brake, 1}, s).mean.accel == -3.0);
  CHECK(drivers.policy_action({PolicyKind::Brake, 2}, s).mean == drivers.policy_action({PolicyKind::Safe, 0}, s).mean);
}

TEST_CASE("policy_action: Delay kinds act Blind before T_D and as target from T_D")
{
  const DriverModel drivers;
  const auto s = make_state(11.0, {{6.0, 8.0}});
  const auto blind = drivers.policy_action({PolicyKind::Blind, 0}, s);
  const auto safe = drivers.policy_action({PolicyKind::Safe, 0}, s);
  for (int t = 0; t < drivers.delay_steps(); ++t) {
    CHECK(drivers.policy_action({PolicyKind::DelayBlindToSafe, t}, s).mean == blind.mean);
    CHECK(drivers.policy_action({PolicyKind::DelayBlindToBrake, t}, s).mean == blind.mean);
  }
  // Boundary t = T_D uses the target branch.
  const int td = drivers.delay_steps();
  const auto after = drivers.policy_action({PolicyKind::DelayBlindToSafe, td}, s);
  CHECK(after.mean == safe.mean);
  CHECK(after.accel_sigma == safe.accel_sigma);
  CHECK(drivers.policy_action({PolicyKind::DelayBlindToBrake, td}, s).mean.accel == -3.0);
}

TEST_CASE("action_likelihood: Gaussian examples")
{
  const DriverModel drivers;
  const auto s = make_state(11.0, {});
  const PolicyState blind{PolicyKind::Blind, 0};
  const double mean = drivers.policy_action(blind, s).mean.accel;
  const double sigma = drivers.params().accel_sigma;
  CHECK(drivers.action_likelihood(blind, DriverAction{mean}, s) ==
        doctest::Approx(1.0 / (std::sqrt(2.0 * M_PI) * sigma)));

  ActionDistribution d{DriverAction{0.0}, 0.5, 0.01};
  CHECK(d.density(DriverAction{1.0}) == doctest::Approx(std::exp(-2.0) / (std::sqrt(2.0 * M_PI) * 0.5)));
  CHECK(d.density(DriverAction{1.0, LaneCommand::ShiftLeft}) ==
        doctest::Approx(0.01 * std::exp(-2.0) / (std::sqrt(2.0 * M_PI) * 0.5)));
}

TEST_CASE("action_likelihood: closer mean wins")
{
  const DriverModel drivers;
  const auto s = make_state(11.0, {{8.0, 6.0}});
  const double safe_mean = drivers.policy_action({PolicyKind::Safe, 0}, s).mean.accel;
  const double blind_mean = drivers.policy_action({PolicyKind::Blind, 0}, s).mean.accel;
  REQUIRE(safe_mean < blind_mean);
  const DriverAction near_safe{safe_mean + 0.1};
  CHECK(drivers.action_likelihood({PolicyKind::Safe, 0}, near_safe, s) >
        drivers.action_likelihood({PolicyKind::Blind, 0}, near_safe, s));
}

TEST_CASE("ActionDistribution: density integrates to one and samples are clamped")
{
  ActionDistribution d{DriverAction{1.5}, 0.4, 0.01};
  double integral = 0.0;
  const double h = 1e-3;
  for (double x = -4.0; x <= 7.0; x += h) {
    integral += d.density(DriverAction{x}) * h;
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));

  RngStream rng(9, 2);
  const AccelLimits lim;
  for (int i = 0; i < 1000; ++i) {
    const auto a = d.sample(rng, lim);
    CHECK(a.accel <= lim.acc_max);
    CHECK(a.accel >= lim.acc_min);
    CHECK(a.lane_cmd == d.mean.lane_cmd);
  }
}

TEST_CASE("tick relabels expired timers")
{
  const DriverModel drivers;
  CHECK(drivers.tick({PolicyKind::Blind, 0}) == PolicyState{PolicyKind::Blind, 0});
  CHECK(drivers.tick({PolicyKind::Safe, 0}) == PolicyState{PolicyKind::Safe, 0});
  CHECK(drivers.tick({PolicyKind::Brake, 0}) == PolicyState{PolicyKind::Brake, 1});
  CHECK(drivers.tick({PolicyKind::Brake, 1}) == PolicyState{PolicyKind::Safe, 0});
  CHECK(drivers.tick({PolicyKind::DelayBlindToSafe, 0}) == PolicyState{PolicyKind::DelayBlindToSafe, 1});
  CHECK(drivers.tick({PolicyKind::DelayBlindToSafe, 1}) == PolicyState{PolicyKind::Safe, 0});
  CHECK(drivers.tick({PolicyKind::DelayBlindToBrake, 1}) == PolicyState{PolicyKind::Brake, 0});
  CHECK(drivers.acts_blind({PolicyKind::DelayBlindToBrake, 1}));
  CHECK_FALSE(drivers.acts_blind({PolicyKind::Brake, 0}));
}

TEST_CASE("steps_for rounds up to whole steps")
{
  CHECK(steps_for(1.0, 0.5) == 2);
  CHECK(steps_for(1.5, 0.5) == 3);
  CHECK(steps_for(1.2, 0.5) == 3);
  CHECK(steps_for(0.0, 0.5) == 0);
  CHECK_THROWS_AS(steps_for(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("Safe shifts lanes only when braking hard and the adjacent lane is roomier")
{
  const DriverModel drivers;
  const PolicyState safe{PolicyKind::Safe, 0};
  SUBCASE("hard braking, free left lane -> shift left")
  {
    const auto s = make_state(11.0, {{6.0, 4.0, 0}}, 2);
    const auto a = drivers.policy_action(safe, s).mean;
    CHECK(a.lane_cmd == LaneCommand::ShiftLeft);
    CHECK(a.accel == doctest::Approx(idm_default_oracle(11.0, std::nullopt, 0.0)));
  }
  SUBCASE("gentle following never shifts")
  {
    const auto s = make_state(11.0, {{25.0, 10.0, 0}}, 2);
    CHECK(drivers.policy_action(safe, s).mean.lane_cmd == LaneCommand::Keep);
  }
  SUBCASE("a vehicle alongside blocks the shift")
  {
    auto s = make_state(11.0, {{6.0, 4.0, 0}, {-4.5, 11.0, 1}}, 2);
    CHECK(drivers.policy_action(safe, s).mean.lane_cmd == LaneCommand::Keep);
  }
  SUBCASE("a closer leader in the target lane blocks the shift")
  {
    auto s = make_state(11.0, {{6.0, 4.0, 0}, {3.0, 4.0, 1}}, 2);
    CHECK(drivers.policy_action(safe, s).mean.lane_cmd == LaneCommand::Keep);
  }
  SUBCASE("no lane beyond the map edge")
  {
    const auto s = make_state(11.0, {{6.0, 4.0, 0}}, 1);
    CHECK(drivers.policy_action(safe, s).mean.lane_cmd == LaneCommand::Keep);
  }
  SUBCASE("Blind never shifts")
  {
    const auto s = make_state(11.0, {{6.0, 4.0, 0}}, 2);
    CHECK(drivers.policy_action({PolicyKind::Blind, 0}, s).mean.lane_cmd == LaneCommand::Keep);
  }
}

TEST_CASE("DriverModel rejects invalid parameters")
{
  DriverParams p;
  p.idm.s_min = 0.0;
  CHECK_THROWS_AS(DriverModel{p}, std::invalid_argument);
  p = DriverParams{};
  p.idm.b_comfort = 7.0;
  CHECK_THROWS_AS(DriverModel{p}, std::invalid_argument);
  p = DriverParams{};
  p.accel_sigma = 0.0;
  CHECK_THROWS_AS(DriverModel{p}, std::invalid_argument);
  p = DriverParams{};
  p.a_decelerate = 1.0;
  CHECK_THROWS_AS(DriverModel{p}, std::invalid_argument);
}

TEST_CASE("policy kind names round-trip and tie ranks are ordered")
{
  for (PolicyKind k : kAllPolicyKinds) {
    CHECK(policy_kind_from_string(to_string(k)) == k);
  }
  CHECK(tie_rank(PolicyKind::Safe) < tie_rank(PolicyKind::Brake));
  CHECK(tie_rank(PolicyKind::Brake) < tie_rank(PolicyKind::DelayBlindToBrake));
  CHECK(tie_rank(PolicyKind::DelayBlindToBrake) < tie_rank(PolicyKind::DelayBlindToSafe));
  CHECK(tie_rank(PolicyKind::DelayBlindToSafe) < tie_rank(PolicyKind::Blind));
  CHECK(to_string(PolicyState{PolicyKind::Brake, 1}) == "Brake(1)");
}
