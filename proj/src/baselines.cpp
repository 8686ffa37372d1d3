#include "driver_warning/baselines.hpp"

#include "driver_warning/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace driver_warning
{

void validate(const RuleParams & params)
{
  if (!(params.acc_min < 0.0)) {
    throw std::invalid_argument("RuleParams.acc_min must be negative");
  }
  if (params.delay < 0.0) {
    throw std::invalid_argument("RuleParams.delay must be non-negative");
  }
  if (params.alpha[index_of(Warning::TakeOver)] != 1.0) {
    throw std::invalid_argument("alpha(TakeOver) must equal 1");
  }
  for (std::size_t i = 1; i < 5; ++i) {
    if (!(params.alpha[i] > 0.0 && params.alpha[i] <= 1.0)) {
      throw std::invalid_argument("alpha values must lie in (0, 1]");
    }
    if (i + 1 < 5) {
      if (!(params.alpha[i + 1] > params.alpha[i])) {
        throw std::invalid_argument("alpha must increase with severity");
      }
      if (!(params.ttc_threshold[i + 1] < params.ttc_threshold[i])) {
        throw std::invalid_argument("TTC thresholds must decrease with severity");
      }
    }
  }
}

std::optional<double> time_to_collision(const ScenarioState & state, const VehicleFootprint & fp)
{
  const auto lead = gap_to_lead(state, fp);
  if (!lead) {
    return std::nullopt;
  }
  const double closing = state.ego_now().v - lead->v_lead;
  if (!(closing > 0.0)) {
    return std::nullopt;
  }
  return std::max(lead->gap, 0.0) / closing;
}

Warning ttc_warning(std::optional<double> ttc, const RuleParams & params)
{
  if (!ttc) {
    return Warning::NoWarning;
  }
  for (Warning w : {Warning::TakeOver, Warning::Alarm, Warning::Voice, Warning::Text}) {
    if (params.ttc_threshold[index_of(w)] > *ttc) {
      return w;
    }
  }
  return Warning::NoWarning;
}

RuleGaps rule_gaps(double d_gap, double v_ego, double v_front, const RuleParams & params)
{
  const double brake = 2.0 * std::abs(params.acc_min);
  RuleGaps g;
  g.d_front = v_front * v_front / brake;
  g.d_ego = v_ego * params.delay + v_ego * v_ego / brake;
  g.d_min = d_gap + g.d_front - g.d_ego;
  return g;
}

double take_over_margin(double d_gap, double v_ego, double v_front, const RuleParams & params)
{
  const double brake = 2.0 * std::abs(params.acc_min);
  return d_gap + v_front * v_front / brake - v_ego * v_ego / brake;
}

Warning rule_based_warning(double d_gap, double v_ego, double v_front, const RuleParams & params)
{
  if (take_over_margin(d_gap, v_ego, v_front, params) <= 0.0) {
    return Warning::TakeOver;
  }
  const double d_min = rule_gaps(d_gap, v_ego, v_front, params).d_min;
  for (Warning w : {Warning::Alarm, Warning::Voice, Warning::Text}) {
    if (d_min <= -params.alpha[index_of(w)] * v_ego * params.delay) {
      return w;
    }
  }
  return Warning::NoWarning;
}

Warning rule_based_warning(const ScenarioState & state, const RuleParams & params)
{
  const auto lead = gap_to_lead(state, params.footprint);
  if (!lead) {
    return Warning::NoWarning;
  }
  return rule_based_warning(lead->gap, state.ego_now().v, lead->v_lead, params);
}

}  // namespace driver_warning
