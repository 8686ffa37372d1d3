#include "driver_warning/behavior_transition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace driver_warning
{

namespace
{

std::string row_name(PolicyKind source, Warning w)
{
  std::ostringstream os;
  os << "(" << to_string(source) << ", " << to_string(w) << ")";
  return os.str();
}

TransitionModel::Row sorted(TransitionModel::Row row)
{
  std::sort(row.begin(), row.end(), [](const auto & a, const auto & b) { return a.first < b.first; });
  return row;
}

}  // namespace

TransitionModel::TransitionModel(std::set<PolicyKind> kinds, Table table)
: kinds_(std::move(kinds)), table_(std::move(table))
{
  for (auto & [key, row] : table_) {
    row = sorted(std::move(row));
  }
  validate();
}

void TransitionModel::validate() const
{
  if (kinds_.empty()) {
    throw TransitionConfigError("transition model has no policy kinds");
  }
  if (!kinds_.contains(PolicyKind::Blind) || !kinds_.contains(PolicyKind::Brake)) {
    throw TransitionConfigError("transition model needs Blind and Brake");
  }
  for (PolicyKind source : kinds_) {
    for (Warning w : kAllWarnings) {
      const auto it = table_.find({source, w});
      if (it == table_.end()) {
        throw TransitionConfigError("missing row " + row_name(source, w));
      }
      const Row & row = it->second;
      double sum = 0.0;
      for (const auto & [target, p] : row) {
        if (!kinds_.contains(target)) {
          throw TransitionConfigError(
            "row " + row_name(source, w) + " targets unknown kind " + std::string(to_string(target)));
        }
        if (!(p >= 0.0 && p <= 1.0)) {
          throw TransitionConfigError("row " + row_name(source, w) + " has probability outside [0,1]");
        }
        if (is_brake_family(source) && p > 0.0 &&
            (target == PolicyKind::Safe || target == PolicyKind::DelayBlindToSafe)) {
          throw TransitionConfigError("row " + row_name(source, w) + " moves Brake mass toward Safe");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw TransitionConfigError("row " + row_name(source, w) + " does not sum to 1");
      }
      if (w == Warning::NoWarning && !(row.size() == 1 && row[0].first == source)) {
        throw TransitionConfigError("row " + row_name(source, w) + " must be the identity");
      }
      if (w == Warning::TakeOver && !(row.size() == 1 && row[0].first == PolicyKind::Brake)) {
        throw TransitionConfigError("row " + row_name(source, w) + " must map onto Brake");
      }
    }
  }
  for (const auto & [key, row] : table_) {
    if (!kinds_.contains(key.first)) {
      throw TransitionConfigError("row " + row_name(key.first, key.second) + " has unknown source");
    }
  }
  const double text = leave_blind_mass(Warning::Text);
  const double voice = leave_blind_mass(Warning::Voice);
  const double alarm = leave_blind_mass(Warning::Alarm);
  if (!(alarm >= voice && voice >= text && text >= 0.0)) {
    throw TransitionConfigError("leave-Blind mass must be monotone in warning severity");
  }
}

const TransitionModel::Row & TransitionModel::row(PolicyKind source, Warning w) const
{
  const auto it = table_.find({source, w});
  if (it == table_.end()) {
    throw TransitionConfigError("missing row " + row_name(source, w));
  }
  return it->second;
}

double TransitionModel::leave_blind_mass(Warning w) const
{
  double leave = 0.0;
  for (const auto & [target, p] : row(PolicyKind::Blind, w)) {
    if (target != PolicyKind::Blind) {
      leave += p;
    }
  }
  return leave;
}

std::vector<TransitionOutcome> TransitionModel::query(const PolicyState & pi, Warning w) const
{
  const Row & r = row(pi.kind, w);
  std::vector<TransitionOutcome> out;
  out.reserve(r.size());
  for (const auto & [target, p] : r) {
    if (p <= 0.0) {
      continue;
    }
    int timer = 0;
    if (w != Warning::TakeOver && (target == pi.kind || (is_delay(target) && is_delay(pi.kind)))) {
      timer = pi.timer;
    }
    out.push_back({PolicyState{target, timer}, p});
  }
  return out;
}

TransitionModel TransitionModel::make_default()
{
  using K = PolicyKind;
  using W = Warning;
  // Leave-Blind mass per warning; reactions split 11:3 toward Safe for Text and
  // Voice, evenly for Alarm.
  const double text_leave = 0.35;
  const double voice_leave = 0.70;
  const double alarm_leave = 0.90;
  auto blind_row = [](double leave, double to_safe_share) {
    return Row{
      {K::Blind, 1.0 - leave},
      {K::DelayBlindToSafe, leave * to_safe_share},
      {K::DelayBlindToBrake, leave * (1.0 - to_safe_share)}};
  };
  // A driver still inside the delay re-samples Blind's row: staying and
  // reacting toward Safe both keep the current delay; only the upgrade moves.
  auto delay_safe_row = [](double leave, double to_safe_share) {
    const double upgrade = leave * (1.0 - to_safe_share);
    return Row{{K::DelayBlindToSafe, 1.0 - upgrade}, {K::DelayBlindToBrake, upgrade}};
  };
  const double split = 11.0 / 14.0;

  Table t;
  for (K k : kAllPolicyKinds) {
    t[{k, W::NoWarning}] = {{k, 1.0}};
    t[{k, W::TakeOver}] = {{K::Brake, 1.0}};
  }
  t[{K::Safe, W::Text}] = {{K::Safe, 1.0}};
  t[{K::Safe, W::Voice}] = {{K::Safe, 1.0}};
  t[{K::Safe, W::Alarm}] = {{K::Safe, 0.95}, {K::Brake, 0.05}};

  t[{K::Blind, W::Text}] = blind_row(text_leave, split);
  t[{K::Blind, W::Voice}] = blind_row(voice_leave, split);
  t[{K::Blind, W::Alarm}] = blind_row(alarm_leave, 0.5);

  for (W w : {W::Text, W::Voice, W::Alarm}) {
    t[{K::Brake, w}] = {{K::Brake, 1.0}};
    t[{K::DelayBlindToBrake, w}] = {{K::DelayBlindToBrake, 1.0}};
  }
  t[{K::DelayBlindToSafe, W::Text}] = delay_safe_row(text_leave, split);
  t[{K::DelayBlindToSafe, W::Voice}] = delay_safe_row(voice_leave, split);
  t[{K::DelayBlindToSafe, W::Alarm}] = delay_safe_row(alarm_leave, 0.5);

  return TransitionModel(
    std::set<K>{kAllPolicyKinds.begin(), kAllPolicyKinds.end()}, std::move(t));
}

TransitionModel TransitionModel::make_default_without_delays()
{
  const TransitionModel full = make_default();
  const std::set<PolicyKind> kinds{PolicyKind::Safe, PolicyKind::Blind, PolicyKind::Brake};
  auto collapse = [](PolicyKind k) {
    switch (k) {
      case PolicyKind::DelayBlindToSafe:
        return PolicyKind::Safe;
      case PolicyKind::DelayBlindToBrake:
        return PolicyKind::Brake;
      default:
        return k;
    }
  };
  Table t;
  for (PolicyKind source : kinds) {
    for (Warning w : kAllWarnings) {
      std::map<PolicyKind, double> merged;
      for (const auto & [target, p] : full.row(source, w)) {
        merged[collapse(target)] += p;
      }
      t[{source, w}] = Row(merged.begin(), merged.end());
    }
  }
  return TransitionModel(kinds, std::move(t));
}

}  // namespace driver_warning
