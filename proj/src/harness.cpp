#include "driver_warning/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace driver_warning
{

using nlohmann::json;

namespace
{

// ---------------------------------------------------------------- json helpers

template <typename T>
void read_into(const json & j, const char * key, T & out)
{
  if (!j.contains(key)) {
    return;
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception & e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

const json & section(const json & j, const char * key)
{
  static const json empty = json::object();
  if (!j.contains(key)) {
    return empty;
  }
  if (!j.at(key).is_object()) {
    throw ConfigError(std::string("config section '") + key + "' must be an object");
  }
  return j.at(key);
}

Warning parse_warning(const std::string & name)
{
  const auto w = warning_from_string(name);
  if (!w) {
    throw ConfigError("unknown warning '" + name + "'");
  }
  return *w;
}

PolicyKind parse_kind(const std::string & name)
{
  const auto k = policy_kind_from_string(name);
  if (!k) {
    throw ConfigError("unknown policy kind '" + name + "'");
  }
  return *k;
}

ScenarioKind parse_scenario(const std::string & name)
{
  const auto k = scenario_kind_from_string(name);
  if (!k) {
    throw ConfigError("unknown scenario '" + name + "'");
  }
  return *k;
}

Method parse_method(const std::string & name)
{
  const auto m = method_from_string(name);
  if (!m) {
    throw ConfigError("unknown method '" + name + "'");
  }
  return *m;
}

json warning_table_to_json(const std::array<double, 5> & values, bool skip_no_warning)
{
  json out = json::object();
  for (Warning w : kAllWarnings) {
    if (skip_no_warning && w == Warning::NoWarning) {
      continue;
    }
    out[std::string(to_string(w))] = values[index_of(w)];
  }
  return out;
}

void warning_table_from_json(const json & j, const char * key, std::array<double, 5> & values)
{
  if (!j.contains(key)) {
    return;
  }
  if (!j.at(key).is_object()) {
    throw ConfigError(std::string("config key '") + key + "' must be an object");
  }
  for (const auto & [name, v] : j.at(key).items()) {
    if (!v.is_number()) {
      throw ConfigError(std::string("config key '") + key + "." + name + "' must be a number");
    }
    values[index_of(parse_warning(name))] = v.get<double>();
  }
}

json scenario_to_json(const ScenarioConfig & c)
{
  json bg = json::array();
  for (const auto & b : c.background) {
    bg.push_back({{"lane", b.lane}, {"rel_s", b.rel_s}, {"v0", b.v0}, {"v_desired", b.v_desired}, {"relative_to_hazard", b.relative_to_hazard}});
  }
  return {
    {"ego_v0", c.ego_v0},
    {"ego_lane", c.ego_lane},
    {"lane_count", c.lane_count},
    {"lane_width", c.lane_width},
    {"speed_limit", c.speed_limit},
    {"hazard_enabled", c.hazard_enabled},
    {"hazard_v0", c.hazard_v0},
    {"hazard_v_target", c.hazard_v_target},
    {"hazard_decel", c.hazard_decel},
    {"trigger_time", c.trigger_time},
    {"cut_in_duration", c.cut_in_duration},
    {"episode_length", c.episode_length},
    {"background", bg}};
}

void scenario_from_json(const json & j, ScenarioConfig & c)
{
  read_into(j, "ego_v0", c.ego_v0);
  read_into(j, "ego_lane", c.ego_lane);
  read_into(j, "lane_count", c.lane_count);
  read_into(j, "lane_width", c.lane_width);
  read_into(j, "speed_limit", c.speed_limit);
  read_into(j, "hazard_enabled", c.hazard_enabled);
  read_into(j, "hazard_v0", c.hazard_v0);
  read_into(j, "hazard_v_target", c.hazard_v_target);
  read_into(j, "hazard_decel", c.hazard_decel);
  read_into(j, "trigger_time", c.trigger_time);
  read_into(j, "cut_in_duration", c.cut_in_duration);
  read_into(j, "episode_length", c.episode_length);
  if (j.contains("background")) {
    if (!j.at("background").is_array()) {
      throw ConfigError("scenario background must be an array");
    }
    c.background.clear();
    for (const auto & b : j.at("background")) {
      BackgroundVehicle v;
      read_into(b, "lane", v.lane);
      read_into(b, "rel_s", v.rel_s);
      read_into(b, "v0", v.v0);
      read_into(b, "v_desired", v.v_desired);
      read_into(b, "relative_to_hazard", v.relative_to_hazard);
      c.background.push_back(v);
    }
  }
}

json transitions_to_json(const TransitionModel & model)
{
  json kinds = json::array();
  for (PolicyKind k : model.kinds()) {
    kinds.push_back(std::string(to_string(k)));
  }
  json rows = json::array();
  for (const auto & [key, row] : model.table()) {
    json targets = json::object();
    for (const auto & [target, p] : row) {
      targets[std::string(to_string(target))] = p;
    }
    rows.push_back(
      {{"source", std::string(to_string(key.first))},
       {"warning", std::string(to_string(key.second))},
       {"targets", targets}});
  }
  return {{"kinds", kinds}, {"rows", rows}};
}

TransitionModel transitions_from_json(const json & j)
{
  if (!j.contains("kinds") || !j.contains("rows")) {
    throw ConfigError("transitions need 'kinds' and 'rows'");
  }
  std::set<PolicyKind> kinds;
  for (const auto & k : j.at("kinds")) {
    kinds.insert(parse_kind(k.get<std::string>()));
  }
  TransitionModel::Table table;
  for (const auto & r : j.at("rows")) {
    const PolicyKind source = parse_kind(r.at("source").get<std::string>());
    const Warning w = parse_warning(r.at("warning").get<std::string>());
    TransitionModel::Row row;
    for (const auto & [name, p] : r.at("targets").items()) {
      row.emplace_back(parse_kind(name), p.get<double>());
    }
    if (!table.emplace(std::pair{source, w}, std::move(row)).second) {
      throw ConfigError("duplicate transition row");
    }
  }
  try {
    return TransitionModel(std::move(kinds), std::move(table));
  } catch (const TransitionConfigError & e) {
    throw ConfigError(std::string("transitions: ") + e.what());
  }
}

}  // namespace

ScenarioConfig ExperimentConfig::scenario(ScenarioKind kind, double d_gap) const
{
  const auto it = scenarios.find(kind);
  ScenarioConfig c = it == scenarios.end() ? build_scenario(kind, d_gap) : it->second;
  c.kind = kind;
  c.d_gap0 = d_gap;
  c.dt = models.driver.dt;
  return c;
}

void validate(const SweepSpec & spec)
{
  if (spec.runs < 1) {
    throw std::invalid_argument("sweep runs must be at least 1");
  }
  if (spec.cells.empty() || spec.methods.empty()) {
    throw std::invalid_argument("sweep needs at least one cell and one method");
  }
  for (const auto & [kind, gap] : spec.cells) {
    if (!(gap > 0.0)) {
      throw std::invalid_argument("sweep d_gap must be positive");
    }
  }
}

json to_json(const ExperimentConfig & config)
{
  const auto & m = config.models;
  const auto & d = m.driver;
  json j;
  j["driver"] = {
    {"idm",
     {{"v_desired", d.idm.v_desired},
      {"time_headway", d.idm.time_headway},
      {"s_min", d.idm.s_min},
      {"a_max", d.idm.a_max},
      {"b_comfort", d.idm.b_comfort},
      {"delta", d.idm.delta}}},
    {"acc_min", d.limits.acc_min},
    {"acc_max", d.limits.acc_max},
    {"a_decelerate", d.a_decelerate},
    {"brake_duration", d.brake_duration},
    {"delay_duration", d.delay_duration},
    {"accel_sigma", d.accel_sigma},
    {"lane_mismatch_prob", d.lane_mismatch_prob},
    {"dt", d.dt},
    {"footprint", {{"length", d.footprint.length}, {"width", d.footprint.width}}}};
  j["transitions"] = transitions_to_json(m.transitions);
  j["rewards"] = {
    {"w_v", m.weights.w_v},
    {"w_acc", m.weights.w_acc},
    {"v_desire", m.weights.v_desire},
    {"gamma", m.weights.gamma},
    {"warning_costs", warning_table_to_json(m.weights.warning_costs, false)}};
  j["rule"] = {
    {"acc_min", m.rule.acc_min},
    {"delay", m.rule.delay},
    {"alpha", warning_table_to_json(m.rule.alpha, true)},
    {"ttc_thresholds", warning_table_to_json(m.rule.ttc_threshold, true)}};
  j["planner"] = {
    {"horizon", m.planner.horizon},
    {"early_take_over", m.planner.early_take_over},
    {"support_cutoff", m.planner.support_cutoff}};
  json belief = json::array();
  for (const auto & [pi, p] : m.estimator.initial_belief) {
    belief.push_back({{"kind", std::string(to_string(pi.kind))}, {"timer", pi.timer}, {"p", p}});
  }
  j["estimator"] = {
    {"th_safety", m.estimator.th_safety},
    {"initial_belief", belief},
    {"initial_policy", std::string(to_string(m.initial_policy.kind))}};
  json scenarios = json::object();
  for (const auto & [kind, c] : config.scenarios) {
    scenarios[std::string(to_string(kind))] = scenario_to_json(c);
  }
  j["scenarios"] = scenarios;
  json cells = json::array();
  for (const auto & [kind, gap] : config.sweep.cells) {
    cells.push_back({{"scenario", std::string(to_string(kind))}, {"d_gap", gap}});
  }
  json methods = json::array();
  for (Method mm : config.sweep.methods) {
    methods.push_back(std::string(to_string(mm)));
  }
  j["sweep"] = {
    {"cells", cells},
    {"methods", methods},
    {"runs", config.sweep.runs},
    {"base_seed", config.sweep.base_seed},
    {"write_traces", config.sweep.write_traces},
    {"workers", config.sweep.workers}};
  j["estimate_demo"] = {
    {"d_gap", config.demo.d_gap0},
    {"voice_times", config.demo.voice_times},
    {"switch_time", config.demo.switch_time},
    {"delay_duration", config.demo.delay_duration},
    {"episode_length", config.demo.episode_length}};
  return j;
}

ExperimentConfig experiment_from_json(const json & j)
{
  if (!j.is_object()) {
    throw ConfigError("config root must be an object");
  }
  ExperimentConfig c;
  auto & m = c.models;
  try {
    {
      const json & d = section(j, "driver");
      const json & idm = section(d, "idm");
      read_into(idm, "v_desired", m.driver.idm.v_desired);
      read_into(idm, "time_headway", m.driver.idm.time_headway);
      read_into(idm, "s_min", m.driver.idm.s_min);
      read_into(idm, "a_max", m.driver.idm.a_max);
      read_into(idm, "b_comfort", m.driver.idm.b_comfort);
      read_into(idm, "delta", m.driver.idm.delta);
      read_into(d, "acc_min", m.driver.limits.acc_min);
      read_into(d, "acc_max", m.driver.limits.acc_max);
      read_into(d, "a_decelerate", m.driver.a_decelerate);
      read_into(d, "brake_duration", m.driver.brake_duration);
      read_into(d, "delay_duration", m.driver.delay_duration);
      read_into(d, "accel_sigma", m.driver.accel_sigma);
      read_into(d, "lane_mismatch_prob", m.driver.lane_mismatch_prob);
      read_into(d, "dt", m.driver.dt);
      const json & fp = section(d, "footprint");
      read_into(fp, "length", m.driver.footprint.length);
      read_into(fp, "width", m.driver.footprint.width);
    }
    if (j.contains("transitions")) {
      m.transitions = transitions_from_json(j.at("transitions"));
    }
    {
      const json & r = section(j, "rewards");
      read_into(r, "w_v", m.weights.w_v);
      read_into(r, "w_acc", m.weights.w_acc);
      read_into(r, "v_desire", m.weights.v_desire);
      read_into(r, "gamma", m.weights.gamma);
      warning_table_from_json(r, "warning_costs", m.weights.warning_costs);
    }
    {
      const json & r = section(j, "rule");
      read_into(r, "acc_min", m.rule.acc_min);
      read_into(r, "delay", m.rule.delay);
      warning_table_from_json(r, "alpha", m.rule.alpha);
      warning_table_from_json(r, "ttc_thresholds", m.rule.ttc_threshold);
    }
    {
      const json & p = section(j, "planner");
      read_into(p, "horizon", m.planner.horizon);
      read_into(p, "early_take_over", m.planner.early_take_over);
      read_into(p, "support_cutoff", m.planner.support_cutoff);
    }
    {
      const json & e = section(j, "estimator");
      read_into(e, "th_safety", m.estimator.th_safety);
      if (e.contains("initial_belief")) {
        m.estimator.initial_belief.clear();
        for (const auto & item : e.at("initial_belief")) {
          const PolicyState pi{parse_kind(item.at("kind").get<std::string>()), item.value("timer", 0)};
          m.estimator.initial_belief[pi] += item.at("p").get<double>();
        }
      }
      if (e.contains("initial_policy")) {
        m.initial_policy = PolicyState{parse_kind(e.at("initial_policy").get<std::string>()), 0};
      }
    }
    {
      const json & s = section(j, "scenarios");
      for (const auto & [name, body] : s.items()) {
        const ScenarioKind kind = parse_scenario(name);
        ScenarioConfig sc = c.scenario(kind, 13.5);
        scenario_from_json(body, sc);
        c.scenarios[kind] = sc;
      }
    }
    {
      const json & s = section(j, "sweep");
      if (s.contains("cells")) {
        c.sweep.cells.clear();
        for (const auto & cell : s.at("cells")) {
          c.sweep.cells.emplace_back(
            parse_scenario(cell.at("scenario").get<std::string>()), cell.at("d_gap").get<double>());
        }
      }
      if (s.contains("methods")) {
        c.sweep.methods.clear();
        for (const auto & name : s.at("methods")) {
          c.sweep.methods.push_back(parse_method(name.get<std::string>()));
        }
      }
      read_into(s, "runs", c.sweep.runs);
      read_into(s, "base_seed", c.sweep.base_seed);
      read_into(s, "write_traces", c.sweep.write_traces);
      read_into(s, "workers", c.sweep.workers);
    }
    {
      const json & d = section(j, "estimate_demo");
      read_into(d, "d_gap", c.demo.d_gap0);
      read_into(d, "voice_times", c.demo.voice_times);
      read_into(d, "switch_time", c.demo.switch_time);
      read_into(d, "delay_duration", c.demo.delay_duration);
      read_into(d, "episode_length", c.demo.episode_length);
    }
  } catch (const json::exception & e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  // One discount and one step length drive rewards, planner and scenarios.
  m.planner.gamma = m.weights.gamma;
  m.planner.dt = m.driver.dt;
  for (auto & [kind, sc] : c.scenarios) {
    sc.dt = m.driver.dt;
  }
  try {
    validate(m);
    validate(c.sweep);
    for (const auto & [kind, sc] : c.scenarios) {
      validate(sc);
    }
  } catch (const std::invalid_argument & e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception & e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return experiment_from_json(j);
}

void save_config(const ExperimentConfig & config, const std::filesystem::path & path)
{
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write config file " + path.string());
  }
  out << to_json(config).dump(2) << '\n';
}

// ------------------------------------------------------------------- summaries

CellSummary summarize(
  const CellKey & key, const std::vector<double> & totals,
  const std::vector<std::array<int, kAllWarnings.size()>> & counts,
  const std::vector<bool> & collisions)
{
  CellSummary s;
  s.key = key;
  s.runs = static_cast<int>(totals.size());
  if (totals.empty()) {
    return s;
  }
  const double n = static_cast<double>(totals.size());
  int collided = 0;
  for (bool c : collisions) {
    collided += c ? 1 : 0;
  }
  s.collision_rate = collided / n;
  if (collided > 0) {
    s.mean_reward = -std::numeric_limits<double>::infinity();
    s.std_reward = std::numeric_limits<double>::quiet_NaN();
  } else {
    double sum = 0.0;
    for (double t : totals) {
      sum += t;
    }
    s.mean_reward = sum / n;
    double ss = 0.0;
    for (double t : totals) {
      ss += (t - s.mean_reward) * (t - s.mean_reward);
    }
    s.std_reward = totals.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  for (const auto & c : counts) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      s.mean_counts[i] += c[i];
    }
  }
  for (double & m : s.mean_counts) {
    m /= n;
  }
  return s;
}

CellSummary summarize(const CellKey & key, const std::vector<EpisodeResult> & episodes)
{
  std::vector<double> totals;
  std::vector<std::array<int, kAllWarnings.size()>> counts;
  std::vector<bool> collisions;
  for (const auto & e : episodes) {
    totals.push_back(e.total.value());
    counts.push_back(e.warning_counts);
    collisions.push_back(e.collision);
  }
  return summarize(key, totals, counts, collisions);
}

std::string trace_file_name(const CellKey & key, std::uint64_t seed)
{
  std::ostringstream os;
  os << to_string(key.kind) << '_' << std::fixed << std::setprecision(2) << key.d_gap << '_'
     << to_string(key.method) << '_' << seed << ".csv";
  return os.str();
}

std::vector<CellSummary> run_sweep(const SweepSpec & spec, const ExperimentConfig & config)
{
  validate(spec);
  validate(config.models);

  struct Job
  {
    CellKey key;
    ScenarioConfig scenario;
    std::uint64_t seed;
  };
  std::vector<CellKey> keys;
  std::vector<Job> jobs;
  for (const auto & [kind, gap] : spec.cells) {
    const ScenarioConfig scenario = config.scenario(kind, gap);
    validate(scenario);
    for (Method method : spec.methods) {
      const CellKey key{kind, gap, method};
      keys.push_back(key);
      for (int i = 0; i < spec.runs; ++i) {
        jobs.push_back(Job{key, scenario, spec.base_seed + static_cast<std::uint64_t>(i)});
      }
    }
  }

  const bool traces = !spec.out_dir.empty() && spec.write_traces;
  const std::filesystem::path trace_dir = spec.out_dir / "traces";
  if (!spec.out_dir.empty()) {
    std::filesystem::create_directories(spec.out_dir);
    if (traces) {
      std::filesystem::create_directories(trace_dir);
    }
  }
  const DriverModel drivers(config.models.driver);

  struct Outcome
  {
    double total{0.0};
    std::array<int, kAllWarnings.size()> counts{};
    bool collision{false};
  };
  std::vector<Outcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::string error;

  auto worker = [&]() {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) {
        return;
      }
      const Job & job = jobs[i];
      try {
        const EpisodeResult r = episode(job.scenario, job.key.method, job.seed, config.models);
        outcomes[i] = Outcome{r.total.value(), r.warning_counts, r.collision};
        if (traces) {
          std::ofstream out(trace_dir / trace_file_name(job.key, job.seed));
          write_trace_csv(out, r, drivers);
          if (!out) {
            throw std::runtime_error("cannot write trace file");
          }
        }
      } catch (const std::exception & e) {
        std::lock_guard lock(error_mutex);
        if (!failed.exchange(true)) {
          std::ostringstream os;
          os << "episode failed in cell (" << to_string(job.key.kind) << ", " << job.key.d_gap
             << ", " << to_string(job.key.method) << ") seed " << job.seed << ": " << e.what();
          error = os.str();
        }
      }
    }
  };

  int workers = spec.workers > 0 ? spec.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(worker);
    }
    for (auto & t : pool) {
      t.join();
    }
  }
  if (failed) {
    throw std::runtime_error(error);
  }

  std::vector<CellSummary> summaries;
  std::size_t offset = 0;
  for (const CellKey & key : keys) {
    std::vector<double> totals;
    std::vector<std::array<int, kAllWarnings.size()>> counts;
    std::vector<bool> collisions;
    for (int i = 0; i < spec.runs; ++i, ++offset) {
      totals.push_back(outcomes[offset].total);
      counts.push_back(outcomes[offset].counts);
      collisions.push_back(outcomes[offset].collision);
    }
    summaries.push_back(summarize(key, totals, counts, collisions));
  }
  std::sort(summaries.begin(), summaries.end(), [](const auto & a, const auto & b) {
    return a.key < b.key;
  });

  if (!spec.out_dir.empty()) {
    std::ofstream out(spec.out_dir / "summary.csv");
    write_summary_csv(out, summaries);
    if (!out) {
      throw std::runtime_error("cannot write summary.csv");
    }
  }
  return summaries;
}

namespace
{

std::string fmt2(double v)
{
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v < 0 ? "-inf" : "inf";
  }
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  std::string s = os.str();
  if (s == "-0.00") {
    s = "0.00";
  }
  return s;
}

double parse_double(const std::string & s)
{
  if (s == "nan") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (s == "-inf") {
    return -std::numeric_limits<double>::infinity();
  }
  if (s == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) {
    throw std::invalid_argument("not a number: " + s);
  }
  return v;
}

std::vector<std::string> split_csv(const std::string & line)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

constexpr const char * kSummaryHeader =
  "scenario,d_gap,method,mean_reward,std_reward,text_ct,voice_ct,alarm_ct,takeover_ct,"
  "collision_rate,runs";

}  // namespace

void write_summary_csv(std::ostream & os, const std::vector<CellSummary> & summaries)
{
  os << kSummaryHeader << '\n';
  for (const auto & s : summaries) {
    os << to_string(s.key.kind) << ',' << fmt2(s.key.d_gap) << ',' << to_string(s.key.method) << ','
       << fmt2(s.mean_reward) << ',' << fmt2(s.std_reward) << ','
       << fmt2(s.mean_counts[index_of(Warning::Text)]) << ','
       << fmt2(s.mean_counts[index_of(Warning::Voice)]) << ','
       << fmt2(s.mean_counts[index_of(Warning::Alarm)]) << ','
       << fmt2(s.mean_counts[index_of(Warning::TakeOver)]) << ',' << fmt2(s.collision_rate) << ','
       << s.runs << '\n';
  }
}

std::vector<CellSummary> read_summary_csv(std::istream & is)
{
  std::string line;
  if (!std::getline(is, line) || line != kSummaryHeader) {
    throw std::invalid_argument("summary CSV: unexpected header");
  }
  std::vector<CellSummary> out;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 11) {
      throw std::invalid_argument("summary CSV: expected 11 fields in '" + line + "'");
    }
    CellSummary s;
    s.key.kind = parse_scenario(f[0]);
    s.key.d_gap = parse_double(f[1]);
    s.key.method = parse_method(f[2]);
    s.mean_reward = parse_double(f[3]);
    s.std_reward = parse_double(f[4]);
    s.mean_counts[index_of(Warning::Text)] = parse_double(f[5]);
    s.mean_counts[index_of(Warning::Voice)] = parse_double(f[6]);
    s.mean_counts[index_of(Warning::Alarm)] = parse_double(f[7]);
    s.mean_counts[index_of(Warning::TakeOver)] = parse_double(f[8]);
    s.collision_rate = parse_double(f[9]);
    s.runs = std::stoi(f[10]);
    out.push_back(s);
  }
  return out;
}

std::vector<CellSummary> summarize_traces(const std::filesystem::path & trace_dir)
{
  struct Acc
  {
    std::vector<double> totals;
    std::vector<std::array<int, kAllWarnings.size()>> counts;
    std::vector<bool> collisions;
  };
  std::map<CellKey, Acc> cells;
  std::vector<std::filesystem::path> files;
  for (const auto & entry : std::filesystem::directory_iterator(trace_dir)) {
    if (entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto & path : files) {
    // <scenario>_<gap>_<method>_<seed>.csv
    const std::string stem = path.stem().string();
    std::vector<std::string> parts;
    std::istringstream ps(stem);
    for (std::string p; std::getline(ps, p, '_');) {
      parts.push_back(p);
    }
    if (parts.size() != 4) {
      throw std::invalid_argument("unexpected trace file name " + path.string());
    }
    const CellKey key{parse_scenario(parts[0]), parse_double(parts[1]), parse_method(parts[2])};

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    double total = 0.0;
    bool collision = false;
    std::array<int, kAllWarnings.size()> counts{};
    while (std::getline(in, line)) {
      const auto f = split_csv(line);
      if (f.size() != 12) {
        throw std::invalid_argument("unexpected trace row in " + path.string());
      }
      ++counts[index_of(parse_warning(f[6]))];
      const double r = parse_double(f[11]);
      if (std::isinf(r)) {
        collision = true;
      } else {
        total += r;
      }
    }
    auto & acc = cells[key];
    acc.totals.push_back(total);
    acc.counts.push_back(counts);
    acc.collisions.push_back(collision);
  }
  std::vector<CellSummary> out;
  for (const auto & [key, acc] : cells) {
    out.push_back(summarize(key, acc.totals, acc.counts, acc.collisions));
  }
  return out;
}

// ------------------------------------------------------------------ comparison

double se_difference(const CellSummary & a, const CellSummary & b)
{
  return std::sqrt(
    a.std_reward * a.std_reward / a.runs + b.std_reward * b.std_reward / b.runs);
}

bool at_least(const CellSummary & a, const CellSummary & b)
{
  if (std::isinf(a.mean_reward) || std::isinf(b.mean_reward)) {
    return a.mean_reward >= b.mean_reward;
  }
  return a.mean_reward >= b.mean_reward - se_difference(a, b);
}

bool approximately_equal(const CellSummary & a, const CellSummary & b)
{
  if (std::isinf(a.mean_reward) || std::isinf(b.mean_reward)) {
    return a.mean_reward == b.mean_reward;
  }
  return std::abs(a.mean_reward - b.mean_reward) <= 2.0 * se_difference(a, b);
}

bool OrderingReport::ok() const
{
  return std::all_of(cells.begin(), cells.end(), [](const auto & c) { return c.violations.empty(); });
}

OrderingReport compare_report(const std::vector<CellSummary> & summaries)
{
  std::map<std::pair<ScenarioKind, double>, std::map<Method, CellSummary>> cells;
  for (const auto & s : summaries) {
    cells[{s.key.kind, s.key.d_gap}][s.key.method] = s;
  }
  // (better, worse) pairs that must hold.
  const std::vector<std::pair<Method, Method>> expected = {
    {Method::EstStateMdp, Method::RuleBaseline},
    {Method::ApproxPomdp, Method::RuleBaseline},
    {Method::RuleBaseline, Method::TtcBaseline},
    {Method::EstStateMdp, Method::TtcBaseline},
    {Method::ApproxPomdp, Method::TtcBaseline}};

  OrderingReport report;
  for (const auto & [cell, methods] : cells) {
    CellReport cr;
    cr.kind = cell.first;
    cr.d_gap = cell.second;
    for (const auto & [m, s] : methods) {
      cr.ranking.emplace_back(m, s.mean_reward);
    }
    std::stable_sort(cr.ranking.begin(), cr.ranking.end(), [](const auto & a, const auto & b) {
      return a.second > b.second;
    });
    for (const auto & [better, worse] : expected) {
      const auto a = methods.find(better);
      const auto b = methods.find(worse);
      if (a == methods.end() || b == methods.end()) {
        continue;
      }
      if (!at_least(a->second, b->second)) {
        cr.violations.push_back(
          OrderingViolation{better, worse, a->second.mean_reward, b->second.mean_reward});
      }
    }
    report.cells.push_back(std::move(cr));
  }
  return report;
}

void print_report(std::ostream & os, const OrderingReport & report)
{
  for (const auto & c : report.cells) {
    os << to_string(c.kind) << " d_gap=" << fmt2(c.d_gap) << ": ";
    for (std::size_t i = 0; i < c.ranking.size(); ++i) {
      os << (i ? " > " : "") << to_string(c.ranking[i].first) << " (" << fmt2(c.ranking[i].second)
         << ")";
    }
    os << (c.violations.empty() ? "  [ok]" : "  [VIOLATION]") << '\n';
    for (const auto & v : c.violations) {
      os << "  expected " << to_string(v.better) << " >= " << to_string(v.worse) << " but "
         << fmt2(v.mean_better) << " < " << fmt2(v.mean_worse) << '\n';
    }
  }
  os << (report.ok() ? "ordering satisfied in all cells" : "ordering violated") << '\n';
}

}  // namespace driver_warning
