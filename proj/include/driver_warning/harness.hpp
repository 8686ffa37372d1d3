#pragma once

#include "driver_warning/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace driver_warning
{

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct SweepSpec
{
  std::vector<std::pair<ScenarioKind, double>> cells;
  std::vector<Method> methods;
  int runs{200};
  std::uint64_t base_seed{1};
  /// Empty: nothing is written.
  std::filesystem::path out_dir;
  /// Also write one trace CSV per episode under out_dir/traces.
  bool write_traces{true};
  /// 0 uses the hardware concurrency.
  int workers{0};
};

/// Throws std::invalid_argument on an empty or malformed spec.
void validate(const SweepSpec & spec);

/// Everything the CLI reads from the config file.
struct ExperimentConfig
{
  ModelConfig models;
  /// Scenario templates; the cell's d_gap replaces d_gap0.
  std::map<ScenarioKind, ScenarioConfig> scenarios{
    {ScenarioKind::FrontHardBrake, build_scenario(ScenarioKind::FrontHardBrake, 13.5)},
    {ScenarioKind::LaneChange, build_scenario(ScenarioKind::LaneChange, 13.5)}};
  SweepSpec sweep{
    {{ScenarioKind::FrontHardBrake, 8.5},
     {ScenarioKind::FrontHardBrake, 13.5},
     {ScenarioKind::FrontHardBrake, 18.5},
     {ScenarioKind::LaneChange, 8.5},
     {ScenarioKind::LaneChange, 13.5},
     {ScenarioKind::LaneChange, 18.5}},
    {Method::EstStateMdp, Method::ApproxPomdp, Method::TtcBaseline, Method::RuleBaseline},
    200,
    1,
    {},
    true,
    0};
  EstimateDemoConfig demo;

  ScenarioConfig scenario(ScenarioKind kind, double d_gap) const;
};

nlohmann::json to_json(const ExperimentConfig & config);
/// Keys missing from `j` keep their defaults. Throws ConfigError on malformed input.
ExperimentConfig experiment_from_json(const nlohmann::json & j);
ExperimentConfig load_config(const std::filesystem::path & path);
void save_config(const ExperimentConfig & config, const std::filesystem::path & path);

struct CellKey
{
  ScenarioKind kind{ScenarioKind::FrontHardBrake};
  double d_gap{0.0};
  Method method{Method::EstStateMdp};

  auto operator<=>(const CellKey &) const = default;
};

struct CellSummary
{
  CellKey key;
  int runs{0};
  /// Mean and sample standard deviation of the episode R_Traj; -inf / nan with collisions.
  double mean_reward{0.0};
  double std_reward{0.0};
  /// Mean per-episode count, indexed by index_of(Warning).
  std::array<double, kAllWarnings.size()> mean_counts{};
  double collision_rate{0.0};
};

/// Summary of a set of episodes of one cell.
CellSummary summarize(const CellKey & key, const std::vector<EpisodeResult> & episodes);
/// Same from bare totals, counts and collision flags.
CellSummary summarize(
  const CellKey & key, const std::vector<double> & totals,
  const std::vector<std::array<int, kAllWarnings.size()>> & counts,
  const std::vector<bool> & collisions);

/**
 * @brief Runs every (cell, method) pair for `runs` seeds base_seed + i.
 *
 * Episodes fan out over a worker pool; results are gathered by index so the
 * output does not depend on scheduling. Writes summary.csv (and traces) when
 * out_dir is set. An episode failure aborts with the cell and seed named.
 */
std::vector<CellSummary> run_sweep(const SweepSpec & spec, const ExperimentConfig & config);

/// Trace file name of one episode.
std::string trace_file_name(const CellKey & key, std::uint64_t seed);

void write_summary_csv(std::ostream & os, const std::vector<CellSummary> & summaries);
std::vector<CellSummary> read_summary_csv(std::istream & is);

/// Recomputes cell summaries from the per-episode trace CSVs in `trace_dir`.
std::vector<CellSummary> summarize_traces(const std::filesystem::path & trace_dir);

/// Standard error of the difference of two cell means.
double se_difference(const CellSummary & a, const CellSummary & b);
/// a is better than b or within one standard error of it.
bool at_least(const CellSummary & a, const CellSummary & b);
/// |a - b| within two pooled standard errors.
bool approximately_equal(const CellSummary & a, const CellSummary & b);

struct OrderingViolation
{
  Method better;
  Method worse;
  double mean_better{0.0};
  double mean_worse{0.0};
};

struct CellReport
{
  ScenarioKind kind{ScenarioKind::FrontHardBrake};
  double d_gap{0.0};
  /// Methods ranked by mean reward, best first.
  std::vector<std::pair<Method, double>> ranking;
  std::vector<OrderingViolation> violations;
};

struct OrderingReport
{
  std::vector<CellReport> cells;
  bool ok() const;
};

/// Checks planners >= RuleBaseline >= TtcBaseline in every cell, where >= allows one standard error.
OrderingReport compare_report(const std::vector<CellSummary> & summaries);
void print_report(std::ostream & os, const OrderingReport & report);

}  // namespace driver_warning
