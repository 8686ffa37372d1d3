#include "driver_warning/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace driver_warning;

namespace
{

std::filesystem::path scratch_dir(const std::string & name)
{
  const auto dir = std::filesystem::temp_directory_path() / ("dwarn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

CellSummary cell(ScenarioKind kind, double gap, Method m, double mean, double sd, int runs = 200)
{
  CellSummary s;
  s.key = CellKey{kind, gap, m};
  s.mean_reward = mean;
  s.std_reward = sd;
  s.runs = runs;
  return s;
}

std::string slurp(const std::filesystem::path & p)
{
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("summarize: a single run equals that episode, std 0")
{
  const ModelConfig models;
  const auto r = episode(build_scenario(ScenarioKind::FrontHardBrake, 13.5), Method::RuleBaseline, 4, models);
  const CellKey key{ScenarioKind::FrontHardBrake, 13.5, Method::RuleBaseline};
  const auto s = summarize(key, std::vector<EpisodeResult>{r});
  CHECK(s.runs == 1);
  CHECK(s.mean_reward == r.total.value());
  CHECK(s.std_reward == 0.0);
  for (Warning w : kAllWarnings) {
    CHECK(s.mean_counts[index_of(w)] == r.warning_counts[index_of(w)]);
  }
  CHECK(s.collision_rate == 0.0);
}

TEST_CASE("summarize: sample statistics and collisions")
{
  const CellKey key{};
  const auto s = summarize(key, {-1.0, -2.0, -3.0}, {{0, 1, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, 2, 0, 0, 0}},
                           {false, false, false});
  CHECK(s.mean_reward == doctest::Approx(-2.0));
  CHECK(s.std_reward == doctest::Approx(1.0));
  CHECK(s.mean_counts[index_of(Warning::Text)] == doctest::Approx(1.0));

  const auto c = summarize(key, {-1.0, -std::numeric_limits<double>::infinity()}, {{}, {}}, {false, true});
  CHECK(std::isinf(c.mean_reward));
  CHECK(std::isnan(c.std_reward));
  CHECK(c.collision_rate == 0.5);
}

TEST_CASE("summary CSV round trip at the printed precision")
{
  std::vector<CellSummary> in{
    cell(ScenarioKind::FrontHardBrake, 8.5, Method::EstStateMdp, -72.4149, 3.14159),
    cell(ScenarioKind::LaneChange, 18.5, Method::TtcBaseline, -std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::quiet_NaN())};
  in[0].mean_counts = {0.0, 1.234, 0.5, 0.0, 0.0};
  in[1].collision_rate = 1.0;
  std::stringstream ss;
  write_summary_csv(ss, in);
  const std::string text = ss.str();
  CHECK(text.rfind(
          "scenario,d_gap,method,mean_reward,std_reward,text_ct,voice_ct,alarm_ct,takeover_ct,"
          "collision_rate,runs\n",
          0) == 0);
  CHECK(text.find("FrontHardBrake,8.50,EstStateMdp,-72.41,3.14,1.23,0.50,0.00,0.00,0.00,200") !=
        std::string::npos);
  const auto out = read_summary_csv(ss);
  REQUIRE(out.size() == 2);
  CHECK(out[0].key == in[0].key);
  CHECK(out[0].mean_reward == doctest::Approx(-72.41));
  CHECK(std::isinf(out[1].mean_reward));
  CHECK(std::isnan(out[1].std_reward));
  std::stringstream again;
  write_summary_csv(again, out);
  CHECK(again.str() == text);

  std::istringstream bad("scenario,oops\n");
  CHECK_THROWS_AS(read_summary_csv(bad), std::invalid_argument);
}

TEST_CASE("comparison statistics")
{
  const auto a = cell(ScenarioKind::FrontHardBrake, 8.5, Method::EstStateMdp, -10.0, 4.0, 16);
  const auto b = cell(ScenarioKind::FrontHardBrake, 8.5, Method::RuleBaseline, -11.0, 4.0, 16);
  CHECK(se_difference(a, b) == doctest::Approx(std::sqrt(2.0)));
  CHECK(at_least(a, b));
  CHECK(at_least(b, a));  // within one standard error
  auto c = b;
  c.mean_reward = -12.0;
  CHECK_FALSE(at_least(c, a));
  CHECK(approximately_equal(a, c));
  c.mean_reward = -13.0;
  CHECK_FALSE(approximately_equal(a, c));
}

TEST_CASE("compare_report: the published Table I means satisfy the ordering")
{
  struct Row
  {
    double gap;
    double mdp[2], pomdp[2], ttc[2], rule[2];  // {mean, sd} per scenario
    double mdp_lc[2], pomdp_lc[2], ttc_lc[2], rule_lc[2];
  };
  const std::vector<Row> table{
    {8.5, {-1038.06, 7.08}, {-1040.53, 17.14}, {-1307.50, 49.69}, {-1236.61, 109.50},
     {-1184.02, 0.28}, {-1183.92, 0.19}, {-1411.25, 0.0}, {-1411.25, 0.0}},
    {13.5, {-762.45, 35.54}, {-767.80, 46.17}, {-1073.82, 38.44}, {-883.48, 83.61},
     {-806.56, 35.88}, {-857.77, 50.23}, {-1156.52, 64.95}, {-948.64, 19.90}},
    {18.5, {-632.48, 43.97}, {-628.06, 54.68}, {-757.15, 39.40}, {-648.32, 76.20},
     {-678.56, 30.18}, {-678.29, 40.41}, {-873.34, 71.90}, {-697.07, 72.60}}};
  std::vector<CellSummary> summaries;
  for (const auto & r : table) {
    const auto fhb = ScenarioKind::FrontHardBrake;
    const auto lc = ScenarioKind::LaneChange;
    summaries.push_back(cell(fhb, r.gap, Method::EstStateMdp, r.mdp[0], r.mdp[1]));
    summaries.push_back(cell(fhb, r.gap, Method::ApproxPomdp, r.pomdp[0], r.pomdp[1]));
    summaries.push_back(cell(fhb, r.gap, Method::TtcBaseline, r.ttc[0], r.ttc[1]));
    summaries.push_back(cell(fhb, r.gap, Method::RuleBaseline, r.rule[0], r.rule[1]));
    summaries.push_back(cell(lc, r.gap, Method::EstStateMdp, r.mdp_lc[0], r.mdp_lc[1]));
    summaries.push_back(cell(lc, r.gap, Method::ApproxPomdp, r.pomdp_lc[0], r.pomdp_lc[1]));
    summaries.push_back(cell(lc, r.gap, Method::TtcBaseline, r.ttc_lc[0], r.ttc_lc[1]));
    summaries.push_back(cell(lc, r.gap, Method::RuleBaseline, r.rule_lc[0], r.rule_lc[1]));
  }
  const auto report = compare_report(summaries);
  CHECK(report.cells.size() == 6);
  CHECK(report.ok());
  std::ostringstream os;
  print_report(os, report);
  CHECK(os.str().find("ordering satisfied") != std::string::npos);
}

TEST_CASE("compare_report: synthetic cases")
{
  const auto k = ScenarioKind::FrontHardBrake;
  SUBCASE("planner best is clean")
  {
    const auto r = compare_report(
      {cell(k, 8.5, Method::EstStateMdp, -10, 1), cell(k, 8.5, Method::ApproxPomdp, -10.1, 1),
       cell(k, 8.5, Method::RuleBaseline, -20, 1), cell(k, 8.5, Method::TtcBaseline, -30, 1)});
    CHECK(r.ok());
    CHECK(r.cells[0].ranking.front().first == Method::EstStateMdp);
  }
  SUBCASE("TTC best is flagged")
  {
    const auto r = compare_report(
      {cell(k, 8.5, Method::EstStateMdp, -30, 1), cell(k, 8.5, Method::ApproxPomdp, -30, 1),
       cell(k, 8.5, Method::RuleBaseline, -20, 1), cell(k, 8.5, Method::TtcBaseline, -10, 1)});
    CHECK_FALSE(r.ok());
    CHECK(r.cells[0].ranking.front().first == Method::TtcBaseline);
    CHECK(r.cells[0].violations.size() == 5);
    std::ostringstream os;
    print_report(os, r);
    CHECK(os.str().find("VIOLATION") != std::string::npos);
  }
  SUBCASE("collisions rank last")
  {
    const auto r = compare_report(
      {cell(k, 8.5, Method::EstStateMdp, -std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::quiet_NaN()),
       cell(k, 8.5, Method::TtcBaseline, -10, 1)});
    CHECK_FALSE(r.ok());
  }
}

TEST_CASE("config JSON round trip and partial files")
{
  ExperimentConfig config;
  config.models.weights.w_v = 0.75;
  config.models.planner.horizon = 7;
  config.sweep.runs = 3;
  config.scenarios[ScenarioKind::LaneChange].trigger_time = 1.5;
  const auto j = to_json(config);
  const auto back = experiment_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.models.weights.w_v == 0.75);
  CHECK(back.models.planner.horizon == 7);
  CHECK(back.sweep.runs == 3);
  CHECK(back.scenarios.at(ScenarioKind::LaneChange).trigger_time == 1.5);
  CHECK(back.models.transitions.table() == config.models.transitions.table());

  const auto partial = experiment_from_json(nlohmann::json::parse(R"({"rewards": {"w_acc": 0.2}})"));
  CHECK(partial.models.weights.w_acc == 0.2);
  CHECK(partial.models.weights.w_v == 0.5);
  CHECK(to_json(experiment_from_json(nlohmann::json::object())) == to_json(ExperimentConfig{}));
}

TEST_CASE("shipped config equals the built-in defaults")
{
  const auto path = std::filesystem::path(DWARN_SOURCE_DIR) / "config" / "default.json";
  REQUIRE(std::filesystem::exists(path));
  CHECK(to_json(load_config(path)) == to_json(ExperimentConfig{}));
}

TEST_CASE("config errors")
{
  CHECK_THROWS_AS(load_config("/nonexistent/dwarn.json"), ConfigError);
  const auto dir = scratch_dir("config_errors");
  {
    std::ofstream(dir / "broken.json") << "{ not json";
  }
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
  CHECK_THROWS_AS(experiment_from_json(nlohmann::json::parse(R"({"sweep": {"methods": ["Oracle"]}})")),
                  ConfigError);
  CHECK_THROWS_AS(
    experiment_from_json(nlohmann::json::parse(R"({"rewards": {"w_v": "heavy"}})")), ConfigError);
  CHECK_THROWS(experiment_from_json(nlohmann::json::parse(
    R"({"transitions": {"kinds": ["Safe", "Blind", "Brake"], "rows": [{"source": "Blind", "warning": "Text", "targets": {"Blind": 0.5}}]}})")));

  SweepSpec spec;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.cells = {{ScenarioKind::FrontHardBrake, 8.5}};
  spec.methods = {Method::TtcBaseline};
  spec.runs = 0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}

TEST_CASE("run_sweep: deterministic output and trace re-summary")
{
  ExperimentConfig config;
  SweepSpec spec;
  spec.cells = {{ScenarioKind::FrontHardBrake, 13.5}, {ScenarioKind::LaneChange, 8.5}};
  spec.methods = {Method::RuleBaseline, Method::TtcBaseline, Method::EstStateMdp};
  spec.runs = 4;
  spec.base_seed = 100;
  spec.workers = 3;
  spec.out_dir = scratch_dir("sweep_a");
  const auto a = run_sweep(spec, config);
  CHECK(a.size() == 6);
  CHECK(std::is_sorted(a.begin(), a.end(), [](const auto & x, const auto & y) { return x.key < y.key; }));

  auto spec_b = spec;
  spec_b.out_dir = scratch_dir("sweep_b");
  spec_b.workers = 1;
  run_sweep(spec_b, config);
  CHECK(slurp(spec.out_dir / "summary.csv") == slurp(spec_b.out_dir / "summary.csv"));

  const CellKey key{ScenarioKind::FrontHardBrake, 13.5, Method::RuleBaseline};
  CHECK(std::filesystem::exists(spec.out_dir / "traces" / trace_file_name(key, 103)));
  CHECK(trace_file_name(key, 103) == "FrontHardBrake_13.50_RuleBaseline_103.csv");

  const auto again = summarize_traces(spec.out_dir / "traces");
  REQUIRE(again.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(again[i].key == a[i].key);
    CHECK(again[i].runs == a[i].runs);
    CHECK(again[i].mean_counts == a[i].mean_counts);
    CHECK(again[i].collision_rate == a[i].collision_rate);
    CHECK(again[i].mean_reward == doctest::Approx(a[i].mean_reward).epsilon(1e-6));
    CHECK(again[i].std_reward == doctest::Approx(a[i].std_reward).epsilon(1e-4));
  }

  // Matches a direct single-episode evaluation.
  const auto direct = episode(config.scenario(ScenarioKind::FrontHardBrake, 13.5), Method::RuleBaseline, 100,
                              config.models);
  const auto only = run_sweep(
    SweepSpec{{{ScenarioKind::FrontHardBrake, 13.5}}, {Method::RuleBaseline}, 1, 100, {}, false, 1}, config);
  CHECK(only.front().mean_reward == direct.total.value());
}
