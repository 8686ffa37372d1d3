#include "driver_warning/harness.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace dw = driver_warning;

namespace
{

dw::ExperimentConfig load_or_default(const std::string & path)
{
  return path.empty() ? dw::ExperimentConfig{} : dw::load_config(path);
}

dw::ScenarioKind scenario_arg(const std::string & name)
{
  const auto k = dw::scenario_kind_from_string(name);
  if (!k) {
    throw CLI::ValidationError("--scenario", "expected FrontHardBrake or LaneChange");
  }
  return *k;
}

dw::Method method_arg(const std::string & name)
{
  const auto m = dw::method_from_string(name);
  if (!m) {
    throw CLI::ValidationError(
      "--method", "expected EstStateMdp, ApproxPomdp, TtcBaseline, RuleBaseline or NoWarningControl");
  }
  return *m;
}

std::ofstream open_out(const std::filesystem::path & path)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Driver-warning planner and closed-loop traffic simulator"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (defaults when omitted)");

  // simulate
  auto * simulate = app.add_subcommand("simulate", "Run one episode and write its trace");
  std::string sim_scenario = "FrontHardBrake";
  std::string sim_method = "ApproxPomdp";
  double sim_gap = 13.5;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  simulate->add_option("--scenario", sim_scenario, "FrontHardBrake or LaneChange");
  simulate->add_option("--d-gap", sim_gap, "Initial gap to the hazard (m)");
  simulate->add_option("--method", sim_method, "Warning method");
  simulate->add_option("--seed", sim_seed, "Episode seed");
  simulate->add_option("--out", sim_out, "Trace CSV path (stdout when omitted)");

  // sweep
  auto * sweep = app.add_subcommand("sweep", "Run the batch protocol and write summary.csv");
  std::vector<std::string> sweep_scenarios;
  std::vector<double> sweep_gaps;
  std::vector<std::string> sweep_methods;
  int sweep_runs = 0;
  std::uint64_t sweep_seed = 0;
  bool sweep_seed_set = false;
  std::string sweep_out = "out";
  int sweep_workers = -1;
  bool no_traces = false;
  sweep->add_option("--scenario", sweep_scenarios, "Restrict to these scenarios");
  sweep->add_option("--d-gap", sweep_gaps, "Restrict to these gaps");
  sweep->add_option("--method", sweep_methods, "Restrict to these methods");
  sweep->add_option("--runs", sweep_runs, "Runs per cell");
  sweep->add_option("--seed", sweep_seed, "Base seed")->each([&](const std::string &) {
    sweep_seed_set = true;
  });
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep->add_option("--workers", sweep_workers, "Worker threads (0 = hardware concurrency)");
  sweep->add_flag("--no-traces", no_traces, "Skip per-episode trace files");

  // estimate-demo
  auto * demo = app.add_subcommand("estimate-demo", "Belief trace with scripted Voice warnings");
  double demo_gap = -1.0;
  std::uint64_t demo_seed = 1;
  std::string demo_out;
  demo->add_option("--d-gap", demo_gap, "Initial gap (m)");
  demo->add_option("--seed", demo_seed, "Episode seed");
  demo->add_option("--out", demo_out, "Belief CSV path (stdout when omitted)");

  // report
  auto * report = app.add_subcommand("report", "Check the method ordering of a summary.csv");
  std::string report_in = "out/summary.csv";
  report->add_option("summary", report_in, "summary.csv path");
  report->add_option("--out", report_in, "Sweep output directory or summary.csv path");

  // write-config
  auto * write_config = app.add_subcommand("write-config", "Write the effective config as JSON");
  std::string config_out = "config/default.json";
  write_config->add_option("--out", config_out, "Destination path");

  CLI11_PARSE(app, argc, argv);

  try {
    const dw::ExperimentConfig config = load_or_default(config_path);

    if (*simulate) {
      const auto kind = scenario_arg(sim_scenario);
      const auto method = method_arg(sim_method);
      const auto scenario = config.scenario(kind, sim_gap);
      const auto result = dw::episode(scenario, method, sim_seed, config.models);
      const dw::DriverModel drivers(config.models.driver);
      if (sim_out.empty()) {
        dw::write_trace_csv(std::cout, result, drivers);
      } else {
        auto out = open_out(sim_out);
        dw::write_trace_csv(out, result, drivers);
      }
      std::cerr << std::fixed << std::setprecision(2) << "total_reward=" << result.total.value()
                << " collision=" << (result.collision ? 1 : 0) << '\n';
      return 0;
    }

    if (*sweep) {
      dw::SweepSpec spec = config.sweep;
      if (!sweep_scenarios.empty() || !sweep_gaps.empty()) {
        std::vector<std::pair<dw::ScenarioKind, double>> cells;
        for (const auto & [kind, gap] : spec.cells) {
          const bool kind_ok =
            sweep_scenarios.empty() ||
            std::find(sweep_scenarios.begin(), sweep_scenarios.end(), std::string(dw::to_string(kind))) !=
              sweep_scenarios.end();
          const bool gap_ok =
            sweep_gaps.empty() || std::find(sweep_gaps.begin(), sweep_gaps.end(), gap) != sweep_gaps.end();
          if (kind_ok && gap_ok) {
            cells.emplace_back(kind, gap);
          }
        }
        // Gaps not in the config still run when asked for explicitly.
        if (cells.empty()) {
          for (const auto & name : sweep_scenarios.empty()
                                     ? std::vector<std::string>{"FrontHardBrake", "LaneChange"}
                                     : sweep_scenarios) {
            for (double gap : sweep_gaps) {
              cells.emplace_back(scenario_arg(name), gap);
            }
          }
        }
        spec.cells = cells;
      }
      if (!sweep_methods.empty()) {
        spec.methods.clear();
        for (const auto & name : sweep_methods) {
          spec.methods.push_back(method_arg(name));
        }
      }
      if (sweep_runs > 0) {
        spec.runs = sweep_runs;
      }
      if (sweep_seed_set) {
        spec.base_seed = sweep_seed;
      }
      if (sweep_workers >= 0) {
        spec.workers = sweep_workers;
      }
      spec.out_dir = sweep_out;
      spec.write_traces = spec.write_traces && !no_traces;

      const auto start = std::chrono::steady_clock::now();
      const auto summaries = dw::run_sweep(spec, config);
      const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      dw::write_summary_csv(std::cout, summaries);
      std::cerr << std::fixed << std::setprecision(1) << "sweep finished in " << secs << " s\n";
      return 0;
    }

    if (*demo) {
      dw::EstimateDemoConfig demo_config = config.demo;
      if (demo_gap > 0.0) {
        demo_config.d_gap0 = demo_gap;
      }
      const auto result = dw::estimate_demo(demo_config, demo_seed, config.models);
      dw::DriverParams params = config.models.driver;
      params.delay_duration = demo_config.delay_duration;
      const dw::DriverModel drivers(params);
      if (demo_out.empty()) {
        dw::write_belief_csv(std::cout, result.episode, drivers);
      } else {
        auto out = open_out(demo_out);
        dw::write_belief_csv(out, result.episode, drivers);
      }
      std::cerr << std::fixed << std::setprecision(2) << "true driver acts Safe from "
                << result.safe_from << " s; ";
      if (result.converged_at) {
        std::cerr << "b(Safe) > 0.9 at " << *result.converged_at << " s\n";
      } else {
        std::cerr << "b(Safe) never exceeded 0.9\n";
      }
      return 0;
    }

    if (*report) {
      std::filesystem::path path = report_in;
      if (std::filesystem::is_directory(path)) {
        path /= "summary.csv";
      }
      std::ifstream in(path);
      if (!in) {
        std::cerr << "cannot open " << path << '\n';
        return 2;
      }
      const auto summaries = dw::read_summary_csv(in);
      const auto r = dw::compare_report(summaries);
      dw::print_report(std::cout, r);
      return r.ok() ? 0 : 1;
    }

    if (*write_config) {
      std::filesystem::path path = config_out;
      if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
      }
      dw::save_config(config, path);
      return 0;
    }
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
