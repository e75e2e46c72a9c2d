/* Copyright 2026 The dcrab Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dcrab/engine.hpp"
#include "dcrab/harness.hpp"
#include "dcrab/landscape.hpp"

namespace {

struct Options {
  std::size_t qubits = 2;
  double time = 0.0;
  double omega_max = 0.0;
  std::optional<double> cycles;
  std::vector<double> grid;
  std::size_t nc = 6;
  std::string method = "dcrab";
  std::string constraint = "none";
  std::string transfer = "random";
  std::size_t instances = 10;
  std::size_t restarts = 10;
  std::uint64_t seed = 1;
  std::string out_csv;
  std::string out_plot;
  std::string plot_column;
  std::size_t budget = 20000;
  std::size_t super_iterations = 50;
  double threshold = 1e-3;
  double start_scale = 1.0;
  double initial_step = 1.0;
  double restart_step = 0.1;
  std::size_t simplex_restarts = 0;
  std::size_t steps = 0;
  std::size_t workers = 0;
  std::size_t repetitions = 100;
  bool quiet = false;
};

dcrab::PlotColumn parse_column(const std::string& text) {
  if (text == "p") return dcrab::PlotColumn::p;
  if (text == "effort") return dcrab::PlotColumn::effort;
  if (text == "infidelity") return dcrab::PlotColumn::mean_infidelity;
  if (text == "maxabs") return dcrab::PlotColumn::mean_max_abs;
  throw std::invalid_argument("unknown plot column '" + text + "'");
}

dcrab::ExperimentConfig build_config(const Options& o, dcrab::ExperimentKind kind) {
  dcrab::ExperimentConfig c;
  c.kind = kind;
  c.n_qubits = o.qubits;
  c.total_time = o.time;
  c.omega_max = o.omega_max;
  if (o.cycles) {
    if (o.omega_max > 0.0) throw std::invalid_argument("give either --omega-max or --cycles");
    c.omega_max = *o.cycles * 2.0 * std::numbers::pi / c.resolved_time();
  }
  c.grid = o.grid;
  c.n_instances = o.instances;
  c.n_restarts = o.restarts;
  c.master_seed = o.seed;
  c.method = dcrab::parse_method(o.method);
  c.constraint = dcrab::parse_constraint_mode(o.constraint);
  c.transfer = dcrab::parse_transfer(o.transfer);
  c.n_coefficients = o.nc;
  c.optimizer.max_total_evaluations = o.budget;
  c.optimizer.n_super_iterations = o.super_iterations;
  c.optimizer.success_threshold = o.threshold;
  c.optimizer.coefficient_start_scale = o.start_scale;
  c.optimizer.initial_simplex_step = o.initial_step;
  c.optimizer.restart_simplex_step = o.restart_step;
  c.optimizer.simplex_restarts = o.simplex_restarts;
  c.optimizer.n_steps = o.steps;
  c.n_workers = o.workers;
  c.out_csv = o.out_csv;
  c.out_plot = o.out_plot;
  c.validate();
  return c;
}

int run_experiment(const Options& o, dcrab::ExperimentKind kind) {
  const dcrab::ExperimentConfig config = build_config(o, kind);
  const dcrab::SweepResult result = dcrab::run_sweep(config);

  if (kind == dcrab::ExperimentKind::single_run) {
    const auto& trial = result.trials.front();
    if (trial.error) {
      std::cerr << "run failed: " << *trial.error << '\n';
      return 1;
    }
    dcrab::write_record(std::cout, trial.record);
    return 0;
  }

  for (const auto& t : result.trials)
    if (t.error)
      std::cerr << "trial value=" << t.swept_value << " instance=" << t.instance
                << " restart=" << t.restart << " failed: " << *t.error << '\n';
  if (!o.quiet) dcrab::write_csv(std::cout, result.table);
  if (!config.out_csv.empty()) dcrab::emit_csv(result.table, config.out_csv);
  if (!config.out_plot.empty()) {
    dcrab::PlotOptions plot;
    plot.title = std::string(dcrab::to_string(kind)) + " (" +
                 std::string(dcrab::to_string(config.method)) + ")";
    switch (kind) {
      case dcrab::ExperimentKind::sweep_nc:
        plot.column = dcrab::PlotColumn::p;
        plot.x_label = "N_C";
        break;
      case dcrab::ExperimentKind::sweep_bandwidth:
        plot.column = dcrab::PlotColumn::mean_infidelity;
        plot.x_label = "omega_max T / 2 pi";
        plot.reference = config.optimizer.success_threshold;
        break;
      default:
        plot.column = dcrab::PlotColumn::mean_infidelity;
        plot.x_label = config.constraint == dcrab::ConstraintMode::penalty ? "lambda" : "f_max";
        plot.reference = config.optimizer.success_threshold;
        break;
    }
    if (!o.plot_column.empty()) plot.column = parse_column(o.plot_column);
    dcrab::emit_plot(result.table, config.out_plot, plot);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CRAB and dressed CRAB optimal control of random spin chains"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key = value file; keys are long flag names");

  Options o;
  app.add_option("--qubits", o.qubits, "Number of qubits N")->capture_default_str();
  app.add_option("--time", o.time, "Total time T (0: 6pi, 10pi, 16pi for N = 2, 3, 4)")
      ->capture_default_str();
  auto* omega = app.add_option("--omega-max", o.omega_max,
                               "Bandwidth in rad per unit time (0: 8, 20, 40 cycles over T)");
  app.add_option("--cycles", o.cycles, "Bandwidth as omega_max T / 2pi")->excludes(omega);
  app.add_option("--grid", o.grid, "Swept values, comma separated")->delimiter(',');
  app.add_option("--nc", o.nc, "Coefficients per basis; in sweep-bandwidth the floor of max(2 cycles, nc), "
                 "default the unconstrained cycles")
      ->capture_default_str();
  app.add_option("--method", o.method, "crab or dcrab")
      ->check(CLI::IsMember({"crab", "dcrab"}))
      ->capture_default_str();
  app.add_option("--constraint", o.constraint, "none, penalty or hardwall")
      ->check(CLI::IsMember({"none", "penalty", "hardwall"}))
      ->capture_default_str();
  app.add_option("--transfer", o.transfer, "random (Haar states) or basis (|0..0> to |1..1>)")
      ->check(CLI::IsMember({"random", "basis"}));
  app.add_option("--instances", o.instances, "Random instances per swept value");
  app.add_option("--restarts", o.restarts, "Restarts per instance");
  app.add_option("--seed", o.seed, "Master seed")->capture_default_str();
  app.add_option("--out-csv", o.out_csv, "Write the sweep table here");
  app.add_option("--out-plot", o.out_plot, "Write an SVG plot here");
  app.add_option("--plot-column", o.plot_column, "p, effort, infidelity or maxabs")
      ->check(CLI::IsMember({"p", "effort", "infidelity", "maxabs"}));
  app.add_option("--budget", o.budget, "Function evaluations per run")->capture_default_str();
  app.add_option("--super-iterations", o.super_iterations, "dCRAB super-iteration cap")
      ->capture_default_str();
  app.add_option("--threshold", o.threshold, "Success threshold on 1 - F")->capture_default_str();
  app.add_option("--start-scale", o.start_scale, "Initial coefficients uniform in [-s, s]")
      ->capture_default_str();
  app.add_option("--initial-step", o.initial_step, "First simplex edge")->capture_default_str();
  app.add_option("--restart-step", o.restart_step, "Simplex edge after dressing")
      ->capture_default_str();
  app.add_option("--simplex-restarts", o.simplex_restarts, "Same-basis simplex restarts")
      ->capture_default_str();
  app.add_option("--steps", o.steps, "Propagation steps (0: from the bandwidth)");
  app.add_option("--workers", o.workers, "Worker threads (0: all cores)");
  app.add_flag("--quiet", o.quiet, "Do not print the table");

  auto* sweep_nc = app.add_subcommand("sweep-nc", "Success probability and effort against N_C");
  auto* sweep_bw = app.add_subcommand("sweep-bandwidth", "Infidelity against omega_max T / 2pi");
  auto* sweep_fmax =
      app.add_subcommand("sweep-fmax", "Infidelity against f_max (hardwall) or lambda (penalty)");
  auto* single = app.add_subcommand("single-run", "One optimization, printed as a record");
  auto* verify = app.add_subcommand("verify-landscape", "Numerical checks of the landscape theory");
  verify->add_option("--repetitions", o.repetitions, "Repetitions of the rank check")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  auto given = [&app](const char* name) { return app.get_option(name)->count() > 0; };
  try {
    if (*verify) {
      dcrab::VerificationOptions v;
      v.seed = o.seed;
      v.rank_repetitions = o.repetitions;
      const auto report = dcrab::verify_landscape(v);
      dcrab::write_report(std::cout, report);
      return report.passed() ? 0 : 1;
    }

    dcrab::ExperimentKind kind = dcrab::ExperimentKind::sweep_nc;
    if (*sweep_bw) kind = dcrab::ExperimentKind::sweep_bandwidth;
    if (*sweep_fmax) kind = dcrab::ExperimentKind::sweep_fmax;
    if (*single) kind = dcrab::ExperimentKind::single_run;
    (void)sweep_nc;

    // The bandwidth and pulse-height experiments follow one fixed instance with
    // a basis-state transfer unless told otherwise.
    const bool fixed_instance = kind == dcrab::ExperimentKind::sweep_bandwidth ||
                                kind == dcrab::ExperimentKind::sweep_fmax;
    if (fixed_instance && !given("--transfer")) o.transfer = "basis";
    if ((fixed_instance || kind == dcrab::ExperimentKind::single_run) && !given("--instances"))
      o.instances = 1;
    if (kind == dcrab::ExperimentKind::single_run && !given("--restarts")) o.restarts = 1;
    if (kind == dcrab::ExperimentKind::sweep_bandwidth && !given("--nc"))
      o.nc = static_cast<std::size_t>(dcrab::default_bandwidth_cycles(o.qubits));
    if (o.grid.empty()) {
      if (kind == dcrab::ExperimentKind::sweep_nc) o.grid = {1, 2, 3, 4, 5, 6, 7, 8, 10, 12};
      if (kind == dcrab::ExperimentKind::sweep_bandwidth) o.grid = {1, 2, 3, 4, 5, 6, 7, 8};
      if (kind == dcrab::ExperimentKind::sweep_fmax)
        o.grid = o.constraint == "penalty" ? std::vector<double>{0.001, 0.003, 0.01, 0.03, 0.1}
                                           : std::vector<double>{0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
    }
    return run_experiment(o, kind);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
