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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcrab/engine.hpp"
#include "dcrab/quantum.hpp"
#include "dcrab/random.hpp"

namespace dcrab {

enum class ExperimentKind { sweep_nc, sweep_bandwidth, sweep_fmax, single_run, verify_landscape };
enum class Method { crab, dcrab };
/// random: Haar initial and target states. basis: |0...0> to |1...1>.
enum class Transfer { random, basis };

std::string_view to_string(ExperimentKind kind);
std::string_view to_string(Method method);
std::string_view to_string(Transfer transfer);
ExperimentKind parse_experiment_kind(std::string_view text);
Method parse_method(std::string_view text);
Transfer parse_transfer(std::string_view text);

/// Default total time and bandwidth (in cycles over T) for 2, 3 and 4 qubits;
/// other sizes fall back to the two-qubit values.
double default_total_time(std::size_t n_qubits);
double default_bandwidth_cycles(std::size_t n_qubits);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::sweep_nc;
  std::size_t n_qubits = 2;
  /// 0 selects default_total_time.
  double total_time = 0.0;
  /// rad per unit time; 0 selects default_bandwidth_cycles * 2 pi / T.
  double omega_max = 0.0;
  /// Swept values: N_C for sweep-nc, bandwidth in cycles omega_max T / 2 pi
  /// for sweep-bandwidth, f_max (hard wall) or lambda (penalty) for sweep-fmax.
  std::vector<double> grid;
  std::size_t n_instances = 10;
  std::size_t n_restarts = 10;
  std::uint64_t master_seed = 1;
  Method method = Method::dcrab;
  ConstraintMode constraint = ConstraintMode::none;
  Transfer transfer = Transfer::random;
  /// Coefficients per basis outside sweep-nc. In the bandwidth sweep dCRAB uses
  /// max(2 * cycles, n_coefficients).
  std::size_t n_coefficients = 6;
  /// Optimizer settings; n_coefficients, omega_max, penalty and bound are
  /// overwritten per trial.
  CrabConfig optimizer;
  /// Worker threads; 0 uses the hardware concurrency.
  std::size_t n_workers = 0;
  std::string out_csv;
  std::string out_plot;

  double resolved_time() const;
  double resolved_omega_max() const;
  /// Throws std::invalid_argument on an unusable configuration.
  void validate() const;
};

/// Instance with alpha_i, beta_i uniform on [0, 1] and Haar-random states.
SpinProblem generate_instance(std::size_t n_qubits, double total_time, std::uint64_t instance_seed);
/// Same Hamiltonian draw as generate_instance, transfer |0...0> to |1...1>.
SpinProblem generate_basis_instance(std::size_t n_qubits, double total_time,
                                    std::uint64_t instance_seed);

/// master -> instance -> restart. Neither depends on the swept value.
std::uint64_t instance_seed(std::uint64_t master_seed, std::size_t instance);
std::uint64_t restart_seed(std::uint64_t master_seed, std::size_t instance, std::size_t restart);

/// D / T with D = 2 * 2^N, the real dimension of the state space.
double bandwidth_bound(std::size_t n_qubits, double total_time);

/// Optimizer settings of one trial at swept value `value`.
CrabConfig trial_config(const ExperimentConfig& config, double value);

struct TrialRecord {
  double swept_value = 0.0;
  std::size_t instance = 0;
  std::size_t restart = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double final_infidelity = 1.0;
  std::size_t n_function_evaluations = 0;
  std::size_t super_iterations = 0;
  /// max |f| of the final pulse on the propagation grid.
  double max_abs = 0.0;
  /// Set when the trial threw; the trial then counts as a failure.
  std::optional<std::string> error;
  OptimizationRecord record;
};

struct SweepRow {
  double swept_value = 0.0;
  double p = 0.0;
  /// Sample standard deviation of the per-instance success fractions.
  double p_std = 0.0;
  double effort = 0.0;
  /// Sample standard deviation of log10 n_f over successful trials.
  double effort_logstd = 0.0;
  std::size_t n_trials = 0;
  double mean_infidelity = 0.0;
  /// Sample standard deviation of log10 of the final infidelity.
  double infidelity_logstd = 0.0;
  double mean_max_abs = 0.0;
  double max_abs_std = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  bool operator==(const SweepTable&) const = default;
};

struct SweepResult {
  SweepTable table;
  /// Ordered by swept value, then instance, then restart.
  std::vector<TrialRecord> trials;
};

using TrialRunner =
    std::function<OptimizationRecord(const SpinProblem&, const CrabConfig&, Rng&)>;

/// run_crab or run_dcrab according to the method.
TrialRunner default_runner(Method method);

/// Runs n_instances x n_restarts trials per swept value on a bounded worker
/// pool. A trial that throws is recorded as a failure with its message.
SweepResult run_sweep(const ExperimentConfig& config, const TrialRunner& runner = {});

/// Aggregates trials of one swept value.
SweepRow summarize(double swept_value, std::span<const TrialRecord> trials,
                   std::size_t n_instances);

/// Stable column order: swept_value,p,p_std,effort,effort_logstd,n_trials,
/// then mean_infidelity,infidelity_logstd,mean_max_abs,max_abs_std.
void write_csv(std::ostream& out, const SweepTable& table);
void emit_csv(const SweepTable& table, const std::filesystem::path& path);
SweepTable parse_csv(std::istream& in);
SweepTable read_csv(const std::filesystem::path& path);

enum class PlotColumn { p, effort, mean_infidelity, mean_max_abs };

struct PlotOptions {
  PlotColumn column = PlotColumn::p;
  /// Defaults to true for effort and infidelity.
  std::optional<bool> log_y;
  std::string title;
  std::string x_label = "swept value";
  /// Dashed horizontal reference line, e.g. the success threshold.
  std::optional<double> reference;
};

/// Standalone SVG with error bars from the stored deviations. Log-scale
/// columns use multiplicative bars 10^(+-logstd). Throws on an empty table.
std::string render_plot(const SweepTable& table, const PlotOptions& options = {});
void emit_plot(const SweepTable& table, const std::filesystem::path& path,
               const PlotOptions& options = {});

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::vector<std::pair<std::string, std::string>> measured;
};

struct VerificationReport {
  std::vector<PropertyResult> properties;
  bool passed() const;
};

struct VerificationOptions {
  std::uint64_t seed = 1;
  std::size_t kernel_triples = 20;
  std::size_t rank_repetitions = 100;
  std::size_t trap_points = 10;
  std::size_t escape_draws = 100;
};

/// Landscape checks on random two- and three-qubit instances: kernel against
/// finite differences, tangent-space rank and orthogonality, Gram-Schmidt,
/// gradient following and the trap-escape certificate at CRAB fixed points.
VerificationReport verify_landscape(const VerificationOptions& options = {});

/// One block per property: `[name] PASS|FAIL` then indented key = value lines.
void write_report(std::ostream& out, const VerificationReport& report);

}  // namespace dcrab
