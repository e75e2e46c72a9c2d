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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcrab/pulse.hpp"
#include "dcrab/quantum.hpp"
#include "dcrab/random.hpp"
#include "dcrab/simplex.hpp"

namespace dcrab {

enum class ConstraintMode { none, penalty, hard_wall };

std::string_view to_string(ConstraintMode mode);
ConstraintMode parse_constraint_mode(std::string_view text);

struct CrabConfig {
  std::size_t n_coefficients = 6;
  /// Upper end of the frequency interval, rad per unit time.
  double omega_max = 1.0;
  /// 1 is plain CRAB.
  std::size_t n_super_iterations = 50;
  double success_threshold = 1e-3;
  /// Shared by all super-iterations of one run.
  std::size_t max_total_evaluations = 20000;
  /// Starting coefficients are uniform in [-scale, scale].
  double coefficient_start_scale = 1.0;
  /// Simplex edge of the first super-iteration.
  double initial_simplex_step = 1.0;
  /// Simplex edge around the zero coefficients of every later super-iteration.
  double restart_simplex_step = 0.1;
  std::optional<double> penalty_weight;
  std::optional<double> height_bound;
  /// Fresh simplices started at the incumbent (same basis) after a converged
  /// simplex run; the restarts end once one fails to improve by f_tolerance.
  std::size_t simplex_restarts = 0;
  /// Propagation steps; 0 selects TimeGrid::for_bandwidth.
  std::size_t n_steps = 0;
  double x_tolerance = 1e-6;
  double f_tolerance = 1e-8;

  ConstraintMode mode() const;
  TimeGrid grid(double total_time) const;
  void validate() const;
};

/// Outcome of one CRAB / dCRAB optimization.
struct OptimizationRecord {
  double final_infidelity = 1.0;
  /// Objective (infidelity, or penalized infidelity) of the final pulse.
  double final_objective = 1.0;
  std::size_t n_function_evaluations = 0;
  bool success = false;
  /// Best objective value at the end of each super-iteration.
  std::vector<double> trace;
  /// Evaluations spent in each super-iteration.
  std::vector<std::size_t> evaluations_per_iteration;
  SimplexStatus last_status = SimplexStatus::converged;
  DressedPulse pulse;
  double total_time = 0.0;
  std::size_t n_steps = 0;
  std::optional<std::uint64_t> seed;

  std::size_t super_iterations() const noexcept { return trace.size(); }
};

/// 1 - (F - lambda * max|f|).
double penalized_objective(double fidelity, double penalty_weight, double pulse_max_abs);

/// Minimization objective of `pulse` on the configured grid: 1 - F, or the
/// penalized form in penalty mode. Hard-wall clipping is the pulse's own.
double objective_value(const SpinProblem& problem, const DressedPulse& pulse,
                       const CrabConfig& config);

/// 1 - F of `pulse` sampled on `grid`.
double infidelity(const SpinProblem& problem, const DressedPulse& pulse, const TimeGrid& grid);

/// Plain CRAB: one random basis, one simplex run. Requires
/// config.n_super_iterations == 1.
OptimizationRecord run_crab(const SpinProblem& problem, const CrabConfig& config, Rng& rng);

/// Dressed CRAB. Each super-iteration draws a fresh basis, dresses the
/// incumbent pulse with it and minimizes over the new coefficients only. The
/// first super-iteration starts from random coefficients, later ones from zero
/// (the incumbent) with a small simplex. Stops at the success threshold (not in
/// penalty mode), after n_super_iterations, or when the global budget is spent.
OptimizationRecord run_dcrab(const SpinProblem& problem, const CrabConfig& config, Rng& rng);

/// Mean n_f of the successful runs divided by the success fraction; +infinity
/// when nothing succeeded. Throws std::invalid_argument on empty input.
double effort_metric(std::span<const OptimizationRecord> records);

/// Key-value header followed by one `trace <iteration> <best> <evaluations>`
/// row per super-iteration, then the pulse in pulse-file format.
void write_record(std::ostream& out, const OptimizationRecord& record);
std::string format_record(const OptimizationRecord& record);

}  // namespace dcrab
