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

#include "dcrab/engine.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dcrab {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Objective over the coefficients of the newest super-iteration. The frozen
// part of the pulse and the new basis are sampled once; evaluation reproduces
// DressedPulse::sample bit for bit.
class CoefficientObjective {
 public:
  CoefficientObjective(const SpinProblem& problem, const CrabConfig& config,
                       const DressedPulse& frozen, const std::vector<BasisFunction>& basis,
                       const TimeGrid& grid)
      : problem_(problem),
        propagator_(problem.drift, problem.control),
        mode_(config.mode()),
        penalty_(config.penalty_weight.value_or(0.0)),
        bound_(config.height_bound.value_or(0.0)),
        frozen_(frozen.sample(grid)),
        n_basis_(basis.size()),
        basis_samples_(grid.n_steps() * basis.size()),
        samples_(grid.n_steps()) {
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
      const double t = grid.midpoint(k);
      for (std::size_t i = 0; i < n_basis_; ++i) basis_samples_[k * n_basis_ + i] = basis[i](t);
    }
  }

  double operator()(std::span<const double> c) {
    for (std::size_t k = 0; k < samples_.size(); ++k) {
      const double* row = &basis_samples_[k * n_basis_];
      double s = 0.0;
      for (std::size_t i = 0; i < n_basis_; ++i) s += c[i] * row[i];
      samples_[k] = mode_ == ConstraintMode::hard_wall ? clip(frozen_[k] + s, bound_) : frozen_[k] + s;
    }
    const double f = fidelity(propagate(problem_, samples_, propagator_), problem_.target);
    if (mode_ == ConstraintMode::penalty) return penalized_objective(f, penalty_, max_abs(samples_));
    return 1.0 - f;
  }

 private:
  const SpinProblem& problem_;
  Propagator propagator_;
  ConstraintMode mode_;
  double penalty_;
  double bound_;
  std::vector<double> frozen_;
  std::size_t n_basis_;
  std::vector<double> basis_samples_;  // row-major, n_steps x n_basis
  std::vector<double> samples_;
};

}  // namespace

std::string_view to_string(ConstraintMode mode) {
  switch (mode) {
    case ConstraintMode::none: return "none";
    case ConstraintMode::penalty: return "penalty";
    case ConstraintMode::hard_wall: return "hardwall";
  }
  return "unknown";
}

ConstraintMode parse_constraint_mode(std::string_view text) {
  if (text == "none") return ConstraintMode::none;
  if (text == "penalty") return ConstraintMode::penalty;
  if (text == "hardwall" || text == "hard_wall") return ConstraintMode::hard_wall;
  throw std::invalid_argument("unknown constraint mode '" + std::string(text) + "'");
}

ConstraintMode CrabConfig::mode() const {
  if (penalty_weight && height_bound)
    throw std::invalid_argument("penalty weight and height bound are mutually exclusive");
  if (penalty_weight) return ConstraintMode::penalty;
  if (height_bound) return ConstraintMode::hard_wall;
  return ConstraintMode::none;
}

TimeGrid CrabConfig::grid(double total_time) const {
  return n_steps > 0 ? TimeGrid(total_time, n_steps) : TimeGrid::for_bandwidth(total_time, omega_max);
}

void CrabConfig::validate() const {
  if (n_coefficients < 1) throw std::invalid_argument("need at least one coefficient");
  if (!(omega_max > 0.0) || !std::isfinite(omega_max))
    throw std::invalid_argument("omega_max must be positive");
  if (n_super_iterations < 1) throw std::invalid_argument("need at least one super-iteration");
  if (!(success_threshold > 0.0 && success_threshold < 1.0))
    throw std::invalid_argument("success threshold must lie in (0, 1)");
  if (!(coefficient_start_scale >= 0.0)) throw std::invalid_argument("negative start scale");
  if (!(initial_simplex_step > 0.0) || !(restart_simplex_step > 0.0))
    throw std::invalid_argument("simplex steps must be positive");
  if (penalty_weight && !(*penalty_weight >= 0.0))
    throw std::invalid_argument("penalty weight must be non-negative");
  if (height_bound && !(*height_bound > 0.0))
    throw std::invalid_argument("height bound must be positive");
  (void)mode();
}

double penalized_objective(double fidelity, double penalty_weight, double pulse_max_abs) {
  return 1.0 - (fidelity - penalty_weight * pulse_max_abs);
}

double infidelity(const SpinProblem& problem, const DressedPulse& pulse, const TimeGrid& grid) {
  const auto samples = pulse.sample(grid);
  return 1.0 - fidelity(propagate(problem, samples), problem.target);
}

double objective_value(const SpinProblem& problem, const DressedPulse& pulse,
                       const CrabConfig& config) {
  const TimeGrid grid = config.grid(problem.total_time);
  const auto samples = pulse.sample(grid);
  const double f = fidelity(propagate(problem, samples), problem.target);
  if (config.mode() == ConstraintMode::penalty)
    return penalized_objective(f, *config.penalty_weight, max_abs(samples));
  return 1.0 - f;
}

OptimizationRecord run_crab(const SpinProblem& problem, const CrabConfig& config, Rng& rng) {
  if (config.n_super_iterations != 1)
    throw std::invalid_argument("run_crab expects n_super_iterations == 1");
  return run_dcrab(problem, config, rng);
}

OptimizationRecord run_dcrab(const SpinProblem& problem, const CrabConfig& config, Rng& rng) {
  config.validate();
  const ConstraintMode mode = config.mode();
  const std::size_t nc = config.n_coefficients;
  if (config.max_total_evaluations < nc + 1)
    throw std::invalid_argument("evaluation budget is smaller than one simplex initialization");

  const TimeGrid grid = config.grid(problem.total_time);
  // Stop as soon as the infidelity is strictly below the threshold.
  const std::optional<double> target =
      mode == ConstraintMode::penalty
          ? std::nullopt
          : std::optional<double>(std::nextafter(config.success_threshold, 0.0));

  OptimizationRecord record;
  record.total_time = problem.total_time;
  record.n_steps = grid.n_steps();
  DressedPulse pulse(0.0, config.height_bound);

  for (std::size_t j = 0; j < config.n_super_iterations; ++j) {
    const std::size_t remaining = config.max_total_evaluations - record.n_function_evaluations;
    if (remaining < nc + 1) break;

    auto basis = sample_basis(nc, config.omega_max, rng);
    std::vector<double> start(nc, 0.0);
    if (j == 0) {
      std::uniform_real_distribution<double> coeff(-config.coefficient_start_scale,
                                                   config.coefficient_start_scale);
      for (double& c : start) c = coeff(rng);
    }

    CoefficientObjective objective(problem, config, pulse, basis, grid);
    pulse = pulse.dress(std::move(basis));

    SimplexConfig simplex;
    simplex.x_tolerance = config.x_tolerance;
    simplex.f_tolerance = config.f_tolerance;
    simplex.max_evaluations = remaining;
    simplex.initial_step = j == 0 ? config.initial_simplex_step : config.restart_simplex_step;

    auto objective_fn = [&objective](std::span<const double> c) { return objective(c); };
    MinimizeResult result = minimize(objective_fn, start, simplex, target);
    for (std::size_t r = 0; r < config.simplex_restarts; ++r) {
      if (result.status != SimplexStatus::converged) break;
      const std::size_t left = remaining - result.n_evaluations;
      if (left < nc + 1) break;
      simplex.max_evaluations = left;
      MinimizeResult again = minimize(objective_fn, result.best_point, simplex, target);
      const bool improved = again.best_value < result.best_value - config.f_tolerance;
      again.n_evaluations += result.n_evaluations;
      if (again.best_value <= result.best_value) {
        again.best_trace.insert(again.best_trace.begin(), result.best_trace.begin(),
                                result.best_trace.end());
        result = std::move(again);
      } else {
        result.n_evaluations = again.n_evaluations;
      }
      if (!improved) break;
    }

    pulse = pulse.with_last_coefficients(result.best_point);
    record.n_function_evaluations += result.n_evaluations;
    record.evaluations_per_iteration.push_back(result.n_evaluations);
    record.trace.push_back(result.best_value);
    record.last_status = result.status;

    if (result.status == SimplexStatus::target_reached) break;
    if (result.status == SimplexStatus::max_evals_reached) break;
  }

  record.final_infidelity = infidelity(problem, pulse, grid);
  record.final_objective = record.trace.back();
  record.success = record.final_infidelity < config.success_threshold;
  record.pulse = std::move(pulse);
  return record;
}

double effort_metric(std::span<const OptimizationRecord> records) {
  if (records.empty()) throw std::invalid_argument("effort_metric needs at least one record");
  std::size_t successes = 0;
  double total = 0.0;
  for (const auto& r : records) {
    if (!r.success) continue;
    ++successes;
    total += static_cast<double>(r.n_function_evaluations);
  }
  if (successes == 0) return std::numeric_limits<double>::infinity();
  const double mean = total / static_cast<double>(successes);
  const double p = static_cast<double>(successes) / static_cast<double>(records.size());
  return mean / p;
}

void write_record(std::ostream& out, const OptimizationRecord& record) {
  out << "final_infidelity=" << num(record.final_infidelity) << '\n'
      << "final_objective=" << num(record.final_objective) << '\n'
      << "n_function_evaluations=" << record.n_function_evaluations << '\n'
      << "success=" << (record.success ? "true" : "false") << '\n'
      << "super_iterations=" << record.super_iterations() << '\n'
      << "last_status=" << to_string(record.last_status) << '\n'
      << "seed=" << (record.seed ? std::to_string(*record.seed) : std::string("none")) << '\n';
  for (std::size_t j = 0; j < record.trace.size(); ++j)
    out << "trace " << j << ' ' << num(record.trace[j]) << ' '
        << record.evaluations_per_iteration[j] << '\n';
  write_pulse(out, {record.pulse, record.total_time, record.n_steps});
}

std::string format_record(const OptimizationRecord& record) {
  std::ostringstream out;
  write_record(out, record);
  return out.str();
}

}  // namespace dcrab
