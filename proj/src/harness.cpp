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

#include "dcrab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace dcrab {

namespace {

constexpr std::uint64_t kProblemStream = 0;
constexpr std::uint64_t kRestartStream = 1;

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double sum = 0.0;
  for (const double v : values) sum += (v - mean) * (v - mean);
  return std::sqrt(sum / static_cast<double>(values.size() - 1));
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

void draw_couplings(std::size_t n_qubits, Rng& rng, std::vector<double>& alphas,
                    std::vector<double>& betas) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  alphas.resize(n_qubits);
  betas.resize(n_qubits);
  for (double& a : alphas) a = unit(rng);
  for (double& b : betas) b = unit(rng);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::sweep_nc: return "sweep-nc";
    case ExperimentKind::sweep_bandwidth: return "sweep-bandwidth";
    case ExperimentKind::sweep_fmax: return "sweep-fmax";
    case ExperimentKind::single_run: return "single-run";
    case ExperimentKind::verify_landscape: return "verify-landscape";
  }
  return "unknown";
}

std::string_view to_string(Method method) {
  return method == Method::crab ? "crab" : "dcrab";
}

std::string_view to_string(Transfer transfer) {
  return transfer == Transfer::random ? "random" : "basis";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (auto kind : {ExperimentKind::sweep_nc, ExperimentKind::sweep_bandwidth,
                    ExperimentKind::sweep_fmax, ExperimentKind::single_run,
                    ExperimentKind::verify_landscape})
    if (text == to_string(kind)) return kind;
  throw std::invalid_argument("unknown experiment kind '" + std::string(text) + "'");
}

Method parse_method(std::string_view text) {
  if (text == "crab") return Method::crab;
  if (text == "dcrab") return Method::dcrab;
  throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

Transfer parse_transfer(std::string_view text) {
  if (text == "random") return Transfer::random;
  if (text == "basis") return Transfer::basis;
  throw std::invalid_argument("unknown transfer '" + std::string(text) + "'");
}

double default_total_time(std::size_t n_qubits) {
  switch (n_qubits) {
    case 3: return 10.0 * std::numbers::pi;
    case 4: return 16.0 * std::numbers::pi;
    default: return 6.0 * std::numbers::pi;
  }
}

double default_bandwidth_cycles(std::size_t n_qubits) {
  switch (n_qubits) {
    case 3: return 20.0;
    case 4: return 40.0;
    default: return 8.0;
  }
}

double ExperimentConfig::resolved_time() const {
  return total_time > 0.0 ? total_time : default_total_time(n_qubits);
}

double ExperimentConfig::resolved_omega_max() const {
  if (omega_max > 0.0) return omega_max;
  return default_bandwidth_cycles(n_qubits) * 2.0 * std::numbers::pi / resolved_time();
}

void ExperimentConfig::validate() const {
  if (n_qubits < 1 || n_qubits > 12) throw std::invalid_argument("qubits must lie in [1, 12]");
  if (!(total_time >= 0.0) || !std::isfinite(total_time))
    throw std::invalid_argument("total time must be positive");
  if (!(omega_max >= 0.0) || !std::isfinite(omega_max))
    throw std::invalid_argument("omega_max must be positive");
  if (n_instances < 1 || n_restarts < 1)
    throw std::invalid_argument("instances and restarts must be at least 1");
  if (n_coefficients < 1) throw std::invalid_argument("need at least one coefficient");
  const bool sweep = kind == ExperimentKind::sweep_nc || kind == ExperimentKind::sweep_bandwidth ||
                     kind == ExperimentKind::sweep_fmax;
  if (sweep && grid.empty()) throw std::invalid_argument("swept grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw std::invalid_argument("swept grid must be finite");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("swept grid must be strictly increasing");
  }
  if (kind == ExperimentKind::sweep_nc)
    for (const double v : grid)
      if (v < 1.0 || v != std::floor(v))
        throw std::invalid_argument("coefficient counts must be positive integers");
  if (kind == ExperimentKind::sweep_bandwidth)
    for (const double v : grid)
      if (!(v > 0.0)) throw std::invalid_argument("bandwidths must be positive");
  if (kind == ExperimentKind::sweep_fmax) {
    if (constraint == ConstraintMode::none)
      throw std::invalid_argument("sweep-fmax needs the penalty or hardwall constraint");
    for (const double v : grid)
      if (constraint == ConstraintMode::hard_wall ? !(v > 0.0) : !(v >= 0.0))
        throw std::invalid_argument("height bounds must be positive, penalty weights non-negative");
  } else if (kind == ExperimentKind::single_run) {
    if (constraint != ConstraintMode::none && grid.size() != 1)
      throw std::invalid_argument("a constrained single run takes its bound or weight as the only grid value");
  } else if (constraint != ConstraintMode::none) {
    throw std::invalid_argument("constraints apply to sweep-fmax and single-run only");
  }
  if (optimizer.penalty_weight || optimizer.height_bound)
    throw std::invalid_argument("set the constraint through the experiment, not the optimizer");
}

SpinProblem generate_instance(std::size_t n_qubits, double total_time, std::uint64_t seed) {
  Rng rng = make_rng(child_seed(seed, kProblemStream));
  std::vector<double> alphas, betas;
  draw_couplings(n_qubits, rng, alphas, betas);
  const std::size_t dim = std::size_t{1} << n_qubits;
  QuantumState initial = random_state(dim, rng);
  QuantumState target = random_state(dim, rng);
  return make_spin_problem(alphas, betas, std::move(initial), std::move(target), total_time);
}

SpinProblem generate_basis_instance(std::size_t n_qubits, double total_time, std::uint64_t seed) {
  Rng rng = make_rng(child_seed(seed, kProblemStream));
  std::vector<double> alphas, betas;
  draw_couplings(n_qubits, rng, alphas, betas);
  const std::size_t dim = std::size_t{1} << n_qubits;
  return make_spin_problem(alphas, betas, QuantumState::basis(dim, 0),
                           QuantumState::basis(dim, dim - 1), total_time);
}

std::uint64_t instance_seed(std::uint64_t master_seed, std::size_t instance) {
  return child_seed(master_seed, instance);
}

std::uint64_t restart_seed(std::uint64_t master_seed, std::size_t instance, std::size_t restart) {
  return child_seed(child_seed(instance_seed(master_seed, instance), kRestartStream), restart);
}

double bandwidth_bound(std::size_t n_qubits, double total_time) {
  if (n_qubits < 1) throw std::invalid_argument("need at least one qubit");
  if (!(total_time > 0.0)) throw std::invalid_argument("total time must be positive");
  return 2.0 * std::ldexp(1.0, static_cast<int>(n_qubits)) / total_time;
}

CrabConfig trial_config(const ExperimentConfig& config, double value) {
  CrabConfig c = config.optimizer;
  const double T = config.resolved_time();
  c.omega_max = config.resolved_omega_max();
  c.n_coefficients = config.n_coefficients;
  if (config.method == Method::crab) c.n_super_iterations = 1;
  switch (config.kind) {
    case ExperimentKind::sweep_nc:
      c.n_coefficients = static_cast<std::size_t>(value);
      break;
    case ExperimentKind::sweep_bandwidth:
      c.omega_max = value * 2.0 * std::numbers::pi / T;
      if (config.method == Method::dcrab)
        c.n_coefficients = std::max(config.n_coefficients,
                                    static_cast<std::size_t>(std::ceil(2.0 * value - 1e-9)));
      break;
    case ExperimentKind::sweep_fmax:
    case ExperimentKind::single_run:
      if (config.constraint == ConstraintMode::hard_wall) c.height_bound = value;
      if (config.constraint == ConstraintMode::penalty) c.penalty_weight = value;
      break;
    case ExperimentKind::verify_landscape:
      break;
  }
  return c;
}

TrialRunner default_runner(Method method) {
  if (method == Method::crab)
    return [](const SpinProblem& p, const CrabConfig& c, Rng& rng) { return run_crab(p, c, rng); };
  return [](const SpinProblem& p, const CrabConfig& c, Rng& rng) { return run_dcrab(p, c, rng); };
}

SweepRow summarize(double swept_value, std::span<const TrialRecord> trials,
                   std::size_t n_instances) {
  SweepRow row;
  row.swept_value = swept_value;
  row.n_trials = trials.size();
  if (trials.empty()) return row;

  std::vector<double> per_instance_hits(n_instances, 0.0), per_instance_count(n_instances, 0.0);
  std::vector<double> log_evals, log_eps, maxima, eps;
  std::size_t successes = 0;
  double success_evals = 0.0;
  for (const auto& t : trials) {
    if (t.instance >= n_instances) throw std::invalid_argument("trial instance out of range");
    per_instance_count[t.instance] += 1.0;
    if (t.success) {
      ++successes;
      per_instance_hits[t.instance] += 1.0;
      success_evals += static_cast<double>(t.n_function_evaluations);
      log_evals.push_back(std::log10(static_cast<double>(std::max<std::size_t>(t.n_function_evaluations, 1))));
    }
    eps.push_back(t.final_infidelity);
    log_eps.push_back(std::log10(std::max(t.final_infidelity, 1e-16)));
    maxima.push_back(t.max_abs);
  }
  const double n = static_cast<double>(trials.size());
  row.p = static_cast<double>(successes) / n;
  std::vector<double> fractions;
  for (std::size_t i = 0; i < n_instances; ++i)
    if (per_instance_count[i] > 0.0) fractions.push_back(per_instance_hits[i] / per_instance_count[i]);
  row.p_std = sample_std(fractions);
  row.effort = successes == 0 ? std::numeric_limits<double>::infinity()
                              : (success_evals / static_cast<double>(successes)) / row.p;
  row.effort_logstd = sample_std(log_evals);
  row.mean_infidelity = mean_of(eps);
  row.infidelity_logstd = sample_std(log_eps);
  row.mean_max_abs = mean_of(maxima);
  row.max_abs_std = sample_std(maxima);
  return row;
}

SweepResult run_sweep(const ExperimentConfig& config, const TrialRunner& runner) {
  config.validate();
  if (config.kind == ExperimentKind::verify_landscape)
    throw std::invalid_argument("verify-landscape is not a sweep");
  const TrialRunner run = runner ? runner : default_runner(config.method);
  const double T = config.resolved_time();

  std::vector<SpinProblem> problems;
  problems.reserve(config.n_instances);
  for (std::size_t i = 0; i < config.n_instances; ++i) {
    const auto seed = instance_seed(config.master_seed, i);
    problems.push_back(config.transfer == Transfer::basis
                           ? generate_basis_instance(config.n_qubits, T, seed)
                           : generate_instance(config.n_qubits, T, seed));
  }

  std::vector<double> values = config.grid;
  if (values.empty()) values.push_back(0.0);
  std::vector<CrabConfig> configs;
  for (const double v : values) {
    configs.push_back(trial_config(config, v));
    configs.back().validate();
  }

  const std::size_t per_value = config.n_instances * config.n_restarts;
  SweepResult result;
  result.trials.resize(values.size() * per_value);
  for (std::size_t w = 0; w < values.size(); ++w)
    for (std::size_t i = 0; i < config.n_instances; ++i)
      for (std::size_t r = 0; r < config.n_restarts; ++r) {
        auto& t = result.trials[w * per_value + i * config.n_restarts + r];
        t.swept_value = values[w];
        t.instance = i;
        t.restart = r;
        t.seed = restart_seed(config.master_seed, i, r);
      }

  auto work = [&](std::size_t index) {
    TrialRecord& t = result.trials[index];
    const CrabConfig& c = configs[index / per_value];
    try {
      Rng rng = make_rng(t.seed);
      t.record = run(problems[t.instance], c, rng);
      t.record.seed = t.seed;
      t.success = t.record.success;
      t.final_infidelity = t.record.final_infidelity;
      t.n_function_evaluations = t.record.n_function_evaluations;
      t.super_iterations = t.record.super_iterations();
      t.max_abs = max_abs(t.record.pulse, c.grid(T));
    } catch (const std::exception& e) {
      t.error = e.what();
    } catch (...) {
      t.error = "unknown exception";
    }
    if (t.error) {
      t.success = false;
      t.final_infidelity = 1.0;
      t.n_function_evaluations = 0;
      t.super_iterations = 0;
      t.max_abs = 0.0;
    }
  };

  std::size_t workers = config.n_workers > 0 ? config.n_workers : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, result.trials.size());
  if (workers == 1) {
    for (std::size_t k = 0; k < result.trials.size(); ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < result.trials.size(); k = next++) work(k);
      });
  }

  for (std::size_t w = 0; w < values.size(); ++w)
    result.table.rows.push_back(summarize(
        values[w], std::span<const TrialRecord>(result.trials).subspan(w * per_value, per_value),
        config.n_instances));
  return result;
}

}  // namespace dcrab
