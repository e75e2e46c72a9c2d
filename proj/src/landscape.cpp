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

#include "dcrab/landscape.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dcrab {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

void check_pulse(std::span<const double> pulse) {
  if (pulse.empty()) throw std::invalid_argument("pulse must have at least one sample");
  for (const double f : pulse)
    if (!std::isfinite(f)) throw std::invalid_argument("pulse contains a non-finite sample");
}

double relative_difference(const CVector& a, const CVector& b) {
  const double scale = std::max(a.norm(), b.norm());
  if (scale == 0.0) return 0.0;
  return (a - b).norm() / scale;
}

}  // namespace

SampledFunction sample_function(const TimeGrid& grid, const std::function<double(double)>& f) {
  SampledFunction out{grid, std::vector<double>(grid.n_steps())};
  for (std::size_t k = 0; k < grid.n_steps(); ++k) out.values[k] = f(grid.midpoint(k));
  return out;
}

AdjointTrajectory compute_adjoint_trajectory(const SpinProblem& problem,
                                             std::span<const double> pulse, const CVector& seed) {
  check_pulse(pulse);
  if (static_cast<std::size_t>(seed.size()) != problem.dimension())
    throw std::invalid_argument("adjoint seed dimension mismatch");
  const TimeGrid grid(problem.total_time, pulse.size());
  const double dt = grid.dt();
  const std::size_t n = pulse.size();

  AdjointTrajectory tr{grid, {pulse.begin(), pulse.end()}, {}, {}, {}, seed};
  tr.cells.reserve(n);
  tr.forward.reserve(n + 1);
  Propagator propagator(problem.drift, problem.control);
  tr.forward.push_back(problem.initial.amplitudes());
  for (std::size_t k = 0; k < n; ++k) {
    tr.cells.push_back(propagator.diagonalize(pulse[k]));
    tr.forward.push_back(tr.cells.back().evolve(tr.forward.back(), dt));
  }
  tr.adjoint.assign(n + 1, CVector());
  tr.adjoint[n] = seed;
  for (std::size_t k = n; k-- > 0;) tr.adjoint[k] = tr.cells[k].evolve(tr.adjoint[k + 1], -dt);
  return tr;
}

CVector fidelity_gradient_seed(const CVector& final_state, const QuantumState& target) {
  if (final_state.size() != target.amplitudes().size())
    throw std::invalid_argument("gradient seed dimension mismatch");
  const Complex overlap = target.amplitudes().dot(final_state);
  return 2.0 * overlap * target.amplitudes();
}

CVector step_derivative(const CellSpectrum& cell, const CMatrix& control, double dt,
                        const CVector& v) {
  const CMatrix& vecs = cell.vectors;
  const CVector w = vecs.adjoint() * v;
  const CMatrix h1 = vecs.adjoint() * control * vecs;
  const Eigen::Index m = w.size();
  CVector out = CVector::Zero(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    Complex sum = 0.0;
    for (Eigen::Index b = 0; b < m; ++b) {
      const double ea = cell.energies[a];
      const double eb = cell.energies[b];
      const Complex weight =
          std::polar(dt * sinc(0.5 * (ea - eb) * dt), -0.5 * (ea + eb) * dt);
      sum += h1(a, b) * weight * w[b];
    }
    out[a] = Complex(0.0, -1.0) * sum;
  }
  return vecs * out;
}

SampledFunction gradient_kernel(const SpinProblem& problem, const AdjointTrajectory& trajectory) {
  const std::size_t n = trajectory.grid.n_steps();
  const double dt = trajectory.grid.dt();
  SampledFunction k{trajectory.grid, std::vector<double>(n)};
  const CMatrix& control = problem.control.matrix();
  for (std::size_t s = 0; s < n; ++s) {
    const CVector d = step_derivative(trajectory.cells[s], control, dt, trajectory.forward[s]);
    k.values[s] = real_inner(trajectory.adjoint[s + 1], d) / dt;
  }
  return k;
}

SampledFunction gradient_kernel(const SpinProblem& problem, const DressedPulse& pulse,
                                const TimeGrid& grid) {
  if (grid.total_time() != problem.total_time)
    throw std::invalid_argument("grid duration differs from the problem's total time");
  const auto samples = pulse.sample(grid);
  const QuantumState final_state = propagate(problem, samples);
  const CVector seed = fidelity_gradient_seed(final_state.amplitudes(), problem.target);
  return gradient_kernel(problem, compute_adjoint_trajectory(problem, samples, seed));
}

SampledFunction gradient_kernel(const SpinProblem& problem, std::span<const double> pulse,
                                const CVector& seed) {
  return gradient_kernel(problem, compute_adjoint_trajectory(problem, pulse, seed));
}

double directional_derivative(const SampledFunction& kernel, const SampledFunction& perturbation) {
  if (!(kernel.grid == perturbation.grid) || kernel.values.size() != perturbation.values.size())
    throw std::invalid_argument("kernel and perturbation live on different grids");
  double sum = 0.0;
  for (std::size_t k = 0; k < kernel.values.size(); ++k)
    sum += kernel.values[k] * perturbation.values[k];
  return sum * kernel.grid.dt();
}

double l2_norm(const SampledFunction& f) {
  double sum = 0.0;
  for (const double v : f.values) sum += v * v;
  return std::sqrt(sum * f.grid.dt());
}

LinearDependenceError::LinearDependenceError(std::size_t index, double relative_pivot)
    : std::runtime_error("state update " + std::to_string(index) +
                         " is linearly dependent on its predecessors (relative pivot " +
                         std::to_string(relative_pivot) + ")"),
      index_(index),
      pivot_(relative_pivot) {}

CVector state_update(const SpinProblem& problem, const AdjointTrajectory& trajectory,
                     std::span<const double> pulse_update) {
  const std::size_t n = trajectory.grid.n_steps();
  if (pulse_update.size() != n) throw std::invalid_argument("pulse update grid mismatch");
  const double dt = trajectory.grid.dt();
  const CMatrix& control = problem.control.matrix();
  CVector acc = CVector::Zero(static_cast<Eigen::Index>(problem.dimension()));
  for (std::size_t s = 0; s < n; ++s) {
    acc = trajectory.cells[s].evolve(acc, dt);
    if (pulse_update[s] != 0.0)
      acc += pulse_update[s] * step_derivative(trajectory.cells[s], control, dt, trajectory.forward[s]);
  }
  return acc;
}

CVector state_update_by_differencing(const SpinProblem& problem,
                                     std::span<const double> base_pulse,
                                     std::span<const double> pulse_update, double amplitude) {
  if (base_pulse.size() != pulse_update.size())
    throw std::invalid_argument("pulse update grid mismatch");
  std::vector<double> plus(base_pulse.begin(), base_pulse.end());
  std::vector<double> minus = plus;
  for (std::size_t k = 0; k < plus.size(); ++k) {
    plus[k] += amplitude * pulse_update[k];
    minus[k] -= amplitude * pulse_update[k];
  }
  const CVector up = propagate(problem, plus).amplitudes();
  const CVector down = propagate(problem, minus).amplitudes();
  return (up - down) / (2.0 * amplitude);
}

TangentUpdateSet state_updates(const SpinProblem& problem, const DressedPulse& pulse,
                               const TimeGrid& grid, std::span<const BasisFunction> directions,
                               const StateUpdateOptions& options) {
  if (grid.total_time() != problem.total_time)
    throw std::invalid_argument("grid duration differs from the problem's total time");
  if (directions.empty()) throw std::invalid_argument("need at least one pulse update");
  if (!(options.amplitude > 0.0)) throw std::invalid_argument("perturbation amplitude must be > 0");

  const std::size_t count = directions.size();
  const auto base = pulse.sample(grid);
  const CVector zero_seed = CVector::Zero(static_cast<Eigen::Index>(problem.dimension()));
  const AdjointTrajectory trajectory = compute_adjoint_trajectory(problem, base, zero_seed);

  TangentUpdateSet set{grid,
                       base,
                       trajectory.final_state(),
                       {directions.begin(), directions.end()},
                       Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(count),
                                                 static_cast<Eigen::Index>(count)),
                       {},
                       {}};
  for (const auto& d : directions) {
    auto samples = sample_function(grid, [&d](double t) { return d(t); }).values;
    CVector formula;
    if (options.method == UpdateMethod::formula || options.cross_check)
      formula = state_update(problem, trajectory, samples);

    CVector result = formula;
    if (options.method == UpdateMethod::differencing || options.cross_check) {
      double amplitude = options.amplitude;
      CVector diff = state_update_by_differencing(problem, base, samples, amplitude);
      if (options.cross_check) {
        int halvings = 0;
        while (relative_difference(formula, diff) > options.agreement_tolerance) {
          if (halvings++ >= options.max_halvings)
            throw PerturbativeRegimeError(
                "first-order state update and propagation differencing disagree by " +
                std::to_string(relative_difference(formula, diff)) + " at amplitude " +
                std::to_string(amplitude));
          amplitude *= 0.5;
          diff = state_update_by_differencing(problem, base, samples, amplitude);
        }
      }
      if (options.method == UpdateMethod::differencing) result = diff;
    }
    set.pulse_updates.push_back(std::move(samples));
    set.state_updates.push_back(std::move(result));
  }
  return set;
}

TangentUpdateSet gram_schmidt(const TangentUpdateSet& updates) {
  TangentUpdateSet out = updates;
  const std::size_t count = updates.size();
  for (std::size_t n = 0; n < count; ++n) {
    CVector& v = out.state_updates[n];
    const double original = v.norm();
    if (original == 0.0) throw LinearDependenceError(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double overlap = real_inner(out.state_updates[k], v);
      v -= overlap * out.state_updates[k];
      out.combination.row(static_cast<Eigen::Index>(n)) -=
          overlap * out.combination.row(static_cast<Eigen::Index>(k));
      auto& pulse = out.pulse_updates[n];
      const auto& prev = out.pulse_updates[k];
      for (std::size_t s = 0; s < pulse.size(); ++s) pulse[s] -= overlap * prev[s];
    }
    const double residual = v.norm();
    if (residual < 1e-12 * original) throw LinearDependenceError(n, residual / original);
    v /= residual;
    out.combination.row(static_cast<Eigen::Index>(n)) /= residual;
    for (double& s : out.pulse_updates[n]) s /= residual;
  }
  return out;
}

Eigen::MatrixXd real_gram_matrix(std::span<const CVector> vectors) {
  const auto k = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXd g(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      g(i, j) = real_inner(vectors[static_cast<std::size_t>(i)], vectors[static_cast<std::size_t>(j)]);
  return g;
}

std::size_t tangent_rank(const TangentUpdateSet& updates) {
  if (updates.size() == 0) return 0;
  const Eigen::Index m = updates.final_state.size();
  Eigen::MatrixXd embedded(2 * m, static_cast<Eigen::Index>(updates.size()));
  for (std::size_t n = 0; n < updates.size(); ++n) {
    const auto col = static_cast<Eigen::Index>(n);
    embedded.col(col).head(m) = updates.state_updates[n].real();
    embedded.col(col).tail(m) = updates.state_updates[n].imag();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(embedded);
  const auto& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma[0] == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] > 1e-8 * sigma[0]) ++rank;
  return rank;
}

double captured_fraction(const TangentUpdateSet& orthonormal, const CVector& v) {
  const double total = v.squaredNorm();
  if (total == 0.0) return 1.0;
  double captured = 0.0;
  for (const auto& e : orthonormal.state_updates) {
    const double c = real_inner(e, v);
    captured += c * c;
  }
  return captured / total;
}

EscapeCertificate certify_trap_escape(const SpinProblem& problem, const DressedPulse& pulse,
                                      const TimeGrid& grid, double omega_max, std::size_t draws,
                                      Rng& rng, double floor) {
  const SampledFunction kernel = gradient_kernel(problem, pulse, grid);
  EscapeCertificate cert;
  cert.draws = draws;
  cert.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < draws; ++d) {
    const BasisFunction sine = sample_basis(1, omega_max, rng).front();
    const SampledFunction df = sample_function(grid, [&sine](double t) { return sine(t); });
    const double ratio = std::abs(directional_derivative(kernel, df)) / l2_norm(df);
    if (ratio > floor) ++cert.escaping;
    cert.min_ratio = std::min(cert.min_ratio, ratio);
    cert.max_ratio = std::max(cert.max_ratio, ratio);
  }
  if (draws == 0) cert.min_ratio = 0.0;
  return cert;
}

double z_expectation(const QuantumState& state, std::size_t qubit) {
  const std::size_t n = static_cast<std::size_t>(std::countr_zero(state.dimension()));
  if (qubit >= n) throw std::out_of_range("qubit index out of range");
  const std::size_t mask = std::size_t{1} << (n - 1 - qubit);
  double z = 0.0;
  for (std::size_t i = 0; i < state.dimension(); ++i)
    z += (i & mask ? -1.0 : 1.0) * std::norm(state[i]);
  return z;
}

ReachabilityBound reachability_bound(const SpinProblem& problem) {
  ReachabilityBound bound;
  for (std::size_t q = 0; q < problem.n_qubits; ++q) {
    const double z0 = std::clamp(z_expectation(problem.initial, q), -1.0, 1.0);
    const double angle = std::acos(z0);
    const double reach = 2.0 * std::abs(problem.alphas[q]) * problem.total_time;
    const double lo = std::cos(std::min(std::numbers::pi, angle + reach));
    const double hi = std::cos(std::max(0.0, angle - reach));
    const double zt = z_expectation(problem.target, q);
    const double gap = zt < lo ? lo - zt : (zt > hi ? zt - hi : 0.0);
    if (gap * gap / 4.0 > bound.infidelity) bound = {gap * gap / 4.0, q};
  }
  return bound;
}

}  // namespace dcrab
