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

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dcrab/random.hpp"

namespace dcrab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Normalized pure state of a register of qubits (dimension 2^N, N >= 1).
class QuantumState {
 public:
  /// Normalizes `amplitudes`. Throws std::invalid_argument when the dimension
  /// is not a power of two >= 2 or the vector is zero / non-finite.
  explicit QuantumState(CVector amplitudes);

  /// Computational basis state |index>.
  static QuantumState basis(std::size_t dimension, std::size_t index);

  const CVector& amplitudes() const noexcept { return amplitudes_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  Complex operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

  /// Multiplies every amplitude by exp(i*phase).
  QuantumState with_global_phase(double phase) const;

  bool operator==(const QuantumState& other) const { return amplitudes_ == other.amplitudes_; }

 private:
  CVector amplitudes_;
};

/// Square complex matrix that is exactly conjugate-symmetric.
class HermitianOperator {
 public:
  /// Throws std::invalid_argument if `entries` is not square or if any pair
  /// (i,j), (j,i) fails bitwise conjugate symmetry.
  explicit HermitianOperator(CMatrix entries);

  static HermitianOperator zero(std::size_t dimension);

  const CMatrix& matrix() const noexcept { return entries_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  /// True when every imaginary part is exactly zero (real symmetric operator).
  bool is_real() const noexcept { return real_; }

 private:
  CMatrix entries_;
  bool real_ = false;
};

struct HamiltonianPair {
  HermitianOperator drift;
  HermitianOperator control;
};

/// Drift = sum_i alpha_i X_i + beta_i Z_i, control = sum_i Z_i Z_{i+1}.
/// Qubit 1 is the leftmost tensor factor (most significant basis-index bit).
HamiltonianPair build_hamiltonians(std::size_t n_qubits, std::span<const double> alphas,
                                   std::span<const double> betas);

/// Drift/control pair, boundary states and duration of one transfer problem.
struct SpinProblem {
  std::size_t n_qubits = 0;
  std::vector<double> alphas;
  std::vector<double> betas;
  HermitianOperator drift;
  HermitianOperator control;
  QuantumState initial;
  QuantumState target;
  double total_time = 0.0;

  std::size_t dimension() const noexcept { return drift.dimension(); }
};

/// Assembles a SpinProblem from the random-field coefficients; validates
/// dimensions and T > 0.
SpinProblem make_spin_problem(std::span<const double> alphas, std::span<const double> betas,
                              QuantumState initial, QuantumState target, double total_time);

/// Uniform grid of `n_steps` intervals on [0, T]; the control is sampled at
/// interval midpoints.
class TimeGrid {
 public:
  TimeGrid(double total_time, std::size_t n_steps);

  /// Steps such that dt <= 2*pi / (20 * omega_max), never fewer than 512.
  static TimeGrid for_bandwidth(double total_time, double omega_max);

  double total_time() const noexcept { return total_time_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  double dt() const noexcept { return total_time_ / static_cast<double>(n_steps_); }
  double midpoint(std::size_t k) const noexcept { return (static_cast<double>(k) + 0.5) * dt(); }
  std::vector<double> midpoints() const;

  bool operator==(const TimeGrid&) const = default;

 private:
  double total_time_;
  std::size_t n_steps_;
};

inline constexpr std::size_t kMinimumSteps = 512;

/// Eigendecomposition of one piecewise-constant Hamiltonian H0 + f H1.
struct CellSpectrum {
  Eigen::VectorXd energies;
  CMatrix vectors;  // columns are eigenvectors

  /// exp(-i H tau) v
  CVector evolve(const CVector& v, double tau) const;
};

/// Applies exp(-i (H0 + f H1) dt) step by step through an eigendecomposition of
/// each piecewise-constant Hamiltonian. Real symmetric Hamiltonians use cyclic
/// Jacobi sweeps warm-started from the previous step's eigenvectors; complex
/// ones use a dense Hermitian solver. Holds workspace, so one instance must not
/// be shared between threads.
class Propagator {
 public:
  Propagator(const HermitianOperator& drift, const HermitianOperator& control);

  /// Forgets the warm start; the next step diagonalizes from scratch.
  void reset();

  /// psi <- exp(-i (H0 + f H1) tau) psi
  void step(double f, double tau, CVector& psi);

  CellSpectrum diagonalize(double f);

  std::size_t dimension() const noexcept { return dim_; }

 private:
  void diagonalize_real(double f);

  std::size_t dim_;
  bool real_;
  bool warm_ = false;
  Eigen::MatrixXd drift_real_, control_real_, work_real_, vectors_real_, rotated_;
  Eigen::VectorXd energies_real_;
  CMatrix drift_, control_, work_;
  Eigen::SelfAdjointEigenSolver<CMatrix> complex_solver_;
  CVector scratch_;
};

/// psi(T) for the pulse sampled at the midpoints of `pulse.size()` uniform
/// intervals on [0, problem.total_time]. Throws on empty or non-finite pulse.
QuantumState propagate(const SpinProblem& problem, std::span<const double> pulse);

/// Same as above but reuses a caller-owned propagator (hot path).
QuantumState propagate(const SpinProblem& problem, std::span<const double> pulse,
                       Propagator& propagator);

/// |<target|final>|^2. Throws on dimension mismatch.
double fidelity(const QuantumState& final_state, const QuantumState& target);

/// Haar-random pure state: i.i.d. standard-normal real and imaginary parts,
/// normalized.
QuantumState random_state(std::size_t dimension, Rng& rng);

/// Real inner product Re<a|b>.
inline double real_inner(const CVector& a, const CVector& b) { return a.dot(b).real(); }

}  // namespace dcrab
