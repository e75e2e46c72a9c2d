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

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dcrab/pulse.hpp"
#include "dcrab/quantum.hpp"
#include "dcrab/random.hpp"

namespace dcrab {

/// Real function sampled at the midpoints of a propagation grid.
struct SampledFunction {
  TimeGrid grid;
  std::vector<double> values;
};

SampledFunction sample_function(const TimeGrid& grid, const std::function<double(double)>& f);

/// Forward states, backward (adjoint) states and per-step spectra of one
/// propagation. forward[k] and adjoint[k] live at the grid boundary t = k dt,
/// k = 0..n_steps; adjoint[n_steps] is the seed.
struct AdjointTrajectory {
  TimeGrid grid;
  std::vector<double> pulse;
  std::vector<CellSpectrum> cells;
  std::vector<CVector> forward;
  std::vector<CVector> adjoint;
  CVector seed;

  const CVector& final_state() const { return forward.back(); }
};

AdjointTrajectory compute_adjoint_trajectory(const SpinProblem& problem,
                                             std::span<const double> pulse, const CVector& seed);

/// Vector g with Re<g|dpsi> = dF for F = |<target|final>|^2, i.e.
/// 2 <target|final> |target>.
CVector fidelity_gradient_seed(const CVector& final_state, const QuantumState& target);

/// d/df exp(-i (H0 + f H1) dt) applied to `v`, evaluated exactly in the
/// eigenbasis of the step Hamiltonian.
CVector step_derivative(const CellSpectrum& cell, const CMatrix& control, double dt,
                        const CVector& v);

/// Functional derivative of J(f) = Re<seed|psi(T)> per unit time, averaged over
/// every step: k_k = Re<chi_k| dU_k/df |psi_{k-1}> / dt. In the continuum limit
/// this is Im<chi(t)|H1|psi(t)>, and sum_k k_k df_k dt is the exact first
/// variation of the discretized landscape.
SampledFunction gradient_kernel(const SpinProblem& problem, const AdjointTrajectory& trajectory);

/// Kernel of the fidelity landscape for `pulse` on `grid`.
SampledFunction gradient_kernel(const SpinProblem& problem, const DressedPulse& pulse,
                                const TimeGrid& grid);

/// Kernel for an arbitrary seed vector (the l(t) of a projection onto `seed`).
SampledFunction gradient_kernel(const SpinProblem& problem, std::span<const double> pulse,
                                const CVector& seed);

/// Midpoint quadrature of kernel * perturbation over [0, T]. Throws
/// std::invalid_argument when the two grids differ.
double directional_derivative(const SampledFunction& kernel, const SampledFunction& perturbation);

/// L2 norm sqrt(int f^2 dt) on the grid.
double l2_norm(const SampledFunction& f);

/// Raised when Gram-Schmidt meets an update already spanned by its
/// predecessors.
class LinearDependenceError : public std::runtime_error {
 public:
  LinearDependenceError(std::size_t index, double relative_pivot);
  std::size_t index() const noexcept { return index_; }
  double relative_pivot() const noexcept { return pivot_; }

 private:
  std::size_t index_;
  double pivot_;
};

/// Raised when the first-order formula and propagation differencing disagree
/// even after the perturbation amplitude was halved the allowed number of times.
class PerturbativeRegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pulse updates and the first-order final-state updates they generate, all
/// per unit amplitude. Pulse update n is sum_m combination(n, m) * directions[m].
struct TangentUpdateSet {
  TimeGrid grid;
  std::vector<double> base_pulse;
  CVector final_state;
  std::vector<BasisFunction> directions;
  Eigen::MatrixXd combination;
  std::vector<std::vector<double>> pulse_updates;
  std::vector<CVector> state_updates;

  std::size_t size() const noexcept { return state_updates.size(); }
};

enum class UpdateMethod { formula, differencing };

struct StateUpdateOptions {
  UpdateMethod method = UpdateMethod::formula;
  /// Amplitude dc of the differencing perturbation.
  double amplitude = 1e-5;
  /// Cross-check formula against differencing (relative vector difference).
  bool cross_check = true;
  double agreement_tolerance = 1e-6;
  int max_halvings = 4;
};

/// First-order state update generated by one sampled pulse update:
/// -i U(T) int U^dagger(t) H1 U(t) |xi> df(t) dt, exact for the discretized
/// dynamics.
CVector state_update(const SpinProblem& problem, const AdjointTrajectory& trajectory,
                     std::span<const double> pulse_update);

/// Central propagation difference (psi[f + a df] - psi[f - a df]) / (2 a).
CVector state_update_by_differencing(const SpinProblem& problem,
                                     std::span<const double> base_pulse,
                                     std::span<const double> pulse_update, double amplitude);

/// State updates for the unit-amplitude directions sin(w_n t + phi_n) around
/// `pulse`. Throws PerturbativeRegimeError if the cross-check fails.
TangentUpdateSet state_updates(const SpinProblem& problem, const DressedPulse& pulse,
                               const TimeGrid& grid, std::span<const BasisFunction> directions,
                               const StateUpdateOptions& options = {});

/// Orthonormalizes the state updates under Re<.|.> (modified Gram-Schmidt) and
/// recombines the pulse updates so update n still generates state update n.
/// Throws LinearDependenceError when a residual falls below 1e-12 of the
/// update's own norm.
TangentUpdateSet gram_schmidt(const TangentUpdateSet& updates);

/// Rank of the 2M x K real embedding of the state updates; singular values
/// below 1e-8 of the largest count as zero.
std::size_t tangent_rank(const TangentUpdateSet& updates);

/// Gram matrix G(i, j) = Re<u_i|u_j> of the state updates.
Eigen::MatrixXd real_gram_matrix(std::span<const CVector> vectors);

/// Fraction of |v|^2 captured by the span of an orthonormal update set.
double captured_fraction(const TangentUpdateSet& orthonormal, const CVector& v);

/// Directional derivatives of F along freshly drawn unit sines at a candidate
/// trap. A draw counts as escaping when |dF| exceeds `floor` times the L2 norm
/// of the sine.
struct EscapeCertificate {
  std::size_t draws = 0;
  std::size_t escaping = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

EscapeCertificate certify_trap_escape(const SpinProblem& problem, const DressedPulse& pulse,
                                      const TimeGrid& grid, double omega_max, std::size_t draws,
                                      Rng& rng, double floor = 1e-8);

/// <Z_q> of qubit q (0 is the leftmost factor).
double z_expectation(const QuantumState& state, std::size_t qubit);

/// Control-independent lower bound on 1 - F. The control and the Z fields
/// commute with Z_q, so d<Z_q>/dt = 2 alpha_q <Y_q> and the polar angle of
/// qubit q's Bloch vector moves by at most 2 alpha_q T. A target <Z_q> outside
/// the reachable interval by d forces 1 - F >= d^2 / 4. Zero when no qubit is
/// limited this way.
struct ReachabilityBound {
  double infidelity = 0.0;
  /// Qubit attaining the bound, if any.
  std::optional<std::size_t> qubit;
};

ReachabilityBound reachability_bound(const SpinProblem& problem);

}  // namespace dcrab
