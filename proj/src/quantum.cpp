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

#include "dcrab/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dcrab {

namespace {

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

CMatrix pauli_x() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Operator acting as `single` on qubit `site` (0-based, leftmost factor first).
CMatrix embed(const CMatrix& single, std::size_t site, std::size_t n_qubits) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (std::size_t q = 0; q < n_qubits; ++q)
    out = kron(out, q == site ? single : CMatrix::Identity(2, 2));
  return out;
}

}  // namespace

QuantumState::QuantumState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  const auto dim = static_cast<std::size_t>(amplitudes_.size());
  if (!is_power_of_two(dim))
    throw std::invalid_argument("state dimension must be a power of two >= 2, got " +
                                std::to_string(dim));
  if (!amplitudes_.allFinite()) throw std::invalid_argument("state has non-finite amplitudes");
  const double norm = amplitudes_.norm();
  if (norm == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  amplitudes_ /= norm;
}

QuantumState QuantumState::basis(std::size_t dimension, std::size_t index) {
  if (index >= dimension) throw std::invalid_argument("basis index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dimension));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return QuantumState(std::move(v));
}

QuantumState QuantumState::with_global_phase(double phase) const {
  return QuantumState(amplitudes_ * std::polar(1.0, phase));
}

HermitianOperator::HermitianOperator(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
    throw std::invalid_argument("operator must be a non-empty square matrix");
  real_ = true;
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = i; j < entries_.cols(); ++j) {
      if (entries_(i, j) != std::conj(entries_(j, i)))
        throw std::invalid_argument("operator is not Hermitian at (" + std::to_string(i) + "," +
                                    std::to_string(j) + ")");
      if (entries_(i, j).imag() != 0.0) real_ = false;
    }
  }
}

HermitianOperator HermitianOperator::zero(std::size_t dimension) {
  const auto n = static_cast<Eigen::Index>(dimension);
  return HermitianOperator(CMatrix::Zero(n, n));
}

HamiltonianPair build_hamiltonians(std::size_t n_qubits, std::span<const double> alphas,
                                   std::span<const double> betas) {
  if (n_qubits < 1) throw std::invalid_argument("need at least one qubit");
  if (alphas.size() != n_qubits || betas.size() != n_qubits)
    throw std::invalid_argument("expected " + std::to_string(n_qubits) +
                                " alphas and betas, got " + std::to_string(alphas.size()) +
                                " and " + std::to_string(betas.size()));
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  const CMatrix x = pauli_x();
  const CMatrix z = pauli_z();

  CMatrix drift = CMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < n_qubits; ++i)
    drift += alphas[i] * embed(x, i, n_qubits) + betas[i] * embed(z, i, n_qubits);

  CMatrix control = CMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i + 1 < n_qubits; ++i)
    control += embed(z, i, n_qubits) * embed(z, i + 1, n_qubits);

  return {HermitianOperator(std::move(drift)), HermitianOperator(std::move(control))};
}

SpinProblem make_spin_problem(std::span<const double> alphas, std::span<const double> betas,
                              QuantumState initial, QuantumState target, double total_time) {
  if (!(total_time > 0.0) || !std::isfinite(total_time))
    throw std::invalid_argument("total time must be positive and finite");
  const std::size_t n = alphas.size();
  auto [drift, control] = build_hamiltonians(n, alphas, betas);
  if (initial.dimension() != drift.dimension() || target.dimension() != drift.dimension())
    throw std::invalid_argument("boundary states do not match the Hilbert-space dimension");
  return SpinProblem{n,
                     {alphas.begin(), alphas.end()},
                     {betas.begin(), betas.end()},
                     std::move(drift),
                     std::move(control),
                     std::move(initial),
                     std::move(target),
                     total_time};
}

TimeGrid::TimeGrid(double total_time, std::size_t n_steps)
    : total_time_(total_time), n_steps_(n_steps) {
  if (!(total_time > 0.0) || !std::isfinite(total_time))
    throw std::invalid_argument("grid duration must be positive and finite");
  if (n_steps == 0) throw std::invalid_argument("grid needs at least one step");
}

TimeGrid TimeGrid::for_bandwidth(double total_time, double omega_max) {
  if (!(omega_max > 0.0)) throw std::invalid_argument("omega_max must be positive");
  const double max_dt = 2.0 * std::numbers::pi / (20.0 * omega_max);
  const auto needed = static_cast<std::size_t>(std::ceil(total_time / max_dt));
  return TimeGrid(total_time, std::max(kMinimumSteps, needed));
}

std::vector<double> TimeGrid::midpoints() const {
  std::vector<double> t(n_steps_);
  for (std::size_t k = 0; k < n_steps_; ++k) t[k] = midpoint(k);
  return t;
}

CVector CellSpectrum::evolve(const CVector& v, double tau) const {
  CVector coeffs = vectors.adjoint() * v;
  for (Eigen::Index a = 0; a < coeffs.size(); ++a) coeffs[a] *= std::polar(1.0, -energies[a] * tau);
  return vectors * coeffs;
}

Propagator::Propagator(const HermitianOperator& drift, const HermitianOperator& control)
    : dim_(drift.dimension()), real_(drift.is_real() && control.is_real()) {
  if (control.dimension() != dim_)
    throw std::invalid_argument("drift and control dimensions differ");
  const auto n = static_cast<Eigen::Index>(dim_);
  if (real_) {
    drift_real_ = drift.matrix().real();
    control_real_ = control.matrix().real();
    work_real_.resize(n, n);
    rotated_.resize(n, n);
    vectors_real_ = Eigen::MatrixXd::Identity(n, n);
    energies_real_.resize(n);
  } else {
    drift_ = drift.matrix();
    control_ = control.matrix();
    work_.resize(n, n);
    complex_solver_ = Eigen::SelfAdjointEigenSolver<CMatrix>(n);
  }
  scratch_.resize(n);
}

void Propagator::reset() { warm_ = false; }

// Cyclic Jacobi on V^T H V, where V holds the eigenvectors of the previous
// step. Consecutive Hamiltonians differ by a small change of f, so the rotated
// matrix is nearly diagonal and about three sweeps reach machine precision.
// V is re-orthonormalized afterwards so rounding cannot accumulate over steps.
void Propagator::diagonalize_real(double f) {
  const auto n = static_cast<Eigen::Index>(dim_);
  work_real_ = drift_real_ + f * control_real_;
  if (!warm_) vectors_real_.setIdentity();
  warm_ = true;
  rotated_.noalias() = work_real_ * vectors_real_;
  work_real_.noalias() = vectors_real_.transpose() * rotated_;

  // Column-major raw access; the matrices are tiny and this loop is hot.
  double* a = work_real_.data();
  double* v = vectors_real_.data();
  auto at = [n](double* m, Eigen::Index row, Eigen::Index col) -> double& { return m[col * n + row]; };

  double scale = 0.0;
  for (Eigen::Index i = 0; i < n * n; ++i) scale += a[i] * a[i];
  constexpr int kMaxSweeps = 50;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index q = 1; q < n; ++q)
      for (Eigen::Index p = 0; p < q; ++p) off += at(a, p, q) * at(a, p, q);
    if (off <= 1e-30 * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = at(a, p, q);
        if (apq == 0.0) continue;
        const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        double* col_p = &at(a, 0, p);
        double* col_q = &at(a, 0, q);
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = col_p[k];
          const double y = col_q[k];
          col_p[k] = c * x - s * y;
          col_q[k] = s * x + c * y;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = at(a, p, k);
          const double y = at(a, q, k);
          at(a, p, k) = c * x - s * y;
          at(a, q, k) = s * x + c * y;
        }
        at(a, p, q) = 0.0;
        at(a, q, p) = 0.0;
        double* vp = &at(v, 0, p);
        double* vq = &at(v, 0, q);
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = vp[k];
          const double y = vq[k];
          vp[k] = c * x - s * y;
          vq[k] = s * x + c * y;
        }
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) energies_real_[i] = at(a, i, i);

  // Modified Gram-Schmidt on the columns of V.
  for (Eigen::Index j = 0; j < n; ++j) {
    double* vj = &at(v, 0, j);
    for (Eigen::Index i = 0; i < j; ++i) {
      const double* vi = &at(v, 0, i);
      double d = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) d += vi[k] * vj[k];
      for (Eigen::Index k = 0; k < n; ++k) vj[k] -= d * vi[k];
    }
    double norm = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) norm += vj[k] * vj[k];
    norm = std::sqrt(norm);
    for (Eigen::Index k = 0; k < n; ++k) vj[k] /= norm;
  }
}

void Propagator::step(double f, double tau, CVector& psi) {
  if (real_) {
    diagonalize_real(f);
    scratch_.noalias() = vectors_real_.transpose() * psi;
    for (Eigen::Index a = 0; a < scratch_.size(); ++a)
      scratch_[a] *= std::polar(1.0, -energies_real_[a] * tau);
    psi.noalias() = vectors_real_ * scratch_;
  } else {
    work_ = drift_ + f * control_;
    complex_solver_.compute(work_);
    const auto& vectors = complex_solver_.eigenvectors();
    const auto& energies = complex_solver_.eigenvalues();
    scratch_.noalias() = vectors.adjoint() * psi;
    for (Eigen::Index a = 0; a < scratch_.size(); ++a)
      scratch_[a] *= std::polar(1.0, -energies[a] * tau);
    psi.noalias() = vectors * scratch_;
  }
}

CellSpectrum Propagator::diagonalize(double f) {
  if (real_) {
    diagonalize_real(f);
    return {energies_real_, vectors_real_.cast<Complex>()};
  }
  work_ = drift_ + f * control_;
  complex_solver_.compute(work_);
  return {complex_solver_.eigenvalues(), complex_solver_.eigenvectors()};
}

QuantumState propagate(const SpinProblem& problem, std::span<const double> pulse) {
  Propagator propagator(problem.drift, problem.control);
  return propagate(problem, pulse, propagator);
}

QuantumState propagate(const SpinProblem& problem, std::span<const double> pulse,
                       Propagator& propagator) {
  if (pulse.empty()) throw std::invalid_argument("pulse must have at least one sample");
  if (propagator.dimension() != problem.dimension())
    throw std::invalid_argument("propagator does not match the problem dimension");
  const double dt = problem.total_time / static_cast<double>(pulse.size());
  propagator.reset();
  CVector psi = problem.initial.amplitudes();
  for (const double f : pulse) {
    if (!std::isfinite(f)) throw std::invalid_argument("pulse contains a non-finite sample");
    propagator.step(f, dt, psi);
  }
  return QuantumState(std::move(psi));
}

double fidelity(const QuantumState& final_state, const QuantumState& target) {
  if (final_state.dimension() != target.dimension())
    throw std::invalid_argument("fidelity of states with different dimensions");
  return std::norm(target.amplitudes().dot(final_state.amplitudes()));
}

QuantumState random_state(std::size_t dimension, Rng& rng) {
  if (!is_power_of_two(dimension))
    throw std::invalid_argument("random_state dimension must be a power of two >= 2");
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(static_cast<Eigen::Index>(dimension));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v[i] = Complex(re, im);
  }
  return QuantumState(std::move(v));
}

}  // namespace dcrab
