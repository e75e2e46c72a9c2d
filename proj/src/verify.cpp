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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "dcrab/harness.hpp"
#include "dcrab/landscape.hpp"

namespace dcrab {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Setting {
  std::size_t n_qubits;
  double total_time;
  double omega_max;
  TimeGrid grid;
};

Setting setting_for(std::size_t n_qubits) {
  const double T = default_total_time(n_qubits);
  const double w = default_bandwidth_cycles(n_qubits) * 2.0 * std::numbers::pi / T;
  return {n_qubits, T, w, TimeGrid::for_bandwidth(T, w)};
}

DressedPulse random_pulse(std::size_t n_terms, double omega_max, Rng& rng) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<double> c(n_terms);
  for (double& x : c) x = coeff(rng);
  return DressedPulse(0.0, std::nullopt)
      .dress(sample_basis(n_terms, omega_max, rng))
      .with_last_coefficients(c);
}

double fidelity_of(const SpinProblem& problem, std::span<const double> samples) {
  return fidelity(propagate(problem, samples), problem.target);
}

PropertyResult kernel_check(const VerificationOptions& options) {
  const Setting s = setting_for(2);
  double worst = 0.0, smallest = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < options.kernel_triples; ++t) {
    Rng rng = make_rng(child_seed(options.seed, 100 + t));
    const SpinProblem problem = generate_instance(2, s.total_time, rng());
    const DressedPulse pulse = random_pulse(4, s.omega_max, rng);
    const BasisFunction dir = sample_basis(1, s.omega_max, rng).front();
    const SampledFunction kernel = gradient_kernel(problem, pulse, s.grid);
    const SampledFunction df = sample_function(s.grid, [&dir](double x) { return dir(x); });
    const double analytic = directional_derivative(kernel, df);

    constexpr double eps = 1e-5;
    auto base = pulse.sample(s.grid);
    auto plus = base, minus = base;
    for (std::size_t k = 0; k < base.size(); ++k) {
      plus[k] += eps * df.values[k];
      minus[k] -= eps * df.values[k];
    }
    const double fd = (fidelity_of(problem, plus) - fidelity_of(problem, minus)) / (2.0 * eps);
    worst = std::max(worst, std::abs(analytic - fd) / std::abs(fd));
    smallest = std::min(smallest, std::abs(fd));
  }
  return {"kernel-finite-difference",
          worst <= 1e-3,
          {{"triples", std::to_string(options.kernel_triples)},
           {"max_relative_error", num(worst)},
           {"tolerance", "1e-3"},
           {"min_abs_derivative", num(smallest)}}};
}

PropertyResult agreement_check(const VerificationOptions& options) {
  const Setting s = setting_for(2);
  double worst_orth = 0.0;
  std::size_t failures = 0;
  std::string message;
  const std::size_t cases = 10;
  for (std::size_t t = 0; t < cases; ++t) {
    Rng rng = make_rng(child_seed(options.seed, 200 + t));
    const SpinProblem problem = generate_instance(2, s.total_time, rng());
    const DressedPulse pulse = random_pulse(4, s.omega_max, rng);
    const auto dirs = sample_basis(3, s.omega_max, rng);
    try {
      const auto set = state_updates(problem, pulse, s.grid, dirs);
      for (const auto& u : set.state_updates)
        worst_orth = std::max(worst_orth, std::abs(real_inner(set.final_state, u)));
    } catch (const PerturbativeRegimeError& e) {
      ++failures;
      message = e.what();
    }
  }
  PropertyResult r{"state-update-agreement",
                   failures == 0 && worst_orth <= 1e-8,
                   {{"cases", std::to_string(cases)},
                    {"agreement_failures", std::to_string(failures)},
                    {"max_abs_re_overlap_with_final_state", num(worst_orth)}}};
  if (!message.empty()) r.measured.push_back({"last_error", message});
  return r;
}

PropertyResult rank_check(const VerificationOptions& options, std::size_t n_qubits) {
  const Setting s = setting_for(n_qubits);
  const std::size_t m = std::size_t{1} << n_qubits;
  const std::size_t k = 2 * m - 1;
  std::size_t full = 0, over_ok = 0, phase_ok = 0;
  const std::size_t over_cases = std::min<std::size_t>(options.rank_repetitions, 10);
  StateUpdateOptions fast;
  fast.cross_check = false;
  for (std::size_t t = 0; t < options.rank_repetitions; ++t) {
    Rng rng = make_rng(child_seed(options.seed, 1000 * n_qubits + t));
    SpinProblem problem = generate_instance(n_qubits, s.total_time, rng());
    const DressedPulse pulse = random_pulse(4, s.omega_max, rng);
    const auto dirs = sample_basis(k + 4, s.omega_max, rng);
    const auto set = state_updates(problem, pulse, s.grid, std::span(dirs).first(k), fast);
    const std::size_t rank = tangent_rank(set);
    if (rank == k) ++full;
    if (t < over_cases) {
      if (tangent_rank(state_updates(problem, pulse, s.grid, dirs, fast)) <= k) ++over_ok;
      problem.initial = problem.initial.with_global_phase(0.7 + 0.1 * static_cast<double>(t));
      if (tangent_rank(state_updates(problem, pulse, s.grid, std::span(dirs).first(k), fast)) == rank)
        ++phase_ok;
    }
  }
  const double fraction = static_cast<double>(full) / static_cast<double>(options.rank_repetitions);
  return {"tangent-rank M=" + std::to_string(m),
          fraction >= 0.99 && over_ok == over_cases && phase_ok == over_cases,
          {{"updates", std::to_string(k)},
           {"repetitions", std::to_string(options.rank_repetitions)},
           {"full_rank", std::to_string(full)},
           {"overcomplete_within_bound", std::to_string(over_ok) + "/" + std::to_string(over_cases)},
           {"phase_invariant", std::to_string(phase_ok) + "/" + std::to_string(over_cases)}}};
}

PropertyResult gram_schmidt_check(const VerificationOptions& options) {
  const Setting s = setting_for(2);
  double worst = 0.0, worst_capture = 0.0;
  const std::size_t cases = 20;
  StateUpdateOptions fast;
  fast.cross_check = false;
  for (std::size_t t = 0; t < cases; ++t) {
    Rng rng = make_rng(child_seed(options.seed, 300 + t));
    const SpinProblem problem = generate_instance(2, s.total_time, rng());
    const DressedPulse pulse = random_pulse(4, s.omega_max, rng);
    const auto dirs = sample_basis(7, s.omega_max, rng);
    const auto ortho = gram_schmidt(state_updates(problem, pulse, s.grid, dirs, fast));

    const auto base = pulse.sample(s.grid);
    const auto traj = compute_adjoint_trajectory(
        problem, base, CVector::Zero(static_cast<Eigen::Index>(problem.dimension())));
    std::vector<CVector> repropagated;
    for (const auto& du : ortho.pulse_updates) repropagated.push_back(state_update(problem, traj, du));
    const Eigen::MatrixXd g = real_gram_matrix(repropagated);
    worst = std::max(worst, (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff());

    const CVector seed = fidelity_gradient_seed(traj.final_state(), problem.target);
    const SampledFunction k = gradient_kernel(problem, base, seed);
    const CVector along = state_update(problem, traj, k.values);
    worst_capture = std::max(worst_capture, 1.0 - captured_fraction(ortho, along));
  }
  return {"gram-schmidt",
          worst <= 1e-8 && worst_capture <= 1e-6,
          {{"cases", std::to_string(cases)},
           {"max_abs_gram_minus_identity", num(worst)},
           {"max_uncaptured_gradient_fraction", num(worst_capture)}}};
}

PropertyResult escape_check(const VerificationOptions& options) {
  const Setting s = setting_for(2);
  CrabConfig crab;
  crab.n_coefficients = 2;
  crab.omega_max = s.omega_max;
  crab.n_super_iterations = 1;
  crab.max_total_evaluations = 2000;
  std::size_t found = 0, draws = 0, escaping = 0, weakest = options.escape_draws;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; found < options.trap_points && t < 20 * options.trap_points + 50; ++t) {
    const SpinProblem problem = generate_instance(2, s.total_time, child_seed(options.seed, 5000 + t));
    Rng rng = make_rng(child_seed(options.seed, 9000 + t));
    const auto record = run_crab(problem, crab, rng);
    if (record.success || record.last_status != SimplexStatus::converged) continue;
    ++found;
    const auto cert = certify_trap_escape(problem, record.pulse, s.grid, s.omega_max,
                                          options.escape_draws, rng);
    draws += cert.draws;
    escaping += cert.escaping;
    weakest = std::min(weakest, cert.escaping);
    min_ratio = std::min(min_ratio, cert.min_ratio);
  }
  const bool enough = found >= options.trap_points;
  return {"trap-escape",
          enough && weakest * 100 >= 99 * options.escape_draws,
          {{"fixed_points", std::to_string(found)},
           {"draws", std::to_string(draws)},
           {"escaping", std::to_string(escaping)},
           {"worst_point_escaping", std::to_string(weakest) + "/" + std::to_string(options.escape_draws)},
           {"min_ratio", num(min_ratio)},
           {"floor", "1e-8"}}};
}

}  // namespace

bool VerificationReport::passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.passed; });
}

VerificationReport verify_landscape(const VerificationOptions& options) {
  VerificationReport report;
  report.properties.push_back(kernel_check(options));
  report.properties.push_back(agreement_check(options));
  report.properties.push_back(rank_check(options, 2));
  report.properties.push_back(rank_check(options, 3));
  report.properties.push_back(gram_schmidt_check(options));
  report.properties.push_back(escape_check(options));
  return report;
}

void write_report(std::ostream& out, const VerificationReport& report) {
  for (const auto& p : report.properties) {
    out << '[' << p.name << "] " << (p.passed ? "PASS" : "FAIL") << '\n';
    for (const auto& [key, value] : p.measured) out << "  " << key << " = " << value << '\n';
  }
  out << "overall " << (report.passed() ? "PASS" : "FAIL") << '\n';
}

}  // namespace dcrab
