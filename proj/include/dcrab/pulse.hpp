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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcrab/quantum.hpp"
#include "dcrab/random.hpp"

namespace dcrab {

/// One randomized basis function sin(frequency * t + phase).
struct BasisFunction {
  double frequency = 0.0;  // rad / time, in (0, omega_max]
  double phase = 0.0;      // [0, 2 pi)

  double operator()(double t) const noexcept;
  bool operator==(const BasisFunction&) const = default;
};

/// Basis functions of one dressing step together with their coefficients.
struct SuperIteration {
  std::vector<BasisFunction> basis;
  std::vector<double> coefficients;

  /// Sum_i c_i sin(w_i t + phi_i).
  double evaluate(double t) const noexcept;
  bool operator==(const SuperIteration&) const = default;
};

/// Hard-wall clip: value if |value| < f_max, otherwise sign(value) * f_max.
double clip(double value, double f_max);

/// Guess pulse dressed by successive randomized bases.
///
/// Without a height bound the pulse is guess + sum over all iterations. With a
/// bound the wall is applied after every dressing step,
///   f^j(t) = clip(f^{j-1}(t) + sum_i c_i^j sin(w_i^j t + phi_i^j)),
/// with f^0 = clip(guess), so the value is always inside [-f_max, f_max].
class DressedPulse {
 public:
  DressedPulse() = default;
  explicit DressedPulse(double guess, std::optional<double> height_bound = std::nullopt);
  DressedPulse(double guess, std::vector<SuperIteration> iterations,
               std::optional<double> height_bound);

  double guess() const noexcept { return guess_; }
  const std::vector<SuperIteration>& iterations() const noexcept { return iterations_; }
  const std::optional<double>& height_bound() const noexcept { return height_bound_; }

  double evaluate(double t) const noexcept;

  /// Pulse value at the grid midpoints (what the propagator applies).
  std::vector<double> sample(const TimeGrid& grid) const;

  /// Appends an iteration over `new_basis` with all-zero coefficients.
  /// Throws std::invalid_argument for an empty basis.
  DressedPulse dress(std::vector<BasisFunction> new_basis) const;

  /// Copy with the newest iteration's coefficients replaced.
  DressedPulse with_last_coefficients(std::span<const double> coefficients) const;

  /// Number of free coefficients of the newest iteration (0 for a bare guess).
  std::size_t free_coefficients() const noexcept;

  bool operator==(const DressedPulse&) const = default;

 private:
  double guess_ = 0.0;
  std::vector<SuperIteration> iterations_;
  std::optional<double> height_bound_;
};

/// `n_functions` independent draws: frequency uniform in (0, omega_max], phase
/// uniform in [0, 2 pi).
std::vector<BasisFunction> sample_basis(std::size_t n_functions, double omega_max, Rng& rng);

/// max_k |f(t_k)| over the propagation midpoints.
double max_abs(const DressedPulse& pulse, const TimeGrid& grid);
double max_abs(std::span<const double> samples);

/// Plain-text pulse record: a header line with the guess offset, T, f_max and
/// step count, then one `iteration omega phase coefficient` row per basis
/// function. Doubles are written with 17 significant digits.
struct PulseFile {
  DressedPulse pulse;
  double total_time = 0.0;
  std::size_t n_steps = 0;
};

void write_pulse(std::ostream& out, const PulseFile& file);
PulseFile read_pulse(std::istream& in);
std::string format_pulse(const PulseFile& file);
PulseFile parse_pulse(const std::string& text);

}  // namespace dcrab
