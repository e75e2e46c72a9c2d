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
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dcrab {

struct SimplexConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double x_tolerance = 1e-6;
  double f_tolerance = 1e-8;
  std::size_t max_evaluations = 10000;
  /// Edge length of the axis-aligned starting simplex.
  double initial_step = 0.1;

  void validate(std::size_t dimension) const;
};

enum class SimplexStatus { converged, max_evals_reached, target_reached };

std::string_view to_string(SimplexStatus status);

struct MinimizeResult {
  std::vector<double> best_point;
  double best_value = 0.0;
  std::size_t n_evaluations = 0;
  SimplexStatus status = SimplexStatus::converged;
  /// Best vertex value after the initial simplex and after every iteration.
  std::vector<double> best_trace;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead minimization (reflect / expand / contract / shrink).
///
/// Stops when the simplex diameter (max-norm distance of every vertex to the
/// best one) is below x_tolerance and the value spread is below f_tolerance,
/// when the evaluation budget is used up, or when the best value is at or below
/// `target_value`. The target is checked once the initial simplex is complete
/// and after every iteration. Non-finite values at vertices other than the
/// start are treated as +infinity; a non-finite start value throws
/// std::domain_error.
MinimizeResult minimize(const Objective& objective, std::span<const double> start,
                        const SimplexConfig& config,
                        std::optional<double> target_value = std::nullopt);

}  // namespace dcrab
