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

#include "dcrab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dcrab {

void SimplexConfig::validate(std::size_t dimension) const {
  if (dimension == 0) throw std::invalid_argument("simplex dimension must be >= 1");
  if (!(x_tolerance > 0.0) || !(f_tolerance > 0.0))
    throw std::invalid_argument("simplex tolerances must be positive");
  if (max_evaluations < dimension + 1)
    throw std::invalid_argument("evaluation budget " + std::to_string(max_evaluations) +
                                " cannot build a simplex of dimension " +
                                std::to_string(dimension));
  if (!(initial_step > 0.0)) throw std::invalid_argument("initial simplex step must be positive");
  if (!(reflection > 0.0) || !(expansion > reflection) || !(contraction > 0.0 && contraction < 1.0) ||
      !(shrink > 0.0 && shrink < 1.0))
    throw std::invalid_argument("invalid Nelder-Mead coefficients");
}

std::string_view to_string(SimplexStatus status) {
  switch (status) {
    case SimplexStatus::converged: return "converged";
    case SimplexStatus::max_evals_reached: return "max_evals_reached";
    case SimplexStatus::target_reached: return "target_reached";
  }
  return "unknown";
}

namespace {

using Point = std::vector<double>;

struct Vertex {
  Point x;
  double f;
  std::size_t id;  // insertion order, breaks ties
};

class Run {
 public:
  Run(const Objective& objective, std::size_t budget) : objective_(objective), budget_(budget) {}

  bool exhausted() const { return count_ >= budget_; }
  std::size_t count() const { return count_; }

  double operator()(const Point& x) {
    ++count_;
    const double v = objective_(std::span<const double>(x));
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }

  double raw(const Point& x) {
    ++count_;
    return objective_(std::span<const double>(x));
  }

 private:
  const Objective& objective_;
  std::size_t budget_;
  std::size_t count_ = 0;
};

Point affine(const Point& base, const Point& toward, double t) {
  // base + t * (toward - base)
  Point out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + t * (toward[i] - base[i]);
  return out;
}

}  // namespace

MinimizeResult minimize(const Objective& objective, std::span<const double> start,
                        const SimplexConfig& config, std::optional<double> target_value) {
  const std::size_t n = start.size();
  config.validate(n);

  Run eval(objective, config.max_evaluations);
  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  std::size_t next_id = 0;

  Point x0(start.begin(), start.end());
  const double f0 = eval.raw(x0);
  if (!std::isfinite(f0)) throw std::domain_error("objective is not finite at the start point");
  simplex.push_back({x0, f0, next_id++});
  for (std::size_t i = 0; i < n; ++i) {
    Point xi = x0;
    xi[i] += config.initial_step;
    const double fi = eval(xi);
    simplex.push_back({std::move(xi), fi, next_id++});
  }

  MinimizeResult result;
  auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) {
      return a.f < b.f || (a.f == b.f && a.id < b.id);
    });
  };
  auto finish = [&](SimplexStatus status) {
    order();
    result.best_point = simplex.front().x;
    result.best_value = simplex.front().f;
    result.n_evaluations = eval.count();
    result.status = status;
    return result;
  };
  auto converged = [&] {
    const Point& best = simplex.front().x;
    double diameter = 0.0;
    for (std::size_t v = 1; v <= n; ++v)
      for (std::size_t i = 0; i < n; ++i)
        diameter = std::max(diameter, std::abs(simplex[v].x[i] - best[i]));
    const double spread = simplex.back().f - simplex.front().f;
    return diameter < config.x_tolerance && spread < config.f_tolerance;
  };

  order();
  result.best_trace.push_back(simplex.front().f);

  while (true) {
    if (target_value && simplex.front().f <= *target_value)
      return finish(SimplexStatus::target_reached);
    if (converged()) return finish(SimplexStatus::converged);
    if (eval.exhausted()) return finish(SimplexStatus::max_evals_reached);

    Point centroid(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i];
    for (double& c : centroid) c /= static_cast<double>(n);

    Vertex& worst = simplex.back();
    const double f_best = simplex.front().f;
    const double f_second_worst = simplex[n - 1].f;

    Point xr = affine(centroid, worst.x, -config.reflection);
    const double fr = eval(xr);

    bool do_shrink = false;
    if (fr < f_best) {
      if (eval.exhausted()) {
        worst = {std::move(xr), fr, next_id++};
      } else {
        Point xe = affine(centroid, worst.x, -config.expansion);
        const double fe = eval(xe);
        if (fe < fr)
          worst = {std::move(xe), fe, next_id++};
        else
          worst = {std::move(xr), fr, next_id++};
      }
    } else if (fr < f_second_worst) {
      worst = {std::move(xr), fr, next_id++};
    } else if (eval.exhausted()) {
      // Budget gone before a contraction could be tried.
    } else if (fr < worst.f) {
      Point xc = affine(centroid, xr, config.contraction);
      const double fc = eval(xc);
      if (fc <= fr)
        worst = {std::move(xc), fc, next_id++};
      else
        do_shrink = true;
    } else {
      Point xcc = affine(centroid, worst.x, config.contraction);
      const double fcc = eval(xcc);
      if (fcc < worst.f)
        worst = {std::move(xcc), fcc, next_id++};
      else
        do_shrink = true;
    }

    if (do_shrink) {
      const Point best = simplex.front().x;
      for (std::size_t v = 1; v <= n && !eval.exhausted(); ++v) {
        simplex[v].x = affine(best, simplex[v].x, config.shrink);
        simplex[v].f = eval(simplex[v].x);
        simplex[v].id = next_id++;
      }
    }

    order();
    result.best_trace.push_back(simplex.front().f);
  }
}

}  // namespace dcrab
