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

#include "dcrab/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dcrab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string to_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& token, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || token.empty())
    throw std::runtime_error(std::string("pulse file: bad ") + what + " '" + token + "'");
  return v;
}

}  // namespace

double BasisFunction::operator()(double t) const noexcept { return std::sin(frequency * t + phase); }

double SuperIteration::evaluate(double t) const noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) sum += coefficients[i] * basis[i](t);
  return sum;
}

double clip(double value, double f_max) {
  if (!(f_max > 0.0)) throw std::invalid_argument("clip bound must be positive");
  if (std::abs(value) < f_max) return value;
  return std::copysign(f_max, value);
}

DressedPulse::DressedPulse(double guess, std::optional<double> height_bound)
    : DressedPulse(guess, {}, height_bound) {}

DressedPulse::DressedPulse(double guess, std::vector<SuperIteration> iterations,
                           std::optional<double> height_bound)
    : guess_(guess), iterations_(std::move(iterations)), height_bound_(height_bound) {
  if (!std::isfinite(guess_)) throw std::invalid_argument("guess offset must be finite");
  if (height_bound_ && !(*height_bound_ > 0.0 && std::isfinite(*height_bound_)))
    throw std::invalid_argument("height bound must be positive and finite");
  for (const auto& it : iterations_) {
    if (it.basis.empty() || it.basis.size() != it.coefficients.size())
      throw std::invalid_argument("super-iteration needs equal, non-zero numbers of functions "
                                  "and coefficients");
  }
}

double DressedPulse::evaluate(double t) const noexcept {
  if (!height_bound_) {
    double value = guess_;
    for (const auto& it : iterations_) value += it.evaluate(t);
    return value;
  }
  const double bound = *height_bound_;
  double value = clip(guess_, bound);
  for (const auto& it : iterations_) value = clip(value + it.evaluate(t), bound);
  return value;
}

std::vector<double> DressedPulse::sample(const TimeGrid& grid) const {
  std::vector<double> out(grid.n_steps());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = evaluate(grid.midpoint(k));
  return out;
}

DressedPulse DressedPulse::dress(std::vector<BasisFunction> new_basis) const {
  if (new_basis.empty()) throw std::invalid_argument("cannot dress with an empty basis");
  DressedPulse out = *this;
  const std::size_t n = new_basis.size();
  out.iterations_.push_back({std::move(new_basis), std::vector<double>(n, 0.0)});
  return out;
}

DressedPulse DressedPulse::with_last_coefficients(std::span<const double> coefficients) const {
  if (iterations_.empty()) throw std::logic_error("pulse has no super-iteration to update");
  if (coefficients.size() != iterations_.back().coefficients.size())
    throw std::invalid_argument("coefficient count does not match the newest basis");
  DressedPulse out = *this;
  out.iterations_.back().coefficients.assign(coefficients.begin(), coefficients.end());
  return out;
}

std::size_t DressedPulse::free_coefficients() const noexcept {
  return iterations_.empty() ? 0 : iterations_.back().coefficients.size();
}

std::vector<BasisFunction> sample_basis(std::size_t n_functions, double omega_max, Rng& rng) {
  if (!(omega_max > 0.0) || !std::isfinite(omega_max))
    throw std::invalid_argument("omega_max must be positive and finite");
  if (n_functions == 0) throw std::invalid_argument("need at least one basis function");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<BasisFunction> basis(n_functions);
  for (auto& b : basis) {
    // 1 - u maps [0, 1) onto (0, 1], so zero frequency never occurs.
    b.frequency = omega_max * (1.0 - unit(rng));
    b.phase = kTwoPi * unit(rng);
    if (b.phase >= kTwoPi) b.phase = 0.0;
  }
  return basis;
}

double max_abs(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("max_abs of an empty sample set");
  double m = 0.0;
  for (const double v : samples) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const DressedPulse& pulse, const TimeGrid& grid) {
  return max_abs(pulse.sample(grid));
}

void write_pulse(std::ostream& out, const PulseFile& file) {
  const auto& p = file.pulse;
  out << "dcrab-pulse guess=" << to_text(p.guess()) << " total_time=" << to_text(file.total_time)
      << " f_max=" << (p.height_bound() ? to_text(*p.height_bound()) : std::string("none"))
      << " n_steps=" << file.n_steps << '\n';
  for (std::size_t j = 0; j < p.iterations().size(); ++j) {
    const auto& it = p.iterations()[j];
    for (std::size_t i = 0; i < it.basis.size(); ++i)
      out << j << ' ' << to_text(it.basis[i].frequency) << ' ' << to_text(it.basis[i].phase) << ' '
          << to_text(it.coefficients[i]) << '\n';
  }
}

PulseFile read_pulse(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("pulse file: missing header");
  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != "dcrab-pulse") throw std::runtime_error("pulse file: bad magic '" + magic + "'");

  std::optional<double> guess, total_time, f_max;
  std::optional<std::size_t> n_steps;
  bool saw_f_max = false;
  std::string field;
  while (header >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw std::runtime_error("pulse file: bad header field " + field);
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "guess") {
      guess = parse_double(value, "guess");
    } else if (key == "total_time") {
      total_time = parse_double(value, "total_time");
    } else if (key == "f_max") {
      saw_f_max = true;
      if (value != "none") f_max = parse_double(value, "f_max");
    } else if (key == "n_steps") {
      n_steps = static_cast<std::size_t>(std::stoull(value));
    } else {
      throw std::runtime_error("pulse file: unknown header key " + key);
    }
  }
  if (!guess || !total_time || !saw_f_max || !n_steps)
    throw std::runtime_error("pulse file: incomplete header");

  std::vector<SuperIteration> iterations;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::size_t index = 0;
    std::string w, phi, c;
    if (!(row >> index >> w >> phi >> c))
      throw std::runtime_error("pulse file: malformed row '" + line + "'");
    if (index == iterations.size()) iterations.emplace_back();
    if (index + 1 != iterations.size())
      throw std::runtime_error("pulse file: iteration indices must be consecutive");
    iterations.back().basis.push_back(
        {parse_double(w, "frequency"), parse_double(phi, "phase")});
    iterations.back().coefficients.push_back(parse_double(c, "coefficient"));
  }
  return {DressedPulse(*guess, std::move(iterations), f_max), *total_time, *n_steps};
}

std::string format_pulse(const PulseFile& file) {
  std::ostringstream out;
  write_pulse(out, file);
  return out.str();
}

PulseFile parse_pulse(const std::string& text) {
  std::istringstream in(text);
  return read_pulse(in);
}

}  // namespace dcrab
