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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dcrab/pulse.hpp"

using namespace dcrab;

namespace {

DressedPulse random_dressed(Rng& rng, std::size_t iterations, std::size_t n, double omega_max,
                            std::optional<double> bound = std::nullopt) {
  std::normal_distribution<double> coeff(0.0, 1.0);
  DressedPulse p(0.25, bound);
  for (std::size_t j = 0; j < iterations; ++j) {
    p = p.dress(sample_basis(n, omega_max, rng));
    std::vector<double> c(n);
    for (auto& x : c) x = coeff(rng);
    p = p.with_last_coefficients(c);
  }
  return p;
}

}  // namespace

TEST_CASE("sample_basis") {
  const double T = 16 * std::numbers::pi, w = 40 * 2 * std::numbers::pi / T;
  Rng rng = make_rng(4);
  for (const auto& f : sample_basis(40, w, rng)) {
    CHECK(f.frequency > 0.0);
    CHECK(f.frequency <= w);
    CHECK(f.phase >= 0.0);
    CHECK(f.phase < 2 * std::numbers::pi);
  }
  Rng a = make_rng(8), b = make_rng(8);
  CHECK(sample_basis(12, 3.0, a) == sample_basis(12, 3.0, b));

  double sum = 0.0;
  for (const auto& f : sample_basis(10000, 3.0, rng)) sum += f.frequency;
  CHECK(sum / 10000.0 == doctest::Approx(1.5).epsilon(0.02));

  CHECK_THROWS_AS(sample_basis(3, 0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_basis(0, 1.0, rng), std::invalid_argument);
}

TEST_CASE("evaluate examples") {
  const double w = 1.7, peak = std::numbers::pi / (2 * w);
  CHECK(DressedPulse().evaluate(3.0) == 0.0);
  const DressedPulse zero = DressedPulse(0.0).dress({{w, 0.0}});
  CHECK(zero.evaluate(0.4) == 0.0);

  const std::vector<double> one{1.0}, three{3.0};
  CHECK(zero.with_last_coefficients(one).evaluate(peak) == doctest::Approx(1.0).epsilon(1e-15));
  const DressedPulse walled = DressedPulse(0.0, 1.0).dress({{w, 0.0}}).with_last_coefficients(three);
  CHECK(walled.evaluate(peak) == 1.0);
  CHECK(DressedPulse(0.0, 1.0).dress({{w, 0.0}}).with_last_coefficients(std::vector<double>{-3.0})
            .evaluate(peak) == -1.0);
}

TEST_CASE("nested hard wall") {
  // f^0 = clip(guess); each dressing step adds its terms and clips again.
  const std::vector<SuperIteration> its{{{{1.0, std::numbers::pi / 2}}, {2.0}},
                                        {{{1.0, std::numbers::pi / 2}}, {-0.5}}};
  const DressedPulse p(0.0, its, 1.0);
  // t = 0: first step clips 2 to 1, the second lowers it to 0.5.
  CHECK(p.evaluate(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(DressedPulse(3.0, {}, 1.0).evaluate(0.7) == 1.0);
}

TEST_CASE("dress") {
  Rng rng = make_rng(10);
  const DressedPulse base = random_dressed(rng, 2, 3, 2.0);
  const DressedPulse next = base.dress(sample_basis(6, 2.0, rng));
  CHECK(next.iterations().size() == base.iterations().size() + 1);
  CHECK(next.free_coefficients() == 6);
  CHECK(next.dress(sample_basis(2, 2.0, rng)).iterations().size() == base.iterations().size() + 2);
  CHECK_THROWS_AS(base.dress({}), std::invalid_argument);
  CHECK_THROWS_AS(next.with_last_coefficients(std::vector<double>{1.0}), std::invalid_argument);
  CHECK(DressedPulse(0.0).free_coefficients() == 0);
}

TEST_CASE("dressing neutrality") {
  Rng rng = make_rng(12);
  std::uniform_real_distribution<double> time(0.0, 20.0);
  for (auto bound : {std::optional<double>{}, std::optional<double>{0.8}}) {
    const DressedPulse base = random_dressed(rng, 3, 4, 2.5, bound);
    const DressedPulse dressed = base.dress(sample_basis(5, 2.5, rng));
    for (int i = 0; i < 1000; ++i) {
      const double t = time(rng);
      REQUIRE(dressed.evaluate(t) == base.evaluate(t));
    }
  }
}

TEST_CASE("clip") {
  CHECK(clip(0.5, 1.0) == 0.5);
  CHECK(clip(-3.0, 1.0) == -1.0);
  CHECK(clip(0.0, 1.0) == 0.0);
  CHECK(clip(1.0, 1.0) == 1.0);
  CHECK_THROWS_AS(clip(0.3, 0.0), std::invalid_argument);
  Rng rng = make_rng(13);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = n(rng), f = std::abs(n(rng)) + 1e-3;
    REQUIRE(clip(clip(x, f), f) == clip(x, f));
  }
}

TEST_CASE("unbounded pulses are linear in each coefficient") {
  Rng rng = make_rng(14);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> time(0.0, 10.0);
  for (int rep = 0; rep < 200; ++rep) {
    const auto basis = sample_basis(4, 3.0, rng);
    std::vector<double> a(4), b(4), ab(4);
    for (int i = 0; i < 4; ++i) a[i] = n(rng), b[i] = n(rng), ab[i] = a[i] + b[i];
    const DressedPulse shell = DressedPulse(0.0).dress(basis);
    const double t = time(rng);
    const double lhs = shell.with_last_coefficients(ab).evaluate(t);
    const double rhs = shell.with_last_coefficients(a).evaluate(t) + shell.with_last_coefficients(b).evaluate(t);
    REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("sample and max_abs") {
  const TimeGrid grid(20.0, 4000);
  CHECK(max_abs(DressedPulse(), grid) == 0.0);
  const DressedPulse two = DressedPulse(0.0).dress({{5.0, 0.0}}).with_last_coefficients(std::vector<double>{2.0});
  CHECK(max_abs(two, grid) == doctest::Approx(2.0).epsilon(1e-4));
  Rng rng = make_rng(15);
  const DressedPulse walled = random_dressed(rng, 3, 5, 3.0, 0.4);
  CHECK(max_abs(walled, grid) <= 0.4);
  const auto samples = walled.sample(grid);
  CHECK(samples.size() == 4000);
  CHECK(samples[17] == walled.evaluate(grid.midpoint(17)));
  CHECK_THROWS_AS(max_abs(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("pulse file round trip is bit exact") {
  Rng rng = make_rng(16);
  for (auto bound : {std::optional<double>{}, std::optional<double>{0.7}}) {
    const PulseFile file{random_dressed(rng, 3, 4, 2.2, bound), 6 * std::numbers::pi, 512};
    const std::string text = format_pulse(file);
    const PulseFile back = parse_pulse(text);
    CHECK(back.pulse == file.pulse);
    CHECK(back.total_time == file.total_time);
    CHECK(back.n_steps == 512);
    CHECK(back.pulse.sample(TimeGrid(file.total_time, 512)) ==
          file.pulse.sample(TimeGrid(file.total_time, 512)));
    CHECK(format_pulse(back) == text);
  }
  CHECK_THROWS(parse_pulse("not a pulse\n"));
  CHECK_THROWS(parse_pulse("dcrab-pulse guess=0 total_time=1 f_max=none n_steps=4\n1 1 0 1\n"));
}
