// Copyright 2026 The darkloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <random>
#include <sstream>

#include "darkloop/core.hpp"
#include "darkloop/pulse.hpp"
#include "support/oracles.hpp"

using namespace darkloop;

namespace {
constexpr double kT = 1e-4;
const double kPeak = 2.0 * kPi * 1e4;
}  // namespace

TEST_CASE("alpha and beta schedules") {
  CHECK(alpha_of(0.0, kT) == 0.0);
  CHECK(alpha_of(kT, kT) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(alpha_of(kT / 2, kT) - kPi / 2) < 1e-12);
  CHECK(std::abs(alpha_of(kT / 4, kT) - kPi / 4) < 1e-12);
  CHECK(beta_of(0.0, kT, 4.0) == 0.0);
  CHECK(std::abs(beta_of(kT, kT, 4.0)) < 1e-12);
  CHECK(std::abs(beta_of(kT / 2, kT, 4.0) - 4.0) < 1e-12);
  for (double t : {0.1 * kT, 0.37 * kT, 0.8 * kT}) CHECK(beta_of(t, kT, 0.0) == 0.0);
}

TEST_CASE("schedule functions reject times outside the loop") {
  CHECK_THROWS_AS(alpha_of(-0.01 * kT, kT), std::out_of_range);
  CHECK_THROWS_AS(beta_of(1.01 * kT, kT, 4.0), std::out_of_range);
  CHECK_THROWS_AS(control_amplitudes(2 * kT, kT, 4.0), std::out_of_range);
  CHECK_THROWS_AS(alpha_of(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("control amplitudes: boundaries and eta = 0") {
  for (double t : {0.0, kT / 2, kT}) {
    const ControlAmplitudes c = control_amplitudes(t, kT, 4.0);
    CHECK(std::abs(c.omega) < 1e-9 * kPi * kPi / kT);
    CHECK(std::abs(c.omega2) < 1e-9 * kPi * kPi / kT);
  }
  for (double t : {0.1 * kT, 0.3 * kT, 0.65 * kT}) {
    const ControlAmplitudes c = control_amplitudes(t, kT, 0.0);
    CHECK(c.omega == doctest::Approx(2.0 * alpha_dot(t, kT)).epsilon(1e-14));
    CHECK(c.omega2 == 0.0);
  }
}

TEST_CASE("regularized amplitudes agree with the cot form in the interior") {
  const ControlAmplitudes c = control_amplitudes(kT / 4, kT, 4.0);
  const oracle::Raw r = oracle::raw_controls(kT / 4, kT, 4.0);
  CHECK(std::abs(c.omega - r.omega) <= 1e-12 * std::abs(r.omega));
  CHECK(std::abs(c.omega2 - r.omega2) <= 1e-12 * std::abs(r.omega2));

  for (double eta : {1.0, 2.0, 4.0}) {
    int checked = 0;
    double worst = 0.0;
    for (int k = 1; k <= 1000; ++k) {
      const double t = kT * k / 1001.0;
      if (std::sin(alpha_of(t, kT)) <= 1e-3) continue;
      const ControlAmplitudes a = control_amplitudes(t, kT, eta);
      const oracle::Raw b = oracle::raw_controls(t, kT, eta);
      const double scale = std::max({std::abs(b.omega), std::abs(b.omega2), 1.0 / kT});
      worst = std::max({worst, std::abs(a.omega - b.omega) / scale, std::abs(a.omega2 - b.omega2) / scale});
      ++checked;
    }
    CHECK(checked > 900);
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("solve_duration") {
  // eta = 0: peak of 2 alpha-dot T is pi^2.
  CHECK(peak_factor(0.0) == doctest::Approx(kPi * kPi).epsilon(1e-12));
  CHECK(solve_duration(kPeak, 0.0) == doctest::Approx(kPi * kPi / kPeak).epsilon(1e-12));
  const double t4 = solve_duration(kPeak, 4.0);
  CHECK(t4 > 456e-6);
  CHECK(t4 < 504e-6);
  CHECK(solve_duration(2 * kPeak, 4.0) == doctest::Approx(t4 / 2).epsilon(1e-14));
  CHECK(solve_duration(0.5 * kPeak, 4.0) > solve_duration(kPeak, 4.0));
  // Grid convergence: doubling the grid changes T by < 0.01 %.
  for (double eta : {0.0, 1.0, 4.0}) {
    const double a = solve_duration(kPeak, eta, PeakNorm::kComposite, 10000);
    const double b = solve_duration(kPeak, eta, PeakNorm::kComposite, 20000);
    CHECK(std::abs(a - b) < 1e-4 * b);
  }
  CHECK_THROWS_AS(solve_duration(0.0, 4.0), std::invalid_argument);
}

TEST_CASE("peak factor matches a brute-force scan of the oracle amplitudes") {
  for (double eta : {2.0, 4.0}) {
    double composite = 0.0;
    double per_tone = 0.0;
    for (int k = 1; k < 200000; ++k) {
      const double s = k / 200000.0;
      if (std::sin(kPi / 2 * std::pow(std::sin(kPi * s), 2)) <= 1e-3) continue;
      const oracle::Raw r = oracle::raw_controls(s, 1.0, eta);
      composite = std::max(composite, std::abs(r.omega));
      per_tone = std::max({per_tone, std::abs(r.omega), std::abs(r.omega2)});
    }
    CHECK(peak_factor(eta) == doctest::Approx(composite).epsilon(1e-6));
    CHECK(peak_factor(eta, PeakNorm::kPerTone) == doctest::Approx(per_tone).epsilon(1e-6));
  }
}

TEST_CASE("split_bright") {
  const BrightSplit s = split_bright(2.0, kPi / 2, 0.0, 0.0);
  CHECK(s.omega0 == doctest::Approx(std::sqrt(2.0)));
  CHECK(s.omega1 == doctest::Approx(std::sqrt(2.0)));
  CHECK(s.phi1 == doctest::Approx(kPi));
  const BrightSplit z = split_bright(3.0, 0.0, 1.2, 0.4);
  CHECK(z.omega0 == 0.0);
  CHECK(z.omega1 == doctest::Approx(3.0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int k = 0; k < 100; ++k) {
    const BrightSplit r = split_bright(5.0, u(rng), u(rng), u(rng));
    CHECK(std::abs(std::hypot(r.omega0, r.omega1) - 5.0) < 1e-12);
  }
}

TEST_CASE("synthesize: X gate on the peak budget") {
  const GateSpec x(kPi / 2, 0.0, kPi, 4.0, PeakRabi{kPeak});
  const PulseSchedule s = synthesize(x, 4096);
  CHECK(s.duration() == doctest::Approx(480e-6).epsilon(0.05));
  CHECK(s.times().size() == 4097);
  double peak = 0.0;
  for (const auto& d : s.samples()) peak = std::max(peak, std::hypot(d.amplitude[0], d.amplitude[1]));
  CHECK(peak <= kPeak * (1 + 1e-9));
  CHECK(peak > 0.999 * kPeak);
  for (size_t k : {size_t{0}, size_t{2048}, size_t{4096}}) {
    for (double a : s.samples()[k].amplitude) CHECK(std::abs(a) <= 1e-9 * kPeak);
  }
}

TEST_CASE("synthesize: interval phases") {
  const double gamma = 0.7;
  const GateSpec spec(0.9, 0.3, gamma, 4.0, Duration{kT});
  const PulseSchedule s = synthesize(spec, 200);
  const BrightSplit ref = split_bright(1.0, 0.9, 0.3, 0.0);
  for (size_t k = 0; k < s.times().size(); ++k) {
    const DriveSample& d = s.samples()[k];
    const double shift = k <= 100 ? 0.0 : -gamma;
    CHECK(d.phase[0] == doctest::Approx(shift));
    CHECK(d.phase[1] == doctest::Approx(ref.phi1 + shift));
    CHECK(d.phase[2] == 0.0);
    // The relative bright-tone phase, hence |b> and |d1>, never changes.
    CHECK(d.phase[0] - d.phase[1] + kPi == doctest::Approx(0.3));
  }
  const PulseSchedule flat = synthesize(GateSpec(0.9, 0.3, 0.0, 4.0, Duration{kT}), 200);
  CHECK(flat.samples()[10].phase == flat.samples()[150].phase);
}

TEST_CASE("synthesize: eta = 0 reduces to a pi pulse per half loop") {
  const PulseSchedule s = synthesize(GateSpec(kPi / 2, 0.0, kPi, 0.0, Duration{kT}), 4096);
  double area = 0.0;
  for (size_t k = 0; k < 2048; ++k) {
    const auto& a = s.samples()[k].amplitude;
    const auto& b = s.samples()[k + 1].amplitude;
    CHECK(a[2] == 0.0);
    area += 0.5 * (std::hypot(a[0], a[1]) + std::hypot(b[0], b[1])) * (s.times()[k + 1] - s.times()[k]);
  }
  CHECK(area == doctest::Approx(kPi).epsilon(1e-6));
}

TEST_CASE("synthesize validates its inputs") {
  const GateSpec x(kPi / 2, 0.0, kPi, 4.0, Duration{kT});
  CHECK_THROWS_AS(synthesize(x, 99), std::invalid_argument);
  CHECK_THROWS_AS(synthesize(x, 101), std::invalid_argument);
  CHECK_THROWS_AS(GateSpec(0, 0, 0, -1.0, Duration{kT}), std::invalid_argument);
  CHECK_THROWS_AS(GateSpec(0, 0, 0, 4.0, Duration{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(GateSpec(0, 0, 0, 4.0, PeakRabi{-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(GateSpec(std::nan(""), 0, 0, 4.0, Duration{kT}), std::invalid_argument);
}

TEST_CASE("inject_rabi_error scales every amplitude") {
  const PulseSchedule s = synthesize(GateSpec(0.4, 1.0, 2.0, 4.0, Duration{kT}), 200);
  const PulseSchedule same = inject_rabi_error(s, 0.0);
  const PulseSchedule up = inject_rabi_error(s, 0.1);
  const PulseSchedule twice = inject_rabi_error(inject_rabi_error(s, -0.1), -0.1);
  for (size_t k = 0; k < s.samples().size(); ++k) {
    for (int j = 0; j < 3; ++j) {
      const double a = s.samples()[k].amplitude[j];
      CHECK(same.samples()[k].amplitude[j] == a);
      CHECK(up.samples()[k].amplitude[j] == doctest::Approx(1.1 * a));
      CHECK(twice.samples()[k].amplitude[j] == doctest::Approx(0.81 * a));
    }
    CHECK(up.samples()[k].phase == s.samples()[k].phase);
  }
  CHECK(up.duration() == s.duration());
  // Between samples the envelope carries the same factor.
  CHECK(up.at(0.123 * kT).amplitude[1] == doctest::Approx(1.1 * s.at(0.123 * kT).amplitude[1]));
  CHECK_THROWS_AS(inject_rabi_error(s, 1.0), std::invalid_argument);
}

TEST_CASE("sampled schedules interpolate linearly with right-continuous phase") {
  DriveSample a;
  DriveSample b;
  a.amplitude = {0.0, 2.0, 0.0};
  b.amplitude = {4.0, 0.0, 1.0};
  b.phase = {-1.0, 0.5, 0.0};
  const PulseSchedule s = PulseSchedule::from_samples({0.0, 1.0}, {a, b});
  const DriveSample mid = s.at(0.25);
  CHECK(mid.amplitude[0] == doctest::Approx(1.0));
  CHECK(mid.amplitude[1] == doctest::Approx(1.5));
  CHECK(mid.phase[0] == -1.0);
  CHECK(s.at(0.0).phase[0] == 0.0);
  CHECK_THROWS_AS(s.at(1.5), std::out_of_range);
  CHECK_THROWS_AS(PulseSchedule::from_samples({0.0, 0.0}, {a, b}), std::invalid_argument);
}

TEST_CASE("schedule CSV layout") {
  std::ostringstream os;
  write_schedule_csv(os, synthesize(GateSpec(0, 0, 1, 4, Duration{kT}), 100));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t_s,omega0_rad_s,omega1_rad_s,omega2_rad_s,phi0_rad,phi1_rad,phi2_rad");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 101);
}
