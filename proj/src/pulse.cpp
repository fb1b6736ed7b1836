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

#include "darkloop/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "darkloop/core.hpp"

namespace darkloop {

namespace {

// Rounding slack accepted at the loop edges before t counts as out of range.
constexpr double kEdgeSlack = 1e-12;

double checked_time(double t, double duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("loop duration must be positive");
  const double slack = kEdgeSlack * duration;
  if (t < -slack || t > duration + slack) {
    throw std::out_of_range(fmt::format("t = {:.6g} outside [0, {:.6g}]", t, duration));
  }
  return std::clamp(t, 0.0, duration);
}

double drive_magnitude(double s, double eta, PeakNorm norm) {
  const ControlAmplitudes c = control_amplitudes(s, 1.0, eta);
  if (norm == PeakNorm::kComposite) return std::abs(c.omega);
  return std::max(std::abs(c.omega), std::abs(c.omega2));
}

}  // namespace

GateSpec::GateSpec(double theta, double phi, double gamma, double eta, DriveBudget budget)
    : theta_(theta), phi_(phi), gamma_(gamma), eta_(eta), budget_(budget) {
  if (!std::isfinite(theta) || !std::isfinite(phi) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gate angles must be finite");
  }
  if (!std::isfinite(eta) || eta < 0.0) throw std::invalid_argument("eta must be finite and >= 0");
  std::visit(
      [](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, Duration>) {
          if (!(b.seconds > 0.0) || !std::isfinite(b.seconds)) {
            throw std::invalid_argument("loop duration must be positive");
          }
        } else {
          if (!(b.rad_per_s > 0.0) || !std::isfinite(b.rad_per_s)) {
            throw std::invalid_argument("peak Rabi frequency must be positive");
          }
        }
      },
      budget_);
}

double alpha_of(double t, double duration) {
  t = checked_time(t, duration);
  const double s = std::sin(kPi * t / duration);
  return 0.5 * kPi * s * s;
}

double alpha_dot(double t, double duration) {
  t = checked_time(t, duration);
  return kPi * kPi / (2.0 * duration) * std::sin(2.0 * kPi * t / duration);
}

double beta_of(double t, double duration, double eta) {
  return eta * (1.0 - std::cos(alpha_of(t, duration)));
}

ControlAmplitudes control_amplitudes(double t, double duration, double eta) {
  const double a = alpha_of(t, duration);
  const double ad = alpha_dot(t, duration);
  const double b = eta * (1.0 - std::cos(a));
  const double ca = std::cos(a);
  return {2.0 * ad * (eta * ca * std::sin(b) + std::cos(b)),
          2.0 * ad * (eta * ca * std::cos(b) - std::sin(b))};
}

double peak_factor(double eta, PeakNorm norm, int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("peak_factor needs at least two grid points");
  int best = 0;
  double best_value = -1.0;
  for (int k = 0; k <= grid_points; ++k) {
    const double v = drive_magnitude(static_cast<double>(k) / grid_points, eta, norm);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  // Golden-section refinement inside the bracketing grid cells.
  const double h = 1.0 / grid_points;
  double lo = std::max(0.0, (best - 1) * h);
  double hi = std::min(1.0, (best + 1) * h);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = drive_magnitude(x1, eta, norm);
  double f2 = drive_magnitude(x2, eta, norm);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = drive_magnitude(x2, eta, norm);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = drive_magnitude(x1, eta, norm);
    }
  }
  return std::max({best_value, f1, f2});
}

double solve_duration(double peak_rabi, double eta, PeakNorm norm, int grid_points) {
  if (!(peak_rabi > 0.0)) throw std::invalid_argument("peak Rabi frequency must be positive");
  return peak_factor(eta, norm, grid_points) / peak_rabi;
}

BrightSplit split_bright(double omega, double theta, double phi, double phi0) {
  return {omega * std::sin(0.5 * theta), omega * std::cos(0.5 * theta), phi0 - phi + kPi};
}

LoopSchedule::LoopSchedule(double duration, double eta, double gamma)
    : duration_(duration), eta_(eta), gamma_(gamma) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("loop duration must be positive");
  }
  if (!std::isfinite(eta) || eta < 0.0) throw std::invalid_argument("eta must be finite and >= 0");
}

double LoopSchedule::phase0(double t) const {
  t = checked_time(t, duration_);
  return t <= 0.5 * duration_ ? 0.0 : -gamma_;
}

double resolve_duration(const GateSpec& spec, PeakNorm norm) {
  if (const auto* d = std::get_if<Duration>(&spec.budget())) return d->seconds;
  return solve_duration(std::get<PeakRabi>(spec.budget()).rad_per_s, spec.eta(), norm);
}

DriveSample PulseSchedule::evaluate_envelope(double t) const {
  const Envelope& e = *envelope_;
  const ControlAmplitudes c = e.loop.amplitudes(t);
  const double phi0 = e.loop.phase0(t);
  const BrightSplit split = split_bright(c.omega, e.theta, e.phi, phi0);
  DriveSample s;
  s.amplitude = {scale_ * split.omega0, scale_ * split.omega1, scale_ * c.omega2};
  s.phase = {phi0, split.phi1, 0.0};
  return s;
}

PulseSchedule PulseSchedule::from_samples(std::vector<double> times,
                                          std::vector<DriveSample> samples) {
  if (times.size() < 2 || times.size() != samples.size()) {
    throw std::invalid_argument("schedule needs >= 2 samples with matching times");
  }
  for (size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("schedule times must increase");
  }
  PulseSchedule s;
  s.times_ = std::move(times);
  s.samples_ = std::move(samples);
  return s;
}

std::vector<double> PulseSchedule::breakpoints() const {
  if (envelope_) return {start() + 0.5 * duration()};
  std::vector<double> out;
  for (size_t k = 1; k + 1 < samples_.size(); ++k) {
    if (samples_[k].phase != samples_[k + 1].phase) out.push_back(times_[k]);
  }
  return out;
}

DriveSample PulseSchedule::at(double t) const {
  if (t < times_.front() - kEdgeSlack * duration() || t > times_.back() + kEdgeSlack * duration()) {
    throw std::out_of_range(fmt::format("t = {:.6g} outside schedule", t));
  }
  if (envelope_) return evaluate_envelope(std::clamp(t - start(), 0.0, duration()));
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return samples_.front();
  if (it == times_.end()) return samples_.back();
  const size_t hi = static_cast<size_t>(it - times_.begin());
  const size_t lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  DriveSample s;
  for (int j = 0; j < 3; ++j) {
    s.amplitude[j] = (1.0 - w) * samples_[lo].amplitude[j] + w * samples_[hi].amplitude[j];
  }
  // Phase on (t_lo, t_hi] belongs to the right-hand sample.
  s.phase = (w == 0.0 ? samples_[lo] : samples_[hi]).phase;
  return s;
}

PulseSchedule synthesize(const GateSpec& spec, int n_samples, PeakNorm norm) {
  if (n_samples < 100 || n_samples % 2 != 0) {
    throw std::invalid_argument("n_samples must be even and >= 100");
  }
  const double duration = resolve_duration(spec, norm);
  PulseSchedule s;
  s.spec_ = spec;
  s.envelope_ = PulseSchedule::Envelope{LoopSchedule(duration, spec.eta(), spec.gamma()),
                                        spec.theta(), spec.phi()};
  s.times_.resize(n_samples + 1);
  s.samples_.resize(n_samples + 1);
  for (int k = 0; k <= n_samples; ++k) {
    const double t = duration * k / n_samples;
    s.times_[k] = t;
    s.samples_[k] = s.evaluate_envelope(t);
  }
  return s;
}

PulseSchedule inject_rabi_error(const PulseSchedule& schedule, double epsilon) {
  if (!(std::abs(epsilon) < 1.0)) throw std::invalid_argument("|epsilon| must be < 1");
  PulseSchedule out = schedule;
  const double factor = 1.0 + epsilon;
  out.scale_ *= factor;
  for (auto& sample : out.samples_) {
    for (double& a : sample.amplitude) a *= factor;
  }
  return out;
}

void write_schedule_csv(std::ostream& os, const PulseSchedule& schedule) {
  os << "t_s,omega0_rad_s,omega1_rad_s,omega2_rad_s,phi0_rad,phi1_rad,phi2_rad\n";
  for (size_t k = 0; k < schedule.times().size(); ++k) {
    const DriveSample& s = schedule.samples()[k];
    os << fmt::format("{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\n",
                      schedule.times()[k], s.amplitude[0], s.amplitude[1], s.amplitude[2],
                      s.phase[0], s.phase[1], s.phase[2]);
  }
}

}  // namespace darkloop
