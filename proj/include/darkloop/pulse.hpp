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

#ifndef DARKLOOP_PULSE_HPP_
#define DARKLOOP_PULSE_HPP_

#include <array>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

namespace darkloop {

struct Duration {
  double seconds;
};
struct PeakRabi {
  double rad_per_s;
};
using DriveBudget = std::variant<Duration, PeakRabi>;

/// Which amplitude the peak drive budget bounds.
///   kComposite: the bright-channel drive sqrt(Omega0^2 + Omega1^2).
///   kPerTone:   every physical tone, i.e. max(|Omega|, |Omega2|) for any theta.
enum class PeakNorm { kComposite, kPerTone };

/// Holonomic gate U(theta, phi, gamma) driven along a loop with path constant eta.
class GateSpec {
 public:
  GateSpec(double theta, double phi, double gamma, double eta, DriveBudget budget);

  double theta() const { return theta_; }
  double phi() const { return phi_; }
  double gamma() const { return gamma_; }
  double eta() const { return eta_; }
  const DriveBudget& budget() const { return budget_; }

 private:
  double theta_;
  double phi_;
  double gamma_;
  double eta_;
  DriveBudget budget_;
};

double alpha_of(double t, double duration);
double alpha_dot(double t, double duration);
double beta_of(double t, double duration, double eta);

struct ControlAmplitudes {
  double omega;   // bright-channel drive, rad/s
  double omega2;  // |2> <-> |a> drive, rad/s
};

/// Inverse-engineered drives along the dark path, with the cot(alpha) factor
/// cancelled analytically (beta_dot = eta sin(alpha) alpha_dot), so the result
/// is finite on the whole loop.
ControlAmplitudes control_amplitudes(double t, double duration, double eta);

/// Dimensionless peak of the drive over one loop of unit duration.
double peak_factor(double eta, PeakNorm norm = PeakNorm::kComposite, int grid_points = 20000);

/// Loop duration that makes the peak drive equal `peak_rabi`.
double solve_duration(double peak_rabi, double eta, PeakNorm norm = PeakNorm::kComposite,
                      int grid_points = 20000);

struct BrightSplit {
  double omega0;
  double omega1;
  double phi1;
};
BrightSplit split_bright(double omega, double theta, double phi, double phi0);

/// Single-loop path: alpha, beta and the bright-tone phase of each half.
class LoopSchedule {
 public:
  LoopSchedule(double duration, double eta, double gamma);

  double duration() const { return duration_; }
  double eta() const { return eta_; }
  double gamma() const { return gamma_; }

  double alpha(double t) const { return alpha_of(t, duration_); }
  double beta(double t) const { return beta_of(t, duration_, eta_); }
  /// 0 on [0, T/2], -gamma on (T/2, T].
  double phase0(double t) const;
  ControlAmplitudes amplitudes(double t) const { return control_amplitudes(t, duration_, eta_); }

 private:
  double duration_;
  double eta_;
  double gamma_;
};

struct DriveSample {
  std::array<double, 3> amplitude{};  // Omega_j, rad/s (signed)
  std::array<double, 3> phase{};      // phi_j, rad
};

/// Three-tone drive on a uniform grid. Synthesized schedules keep their
/// closed-form envelope and evaluate it exactly between samples; schedules
/// built from raw samples interpolate amplitudes linearly and hold phases
/// piecewise constant.
class PulseSchedule {
 public:
  static PulseSchedule from_samples(std::vector<double> times, std::vector<DriveSample> samples);

  double duration() const { return times_.back() - times_.front(); }
  double start() const { return times_.front(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<DriveSample>& samples() const { return samples_; }
  const std::optional<GateSpec>& spec() const { return spec_; }
  double amplitude_scale() const { return scale_; }

  /// Times at which the drive phases may jump.
  std::vector<double> breakpoints() const;

  DriveSample at(double t) const;

 private:
  friend PulseSchedule synthesize(const GateSpec& spec, int n_samples, PeakNorm norm);
  friend PulseSchedule inject_rabi_error(const PulseSchedule& schedule, double epsilon);

  struct Envelope {
    LoopSchedule loop;
    double theta;
    double phi;
  };

  PulseSchedule() = default;
  DriveSample evaluate_envelope(double t) const;

  std::vector<double> times_;
  std::vector<DriveSample> samples_;
  std::optional<GateSpec> spec_;
  std::optional<Envelope> envelope_;
  double scale_ = 1.0;
};

inline constexpr int kDefaultSamples = 4096;

PulseSchedule synthesize(const GateSpec& spec, int n_samples = kDefaultSamples,
                         PeakNorm norm = PeakNorm::kComposite);

/// Scales all three tone amplitudes by (1 + epsilon).
PulseSchedule inject_rabi_error(const PulseSchedule& schedule, double epsilon);

/// Resolves the loop duration of a spec under the given peak normalization.
double resolve_duration(const GateSpec& spec, PeakNorm norm = PeakNorm::kComposite);

/// CSV: t_s,omega0_rad_s,omega1_rad_s,omega2_rad_s,phi0_rad,phi1_rad,phi2_rad
void write_schedule_csv(std::ostream& os, const PulseSchedule& schedule);

}  // namespace darkloop

#endif  // DARKLOOP_PULSE_HPP_
