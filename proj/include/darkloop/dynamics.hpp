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

#ifndef DARKLOOP_DYNAMICS_HPP_
#define DARKLOOP_DYNAMICS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "darkloop/channel.hpp"
#include "darkloop/core.hpp"
#include "darkloop/pulse.hpp"

namespace darkloop {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// H(t) on [t_begin, t_end]. Breakpoints are times where H may jump; the
/// integrators never step across them.
struct TimeDependentHamiltonian {
  int dim = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::function<Matrix(double)> at;
  std::vector<double> breakpoints;
};

struct PropagationOptions {
  double tol = 1e-9;
  int initial_steps = 256;
  int max_steps = 1 << 21;
};

/// Resonant Hamiltonian of the three-tone drive on {|0>,|1>,|2>,|a>}.
class HamiltonianModel {
 public:
  explicit HamiltonianModel(PulseSchedule schedule);

  const PulseSchedule& schedule() const { return schedule_; }
  double duration() const { return schedule_.duration(); }

  Operator hamiltonian_at(double t) const;
  TimeDependentHamiltonian generator() const;

 private:
  PulseSchedule schedule_;
};

Matrix drive_hamiltonian(const DriveSample& s);

struct CollapseOperator {
  Matrix op;
  double rate;  // 1/s
};

class NoiseModel {
 public:
  NoiseModel() = default;

  void add(Matrix op, double rate);
  /// Collapse operator sqrt(2 rate)|k><k|, so coherences between level k and
  /// an undephased level decay as exp(-rate t).
  void add_level_dephasing(int dim, int level, double rate);
  /// Drives rho toward I/d at `rate`.
  void add_depolarizing(int dim, double rate);

  /// Dephasing of |1>,|2>,|a> relative to |0> at 1/t2, plus optional
  /// depolarization. t2 <= 0 or infinite disables dephasing.
  static NoiseModel four_level(double t2, double depolarizing_rate = 0.0);

  bool empty() const { return ops_.empty(); }
  const std::vector<CollapseOperator>& operators() const { return ops_; }

 private:
  std::vector<CollapseOperator> ops_;
};

/// Time-ordered propagator over the whole interval, step-halved until two
/// successive refinements differ by less than opts.tol (Frobenius norm).
Operator propagate_unitary(const TimeDependentHamiltonian& h, const PropagationOptions& opts = {});
Operator propagate_unitary(const HamiltonianModel& model, double tol = 1e-9);

struct UnitaryTrajectory {
  std::vector<double> times;
  std::vector<Operator> propagators;  // U(t_k, t_begin)
};

/// Propagators at n_intervals + 1 uniformly spaced times.
UnitaryTrajectory propagate_unitary_trajectory(const TimeDependentHamiltonian& h, int n_intervals,
                                               const PropagationOptions& opts = {});

/// Superoperator of dρ/dt = -i[H,ρ] + Σ γ_k (L ρ L† - ½{L†L, ρ}).
Matrix lindbladian(const Matrix& h, const NoiseModel& noise);

/// Full Lindblad propagator as a channel, converged like propagate_unitary.
Channel lindblad_channel(const TimeDependentHamiltonian& h, const NoiseModel& noise,
                         const PropagationOptions& opts = {});

struct LindbladTrajectory {
  std::vector<double> times;
  std::vector<Matrix> states;
  DensityMatrix final_state() const { return DensityMatrix(states.back()); }
};

LindbladTrajectory propagate_lindblad(const DensityMatrix& rho0, const TimeDependentHamiltonian& h,
                                      const NoiseModel& noise, int n_intervals,
                                      const PropagationOptions& opts = {});
LindbladTrajectory propagate_lindblad(const DensityMatrix& rho0, const HamiltonianModel& model,
                                      const NoiseModel& noise, double tol = 1e-8,
                                      int n_intervals = 200);

struct FrameStates {
  StateVector bright;
  StateVector dark1;
  double theta;
  double phi;
};

FrameStates frame_states(double theta, double phi);

/// |d2(t)> on the loop, with the interval's bright-tone phase.
StateVector dark_path_state(double t, const LoopSchedule& loop, const FrameStates& frame);

/// Bright-frame form (Ω/2)e^{-iφ0}|b><a| + (Ω2/2)|2><a| + h.c., written in the level basis.
Operator bright_frame_hamiltonian(double t, const LoopSchedule& loop, const FrameStates& frame);

struct PopulationTrace {
  std::vector<double> times;
  std::vector<std::array<double, 4>> populations;  // p0, p1, p2, pa
  std::vector<std::array<double, 3>> coherences;   // |rho01|, |rho0a|, |rho1a|
};

PopulationTrace population_trace(const StateVector& psi0, const HamiltonianModel& model,
                                 const std::optional<NoiseModel>& noise = std::nullopt,
                                 int n_intervals = 200, double tol = 1e-9);

/// Replaces every population vector by the frequencies of a `shots`-draw
/// multinomial sample; time point k uses derive_seed(seed, k).
PopulationTrace sample_population_trace(const PopulationTrace& exact, int shots,
                                        std::uint64_t seed);

/// CSV: t_s,p0,p1,p2,pa[,c01,c0a,c1a]
void write_trajectory_csv(std::ostream& os, const PopulationTrace& trace, bool coherences = false);

}  // namespace darkloop

#endif  // DARKLOOP_DYNAMICS_HPP_
