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

#ifndef DARKLOOP_TWO_QUBIT_HPP_
#define DARKLOOP_TWO_QUBIT_HPP_

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "darkloop/core.hpp"
#include "darkloop/dynamics.hpp"
#include "darkloop/pulse.hpp"

namespace darkloop {

/// Single driven spin transition coupled to one motional mode; spin is the
/// slow tensor index, |g> = 0, |e> = 1.
struct SpinPhononModel {
  double lamb_dicke = 0.1;
  double trap_frequency = 2.0 * kPi * 2.4e6;  // rad/s
  double detuning = 0.0;                      // rad/s
  double rabi = 2.0 * kPi * 1e4;              // rad/s
  double phase = 0.0;                         // rad
  int fock_levels = 5;

  void validate() const;
  int dim() const { return 2 * fock_levels; }
  int index(int spin, int phonons) const { return spin * fock_levels + phonons; }
};

Operator annihilation(int fock_levels);

/// Interaction-picture spin-phonon Hamiltonian (hbar = 1):
/// (Ω0/2) σ+ {1 + iη(a e^{-iνt} + a† e^{iνt})} e^{i(φ - δt)} + h.c.
Operator sideband_hamiltonian(const SpinPhononModel& model, double t);
TimeDependentHamiltonian sideband_generator(const SpinPhononModel& model, double duration);

struct SidebandEvolution {
  std::vector<double> times;
  std::vector<std::vector<double>> populations;  // per basis index
  double max_top_fock_population = 0.0;
};

/// Populations on n_intervals + 1 uniform times over [0, duration].
SidebandEvolution sideband_evolution(const SpinPhononModel& model, const StateVector& psi0,
                                     double duration, int n_intervals);

/// Fits P(t) = d + c (1 - cos ωt)/2 to a population curve; returns ω.
double fit_oscillation_frequency(const std::vector<double>& times,
                                 const std::vector<double>& values, double omega_guess);

/// Oscillation frequency of |g,n> -> |e,n+1> on the blue sideband (δ = +ν).
struct SidebandMeasurement {
  double frequency;
  double expected;  // η Ω0 sqrt(n+1)
  double max_top_fock_population;
};
SidebandMeasurement measure_blue_sideband(const SpinPhononModel& model, int phonons = 0,
                                          double periods = 2.0);

/// Ordered basis (|00p>,|01p>,|10p>,|11p>) then auxiliary (|a0p>,|20p>).
namespace cz {
inline constexpr int k00 = 0;
inline constexpr int k01 = 1;
inline constexpr int k10 = 2;
inline constexpr int k11 = 3;
inline constexpr int kA0 = 4;
inline constexpr int k20 = 5;
inline constexpr int kDim = 6;
}  // namespace cz

std::vector<std::string> cz_labels();

/// ½Ω1 e^{-iφ(t)}|11p><a0p| + ½Ω2|20p><a0p| + h.c. with Ω1, Ω2 from the
/// dark-path inverse engineering at θ = 0 and φ(t) the interval phase.
Operator effective_cz_hamiltonian(const LoopSchedule& loop, double t);
TimeDependentHamiltonian effective_cz_generator(const LoopSchedule& loop);

struct ControlledPhaseResult {
  Eigen::Matrix4cd block;
  double leakage = 0.0;
  Operator full_propagator;
  double duration = 0.0;
};

ControlledPhaseResult controlled_phase_gate(double gamma, DriveBudget budget, double tol = 1e-9,
                                            double eta = 4.0);

/// CSV: row,c0_re,c0_im,...,c3_re,c3_im then a leakage line.
void write_cz_csv(std::ostream& os, const ControlledPhaseResult& result);

}  // namespace darkloop

#endif  // DARKLOOP_TWO_QUBIT_HPP_
