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

#ifndef DARKLOOP_BENCHMARKING_HPP_
#define DARKLOOP_BENCHMARKING_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "darkloop/channel.hpp"
#include "darkloop/gates.hpp"

namespace darkloop {

/// A single-qubit Clifford realized as one rotation, hence one holonomic loop.
struct CliffordElement {
  GateAngles angles;
  Eigen::Matrix2cd unitary;  // target_unitary(angles)
};

/// All 24 single-qubit Cliffords; index 0 is the identity.
const std::vector<CliffordElement>& clifford_group();

/// Index of a x b (apply b first) in clifford_group().
int clifford_compose(int a, int b);
int clifford_inverse(int a);
/// Index of the element equal to u up to global phase, or -1.
int clifford_find(const Eigen::Matrix2cd& u);

/// Rotation angles (θ, φ, γ) with U(θ, φ, γ) equal to u up to global phase.
GateAngles rotation_angles(const Eigen::Matrix2cd& u);

struct RBConfig {
  std::vector<int> lengths = {1, 2, 4, 8, 16, 32};
  int sequences_per_length = 20;
  std::optional<GateAngles> interleaved;
  std::uint64_t seed = 0;
  /// Shots per sequence; 0 records exact survival probabilities.
  int shots = 0;
  /// Symmetric readout flip probability applied to each survival measurement.
  double readout_error = 0.0;
  unsigned threads = 1;
};

struct FitResult {
  double a = 0.0;
  double r = 0.0;
  double b = 0.0;
  double residual = 0.0;  // sum of squared residuals
  std::vector<double> stddev;
  bool converged = false;
};

/// Least-squares fit of y = A r^m + B (Levenberg-Marquardt, 0 <= r <= 1),
/// started from A = 0.5, B = 0.5, r = 0.99.
FitResult fit_decay(const std::vector<int>& lengths, const std::vector<double>& values);

struct RBCurve {
  std::vector<int> lengths;
  std::vector<double> mean_survival;
  std::vector<double> stddev;
  int n_sequences = 0;
  FitResult fit;
};

struct RBResult {
  RBCurve reference;
  std::optional<RBCurve> interleaved;
};

/// Maps loop angles to the channel that realizes them (dimension >= 2, qubit
/// on levels 0 and 1).
using GateImplementation = std::function<Channel(const GateAngles&)>;

GateImplementation ideal_gate_implementation();

/// Random sequence of Clifford indices for work unit `counter`.
std::vector<int> rb_sequence(std::uint64_t seed, std::uint64_t counter, int length);

RBResult rb_run(const RBConfig& cfg, const GateImplementation& gate_impl);

struct RBFidelities {
  double average;  // 1 - (1 - r_ref)/2
  double gate;     // 1 - (1 - r_int/r_ref)/2
};

RBFidelities rb_fidelities(double r_ref, double r_int);

/// CSV: m,mean_survival,stddev,n_sequences
void write_rb_csv(std::ostream& os, const RBCurve& curve);

}  // namespace darkloop

#endif  // DARKLOOP_BENCHMARKING_HPP_
