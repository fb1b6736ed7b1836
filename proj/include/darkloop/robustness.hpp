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

#ifndef DARKLOOP_ROBUSTNESS_HPP_
#define DARKLOOP_ROBUSTNESS_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "darkloop/dynamics.hpp"
#include "darkloop/pulse.hpp"

namespace darkloop {

struct SweepConfig {
  std::vector<std::string> gates = {"X", "H", "T", "S"};
  std::vector<double> etas = {0.0, 4.0};
  std::vector<double> epsilons;
  double peak_rabi = 2.0 * 3.14159265358979323846 * 1e4;
  PeakNorm norm = PeakNorm::kComposite;
  std::optional<NoiseModel> noise;
  double tol = 1e-9;
  unsigned threads = 1;
};

/// ±0.02 ... ±0.10 in steps of 0.02 plus 0, sorted ascending.
std::vector<double> default_epsilon_grid();

struct SweepRow {
  std::string gate;
  double eta;
  double epsilon;
  double fidelity;  // six-state average gate fidelity against the ideal rotation
};

/// Every (gate, eta, epsilon) at the same peak drive; rows in gate, eta,
/// epsilon order regardless of scheduling.
std::vector<SweepRow> robustness_sweep(const SweepConfig& cfg);

/// CSV: gate,eta,epsilon,fidelity
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace darkloop

#endif  // DARKLOOP_ROBUSTNESS_HPP_
