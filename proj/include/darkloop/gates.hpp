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

#ifndef DARKLOOP_GATES_HPP_
#define DARKLOOP_GATES_HPP_

#include <string_view>

#include "darkloop/channel.hpp"
#include "darkloop/core.hpp"
#include "darkloop/dynamics.hpp"
#include "darkloop/pulse.hpp"

namespace darkloop {

struct GateAngles {
  double theta;
  double phi;
  double gamma;
};

/// e^{iγ/2} exp(-i γ/2 n·σ) with n = (sinθ cosφ, sinθ sinφ, cosθ).
Operator target_unitary(double theta, double phi, double gamma);
Operator target_unitary(const GateAngles& a);

/// Angles of X, H, T, S (and Z). Throws std::invalid_argument otherwise.
GateAngles named_gate_angles(std::string_view name);
GateSpec named_gate(std::string_view name, double eta, DriveBudget budget);

/// Propagator of one loop restricted to the qubit levels.
struct RealizedGate {
  Eigen::Matrix2cd qubit_block;
  double leakage = 0.0;  // 1 - (smallest singular value of the block)^2
  Operator full_propagator;
  double duration = 0.0;
};

struct RealizeOptions {
  int n_samples = kDefaultSamples;
  PeakNorm norm = PeakNorm::kComposite;
  double epsilon = 0.0;  // Rabi amplitude error
  double tol = 1e-9;
};

RealizedGate realize(const GateSpec& spec, const RealizeOptions& opts = {});
RealizedGate realize_schedule(const PulseSchedule& schedule, double tol = 1e-9);

/// Open-system realization: the four-level channel of one loop.
struct NoisyGate {
  Channel channel;
  double duration = 0.0;
};

NoisyGate realize_noisy(const GateSpec& spec, const NoiseModel& noise,
                        const RealizeOptions& opts = {});

/// |Tr(target† block)| / 2, insensitive to global phase.
double gate_fidelity(const RealizedGate& g, const Operator& target);
/// Six-state average gate fidelity of the channel's qubit restriction.
double gate_fidelity(const Channel& channel, const Operator& target);

}  // namespace darkloop

#endif  // DARKLOOP_GATES_HPP_
