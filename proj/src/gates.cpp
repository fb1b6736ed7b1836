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

#include "darkloop/gates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

namespace darkloop {

Operator target_unitary(double theta, double phi, double gamma) {
  const auto& p = pauli_basis();
  const Eigen::Matrix2cd n_sigma = std::sin(theta) * std::cos(phi) * p[1] +
                                   std::sin(theta) * std::sin(phi) * p[2] +
                                   std::cos(theta) * p[3];
  // n·σ squares to I, so the exponential is exact in closed form.
  const Eigen::Matrix2cd rot =
      std::cos(0.5 * gamma) * p[0] - kI * std::sin(0.5 * gamma) * n_sigma;
  return Operator(Matrix(std::exp(kI * (0.5 * gamma)) * rot));
}

Operator target_unitary(const GateAngles& a) { return target_unitary(a.theta, a.phi, a.gamma); }

GateAngles named_gate_angles(std::string_view name) {
  if (name == "X") return {kPi / 2, 0.0, kPi};
  if (name == "H") return {kPi / 4, 0.0, kPi};
  if (name == "T") return {0.0, 0.0, kPi / 4};
  if (name == "S") return {0.0, 0.0, kPi / 2};
  if (name == "Z") return {0.0, 0.0, kPi};
  throw std::invalid_argument("unknown gate name: " + std::string(name));
}

GateSpec named_gate(std::string_view name, double eta, DriveBudget budget) {
  const GateAngles a = named_gate_angles(name);
  return GateSpec(a.theta, a.phi, a.gamma, eta, budget);
}

RealizedGate realize_schedule(const PulseSchedule& schedule, double tol) {
  const HamiltonianModel model(schedule);
  RealizedGate g;
  g.full_propagator = propagate_unitary(model, tol);
  g.qubit_block = qubit_block(g.full_propagator.matrix());
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(g.qubit_block);
  const double smin = svd.singularValues().minCoeff();
  g.leakage = std::clamp(1.0 - smin * smin, 0.0, 1.0);
  g.duration = schedule.duration();
  return g;
}

RealizedGate realize(const GateSpec& spec, const RealizeOptions& opts) {
  PulseSchedule schedule = synthesize(spec, opts.n_samples, opts.norm);
  if (opts.epsilon != 0.0) schedule = inject_rabi_error(schedule, opts.epsilon);
  return realize_schedule(schedule, opts.tol);
}

NoisyGate realize_noisy(const GateSpec& spec, const NoiseModel& noise, const RealizeOptions& opts) {
  PulseSchedule schedule = synthesize(spec, opts.n_samples, opts.norm);
  if (opts.epsilon != 0.0) schedule = inject_rabi_error(schedule, opts.epsilon);
  const HamiltonianModel model(schedule);
  PropagationOptions popts;
  popts.tol = opts.tol;
  if (noise.empty()) {
    return {Channel::from_unitary(propagate_unitary(model.generator(), popts).matrix()),
            schedule.duration()};
  }
  return {lindblad_channel(model.generator(), noise, popts), schedule.duration()};
}

double gate_fidelity(const RealizedGate& g, const Operator& target) {
  if (target.dim() != 2) throw std::invalid_argument("gate target must be a qubit operator");
  return std::min(1.0, trace_overlap(target.matrix(), g.qubit_block));
}

double gate_fidelity(const Channel& channel, const Operator& target) {
  if (target.dim() != 2) throw std::invalid_argument("gate target must be a qubit operator");
  if (channel.dim() < 2) throw std::invalid_argument("channel has no qubit subspace");
  return average_gate_fidelity(channel, target.matrix());
}

}  // namespace darkloop
