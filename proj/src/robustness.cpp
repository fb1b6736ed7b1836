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

#include "darkloop/robustness.hpp"

#include <ostream>

#include <fmt/format.h>

#include "darkloop/gates.hpp"
#include "darkloop/parallel.hpp"

namespace darkloop {

std::vector<double> default_epsilon_grid() {
  return {-0.10, -0.08, -0.06, -0.04, -0.02, 0.0, 0.02, 0.04, 0.06, 0.08, 0.10};
}

std::vector<SweepRow> robustness_sweep(const SweepConfig& cfg) {
  const std::vector<double> eps = cfg.epsilons.empty() ? default_epsilon_grid() : cfg.epsilons;
  std::vector<SweepRow> rows;
  for (const auto& g : cfg.gates) {
    for (double eta : cfg.etas) {
      for (double e : eps) rows.push_back({g, eta, e, 0.0});
    }
  }
  parallel_for(rows.size(), cfg.threads, [&](size_t k) {
    SweepRow& row = rows[k];
    const GateSpec spec = named_gate(row.gate, row.eta, PeakRabi{cfg.peak_rabi});
    RealizeOptions opts;
    opts.norm = cfg.norm;
    opts.epsilon = row.epsilon;
    opts.tol = cfg.tol;
    const Operator target = target_unitary(named_gate_angles(row.gate));
    if (cfg.noise && !cfg.noise->empty()) {
      row.fidelity = gate_fidelity(realize_noisy(spec, *cfg.noise, opts).channel, target);
    } else {
      const RealizedGate g = realize(spec, opts);
      row.fidelity = gate_fidelity(Channel::from_unitary(g.full_propagator.matrix()), target);
    }
  });
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "gate,eta,epsilon,fidelity\n";
  for (const auto& r : rows) {
    os << fmt::format("{},{:.12g},{:.12g},{:.12g}\n", r.gate, r.eta, r.epsilon, r.fidelity);
  }
}

}  // namespace darkloop
