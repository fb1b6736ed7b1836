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

#ifndef DARKLOOP_TOMOGRAPHY_HPP_
#define DARKLOOP_TOMOGRAPHY_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>

#include "darkloop/channel.hpp"
#include "darkloop/core.hpp"

namespace darkloop {

struct ShotConfig {
  int shots = 2000;
  std::uint64_t seed = 0;
  /// Symmetric readout flip probability; 0 is ideal projective readout.
  double readout_error = 0.0;
};

/// |0>, |1>, (|0>±|1>)/√2, (|0>±i|1>)/√2 in that order.
const std::array<StateVector, 6>& basis_states();

enum class Axis { kX = 0, kY = 1, kZ = 2 };

/// Projector onto the +1 (outcome 0) or -1 (outcome 1) eigenstate of an axis.
Eigen::Matrix2cd axis_projector(Axis axis, int outcome);

struct AxisCounts {
  std::int64_t plus = 0;   // outcome 0
  std::int64_t minus = 0;  // outcome 1
};

/// Counts or exact frequencies per axis. Frequencies are stored as weights;
/// the estimators only use ratios.
struct TomographyData {
  std::array<double, 3> plus{};
  std::array<double, 3> minus{};
};

/// Projective measurement along `axis`; deterministic for a given engine state.
AxisCounts sample_measurement(const DensityMatrix& rho, Axis axis, int shots, std::mt19937_64& rng,
                              double readout_error = 0.0);
AxisCounts sample_measurement(const DensityMatrix& rho, Axis axis, const ShotConfig& cfg);

TomographyData measure_all_axes(const DensityMatrix& rho, int shots, std::mt19937_64& rng,
                                double readout_error = 0.0);

/// Probability of reporting outcome 0 when the true probability is p.
double with_readout_error(double p, double readout_error);
/// Infinite-shot limit: the exact outcome probabilities.
TomographyData exact_probabilities(const DensityMatrix& rho);

struct MleOptions {
  double likelihood_tol = 1e-10;
  int max_iterations = 10000;
};

/// Maximum-likelihood qubit state from three-axis data (iterative R rho R).
/// Throws std::invalid_argument for all-zero data.
DensityMatrix state_mle(const TomographyData& data, const MleOptions& opts = {});

/// Process matrix in the Pauli basis {I,X,Y,Z}: E(ρ) = Σ χ_mn P_m ρ P_n†, Tr χ = 1.
struct ProcessMatrix {
  Eigen::Matrix4cd chi;
};

ProcessMatrix chi_from_unitary(const Eigen::Matrix2cd& u);
/// Qubit map rho -> sum chi_mn P_m rho P_n^dag.
Eigen::Matrix2cd apply_chi(const ProcessMatrix& p, const Eigen::Matrix2cd& rho);
/// |Tr(χ_exp χ_the†)|
double process_fidelity(const ProcessMatrix& measured, const ProcessMatrix& ideal);

/// Least-squares χ from the outputs of the six basis states.
ProcessMatrix chi_linear_inversion(const std::array<Eigen::Matrix2cd, 6>& outputs);

/// Qubit output of a channel for a given qubit input (leaked weight dropped,
/// remaining block renormalized).
using QubitProcess = std::function<Eigen::Matrix2cd(const Eigen::Matrix2cd&)>;
QubitProcess qubit_process(const Channel& channel);

struct QptResult {
  ProcessMatrix chi;
  double fidelity = 0.0;
  std::array<DensityMatrix, 6> outputs;  // reconstructed output states
  std::array<TomographyData, 6> data;
  bool projected = false;  // true when the CPTP projection changed the estimate
};

/// Full process tomography of `process` against the ideal unitary `target`.
/// `shots` empty means the infinite-shot limit.
QptResult qpt(const QubitProcess& process, const Eigen::Matrix2cd& target,
              const std::optional<ShotConfig>& shots, const MleOptions& opts = {});

/// χ as two 4x4 CSV blocks (real, then imaginary) followed by the fidelity.
void write_chi_csv(std::ostream& os, const ProcessMatrix& chi, double fidelity);

}  // namespace darkloop

#endif  // DARKLOOP_TOMOGRAPHY_HPP_
