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

#ifndef DARKLOOP_CHANNEL_HPP_
#define DARKLOOP_CHANNEL_HPP_

#include "darkloop/core.hpp"

namespace darkloop {

/// Linear map on d x d matrices stored as a d^2 x d^2 superoperator acting
/// on column-stacked vec(rho), so vec(A X B) = (B^T kron A) vec(X).
class Channel {
 public:
  Channel() = default;
  Channel(int dim, Matrix superoperator);

  static Channel identity(int dim);
  static Channel from_unitary(const Matrix& u);
  /// rho -> (1-p) rho + p * (1/4) sum_P P rho P^dag, with P the Paulis on
  /// levels {0,1} extended by the identity on any remaining levels.
  static Channel qubit_depolarizing(int dim, double p);

  int dim() const { return dim_; }
  const Matrix& superoperator() const { return s_; }

  Matrix apply(const Matrix& rho) const;
  DensityMatrix apply(const DensityMatrix& rho) const;

  /// Equivalent to applying `first`, then `*this`.
  Channel after(const Channel& first) const;

 private:
  int dim_ = 0;
  Matrix s_;
};

Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, int dim);

/// Upper-left 2x2 block of a matrix on a space whose qubit sits at levels 0,1.
Eigen::Matrix2cd qubit_block(const Matrix& m);

/// Embeds a 2x2 qubit operator into `dim` levels (zero elsewhere).
Matrix embed_qubit(const Eigen::Matrix2cd& m, int dim);

/// Average gate fidelity of `channel` restricted to the qubit levels against
/// the 2x2 unitary `target`, computed as the mean state fidelity over the six
/// axis eigenstates. Population leaving the qubit levels counts as error.
double average_gate_fidelity(const Channel& channel, const Eigen::Matrix2cd& target);

}  // namespace darkloop

#endif  // DARKLOOP_CHANNEL_HPP_
