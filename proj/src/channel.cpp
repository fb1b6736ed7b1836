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

#include "darkloop/channel.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace darkloop {

Channel::Channel(int dim, Matrix superoperator) : dim_(dim), s_(std::move(superoperator)) {
  if (dim_ < 1 || s_.rows() != dim_ * dim_ || s_.cols() != dim_ * dim_) {
    throw std::invalid_argument(fmt::format("superoperator shape {}x{} does not match dim {}",
                                            s_.rows(), s_.cols(), dim_));
  }
}

Channel Channel::identity(int dim) { return Channel(dim, Matrix::Identity(dim * dim, dim * dim)); }

Channel Channel::from_unitary(const Matrix& u) {
  return Channel(static_cast<int>(u.rows()), kron(u.conjugate(), u));
}

Channel Channel::qubit_depolarizing(int dim, double p) {
  if (dim < 2) throw std::invalid_argument("qubit_depolarizing requires dim >= 2");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarizing probability outside [0,1]");
  Matrix twirl = Matrix::Zero(dim * dim, dim * dim);
  for (const auto& pauli : pauli_basis()) {
    Matrix full = Matrix::Identity(dim, dim);
    full.topLeftCorner(2, 2) = pauli;
    twirl += kron(full.conjugate(), full);
  }
  twirl /= 4.0;
  return Channel(dim, (1.0 - p) * Matrix::Identity(dim * dim, dim * dim) + p * twirl);
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, int dim) { return Eigen::Map<const Matrix>(v.data(), dim, dim); }

Matrix Channel::apply(const Matrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) {
    throw std::invalid_argument("channel input has the wrong dimension");
  }
  return unvec(s_ * vec(rho), dim_);
}

DensityMatrix Channel::apply(const DensityMatrix& rho) const {
  Matrix out = apply(rho.matrix());
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

Channel Channel::after(const Channel& first) const {
  if (first.dim_ != dim_) throw std::invalid_argument("channel composition dimension mismatch");
  return Channel(dim_, s_ * first.s_);
}

Eigen::Matrix2cd qubit_block(const Matrix& m) { return m.topLeftCorner(2, 2); }

Matrix embed_qubit(const Eigen::Matrix2cd& m, int dim) {
  Matrix out = Matrix::Zero(dim, dim);
  out.topLeftCorner(2, 2) = m;
  return out;
}

double average_gate_fidelity(const Channel& channel, const Eigen::Matrix2cd& target) {
  const double r = 1.0 / std::sqrt(2.0);
  const std::array<Eigen::Vector2cd, 6> inputs = {
      Eigen::Vector2cd(1, 0),     Eigen::Vector2cd(0, 1),      Eigen::Vector2cd(r, r),
      Eigen::Vector2cd(r, -r),    Eigen::Vector2cd(r, kI * r), Eigen::Vector2cd(r, -kI * r)};
  double sum = 0.0;
  for (const auto& psi : inputs) {
    Matrix rho = embed_qubit(psi * psi.adjoint(), channel.dim());
    const Eigen::Matrix2cd out = qubit_block(channel.apply(rho));
    const Eigen::Vector2cd expected = target * psi;
    sum += (expected.adjoint() * out * expected)(0, 0).real();
  }
  return sum / 6.0;
}

}  // namespace darkloop
