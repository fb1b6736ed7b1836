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

#include "darkloop/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace darkloop {

std::vector<std::string> four_level_labels() { return {"0", "1", "2", "a"}; }

Operator::Operator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw std::invalid_argument("Operator must be a non-empty square matrix");
  }
}

Operator Operator::identity(int dim) { return Operator(Matrix::Identity(dim, dim)); }

Operator Operator::zero(int dim) { return Operator(Matrix::Zero(dim, dim)); }

bool Operator::is_unitary(double tolerance) const {
  return (m_.adjoint() * m_ - Matrix::Identity(dim(), dim())).norm() <= tolerance;
}

bool Operator::is_hermitian(double tolerance) const {
  return (m_ - m_.adjoint()).norm() <= tolerance;
}

StateVector::StateVector(Vector amplitudes, std::vector<std::string> labels)
    : amp_(std::move(amplitudes)), labels_(std::move(labels)) {
  if (amp_.size() < 1) throw std::invalid_argument("StateVector must be non-empty");
  if (std::abs(amp_.squaredNorm() - 1.0) > tol::kStructural) {
    throw std::invalid_argument(
        fmt::format("StateVector is not normalized (norm^2 = {:.3e})", amp_.squaredNorm()));
  }
  if (!labels_.empty() && static_cast<int>(labels_.size()) != dim()) {
    throw std::invalid_argument("StateVector label count does not match dimension");
  }
}

StateVector StateVector::normalized(Vector amplitudes, std::vector<std::string> labels) {
  const double n = amplitudes.norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize a zero vector");
  return StateVector(amplitudes / n, std::move(labels));
}

StateVector StateVector::basis(int dim, int index, std::vector<std::string> labels) {
  if (index < 0 || index >= dim) throw std::out_of_range("basis index out of range");
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return StateVector(std::move(v), std::move(labels));
}

cplx StateVector::inner(const StateVector& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("inner product dimension mismatch");
  return amp_.dot(other.amp_);  // conjugates the left operand
}

DensityMatrix::DensityMatrix(Matrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() < 1) {
    throw std::invalid_argument("DensityMatrix must be a non-empty square matrix");
  }
  if ((rho_ - rho_.adjoint()).norm() > tol::kStructural) {
    throw std::invalid_argument("DensityMatrix is not Hermitian");
  }
  if (std::abs(rho_.trace() - 1.0) > tol::kStructural) {
    throw std::invalid_argument(
        fmt::format("DensityMatrix trace is {:.12g}, expected 1", rho_.trace().real()));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol::kPositivity) {
    throw std::invalid_argument(fmt::format("DensityMatrix has negative eigenvalue {:.3e}",
                                            es.eigenvalues().minCoeff()));
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const Vector& v = psi.amplitudes();
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Operator tensor(const Operator& a, const Operator& b) {
  return Operator(kron(a.matrix(), b.matrix()));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  Vector v(a.dim() * b.dim());
  for (int i = 0; i < a.dim(); ++i) v.segment(i * b.dim(), b.dim()) = a[i] * b.amplitudes();
  std::vector<std::string> labels;
  if (!a.labels().empty() && !b.labels().empty()) {
    for (const auto& la : a.labels()) {
      for (const auto& lb : b.labels()) labels.push_back(la + lb);
    }
  }
  return StateVector::normalized(std::move(v), std::move(labels));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

double trace_overlap(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("trace overlap dimension mismatch");
  }
  return std::abs((a.adjoint() * b).trace()) / static_cast<double>(a.rows());
}

double operator_fidelity(const Operator& u, const Operator& v) {
  if (u.dim() != v.dim()) {
    throw std::invalid_argument(
        fmt::format("operator_fidelity dimension mismatch ({} vs {})", u.dim(), v.dim()));
  }
  if (!u.is_unitary() || !v.is_unitary()) {
    throw std::invalid_argument("operator_fidelity requires unitary operands");
  }
  return std::min(1.0, trace_overlap(u.matrix(), v.matrix()));
}

Matrix hermitian_sqrt(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  // Eigenvalues at rounding level are zero; their square roots would not be.
  const double floor = 64 * std::numeric_limits<double>::epsilon() *
                       std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) ev(k) = ev(k) <= floor ? 0.0 : std::sqrt(ev(k));
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix unitary_exp(const Matrix& h, double dt) {
  // Small steps: the Taylor series reaches rounding level in a handful of
  // products, far cheaper than a Hermitian eigensolve.
  const Matrix a = -kI * dt * h;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 <= 0.25) {
    Matrix result = Matrix::Identity(h.rows(), h.cols());
    Matrix term = result;
    double bound = 1.0;
    for (int k = 1; k <= 30 && bound > 1e-18; ++k) {
      term = (term * a) / static_cast<double>(k);
      result += term;
      bound *= norm1 / k;
    }
    return result;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases = (-kI * dt * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("state_fidelity dimension mismatch");
  // Tr sqrt(sqrt(rho) sigma sqrt(rho)) is the trace norm of sqrt(rho) sqrt(sigma).
  // Singular values avoid taking square roots of rounding-level eigenvalues.
  const Matrix m = hermitian_sqrt(rho.matrix()) * hermitian_sqrt(sigma.matrix());
  const double root_sum = Eigen::JacobiSVD<Matrix>(m).singularValues().sum();
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

const std::array<Eigen::Matrix2cd, 4>& pauli_basis() {
  static const std::array<Eigen::Matrix2cd, 4> basis = [] {
    std::array<Eigen::Matrix2cd, 4> p;
    p[0] << 1, 0, 0, 1;
    p[1] << 0, 1, 1, 0;
    p[2] << 0, -kI, kI, 0;
    p[3] << 1, 0, 0, -1;
    return p;
  }();
  return basis;
}

std::array<cplx, 4> pauli_decompose(const Operator& m) {
  if (m.dim() != 2) throw std::invalid_argument("pauli_decompose requires a 2x2 operator");
  std::array<cplx, 4> c{};
  for (int k = 0; k < 4; ++k) c[k] = (pauli_basis()[k] * m.matrix()).trace() / 2.0;
  return c;
}

Operator pauli_reconstruct(const std::array<cplx, 4>& coeffs) {
  Matrix m = Matrix::Zero(2, 2);
  for (int k = 0; k < 4; ++k) m += coeffs[k] * pauli_basis()[k];
  return Operator(std::move(m));
}

DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b, Subsystem keep) {
  if (dim_a < 1 || dim_b < 1 || dim_a * dim_b != rho.dim()) {
    throw std::invalid_argument(fmt::format(
        "partial_trace: dimension {} does not factor as {} x {}", rho.dim(), dim_a, dim_b));
  }
  const Matrix& r = rho.matrix();
  if (keep == Subsystem::kA) {
    Matrix out = Matrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i) {
      for (int j = 0; j < dim_a; ++j) {
        for (int k = 0; k < dim_b; ++k) out(i, j) += r(i * dim_b + k, j * dim_b + k);
      }
    }
    return DensityMatrix(0.5 * (out + out.adjoint()));
  }
  Matrix out = Matrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_b; ++i) {
    for (int j = 0; j < dim_b; ++j) {
      for (int k = 0; k < dim_a; ++k) out(i, j) += r(k * dim_b + i, k * dim_b + j);
    }
  }
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

}  // namespace darkloop
