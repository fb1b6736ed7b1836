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

#ifndef DARKLOOP_CORE_HPP_
#define DARKLOOP_CORE_HPP_

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace darkloop {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Tolerances shared across modules. Per-operation comparison levels live
/// next to the operations that use them.
namespace tol {
inline constexpr double kStructural = 1e-10;
inline constexpr double kUnitary = 1e-8;
inline constexpr double kPositivity = 1e-9;
}  // namespace tol

/// Level indices of the single-ion space. The qubit occupies 0 and 1.
namespace level {
inline constexpr int k0 = 0;
inline constexpr int k1 = 1;
inline constexpr int k2 = 2;
inline constexpr int kA = 3;
inline constexpr int kCount = 4;
}  // namespace level

std::vector<std::string> four_level_labels();

/// Square complex matrix acting on a Hilbert space of runtime dimension.
class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix m);

  static Operator identity(int dim);
  static Operator zero(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

  Operator adjoint() const { return Operator(m_.adjoint()); }
  bool is_unitary(double tolerance = tol::kUnitary) const;
  bool is_hermitian(double tolerance = tol::kStructural) const;

  friend Operator operator*(const Operator& a, const Operator& b) {
    return Operator(a.m_ * b.m_);
  }
  friend Operator operator+(const Operator& a, const Operator& b) {
    return Operator(a.m_ + b.m_);
  }
  friend Operator operator*(cplx s, const Operator& a) { return Operator(s * a.m_); }

 private:
  Matrix m_;
};

/// Normalized pure state with optional basis labels.
class StateVector {
 public:
  StateVector() = default;
  /// Throws std::invalid_argument unless the amplitudes have unit norm.
  explicit StateVector(Vector amplitudes, std::vector<std::string> labels = {});

  static StateVector normalized(Vector amplitudes, std::vector<std::string> labels = {});
  static StateVector basis(int dim, int index, std::vector<std::string> labels = {});

  int dim() const { return static_cast<int>(amp_.size()); }
  const Vector& amplitudes() const { return amp_; }
  const std::vector<std::string>& labels() const { return labels_; }
  cplx operator[](int i) const { return amp_(i); }

  /// <this|other>
  cplx inner(const StateVector& other) const;
  double population(int i) const { return std::norm(amp_(i)); }

 private:
  Vector amp_;
  std::vector<std::string> labels_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Validates the invariants; throws std::invalid_argument on violation.
  explicit DensityMatrix(Matrix rho);

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Matrix& matrix() const { return rho_; }
  cplx operator()(int i, int j) const { return rho_(i, j); }
  double population(int i) const { return rho_(i, i).real(); }

 private:
  Matrix rho_;
};

/// Kronecker product with `a` as the slow index.
Operator tensor(const Operator& a, const Operator& b);
StateVector tensor(const StateVector& a, const StateVector& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
Matrix kron(const Matrix& a, const Matrix& b);

/// |Tr(U^dag V)| / d for unitaries of equal dimension; insensitive to global phase.
double operator_fidelity(const Operator& u, const Operator& v);

/// |Tr(A^dag B)| / d without the unitarity precondition.
double trace_overlap(const Matrix& a, const Matrix& b);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// {I, sigma_x, sigma_y, sigma_z}.
const std::array<Eigen::Matrix2cd, 4>& pauli_basis();

/// Coefficients c_k with M = sum_k c_k P_k over pauli_basis().
std::array<cplx, 4> pauli_decompose(const Operator& m);
Operator pauli_reconstruct(const std::array<cplx, 4>& coeffs);

enum class Subsystem { kA, kB };

/// Traces out one factor of a dim_a x dim_b bipartite density matrix.
DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b, Subsystem keep);

/// Hermitian matrix functions via eigendecomposition.
Matrix hermitian_sqrt(const Matrix& h);
/// exp(-i * h * dt) for Hermitian h; exactly unitary up to rounding.
Matrix unitary_exp(const Matrix& h, double dt);

}  // namespace darkloop

#endif  // DARKLOOP_CORE_HPP_
