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

#include <doctest.h>

#include <random>

#include "darkloop/channel.hpp"
#include "darkloop/core.hpp"
#include "support/oracles.hpp"

using namespace darkloop;

namespace {

Matrix m2(cplx a, cplx b, cplx c, cplx d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const Matrix kX = m2(0, 1, 1, 0);
const Matrix kZ = m2(1, 0, 0, -1);
const double kS = 1.0 / std::sqrt(2.0);
const Matrix kH = m2(kS, kS, kS, -kS);

}  // namespace

TEST_CASE("tensor of identities and basis states") {
  CHECK(tensor(Operator::identity(2), Operator::identity(2)).matrix().isApprox(Matrix::Identity(4, 4)));
  const StateVector v = tensor(StateVector::basis(2, 0), StateVector::basis(2, 1));
  CHECK(v.dim() == 4);
  CHECK(std::abs(v[1] - 1.0) < 1e-15);
  CHECK(v.amplitudes().norm() == doctest::Approx(1.0));
}

TEST_CASE("sigma_z tensor identity is diag(1,1,-1,-1)") {
  Matrix expect = Matrix::Zero(4, 4);
  expect.diagonal() << 1, 1, -1, -1;
  CHECK((tensor(Operator(kZ), Operator::identity(2)).matrix() - expect).norm() < 1e-15);
}

TEST_CASE("tensor matches an explicit Kronecker loop and is associative") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = oracle::random_matrix(2, rng);
    const Matrix b = oracle::random_matrix(2, rng);
    const Matrix c = oracle::random_matrix(2, rng);
    CHECK((kron(a, b) - oracle::naive_kron(a, b)).norm() < 1e-12);
    const Operator left = tensor(tensor(Operator(a), Operator(b)), Operator(c));
    const Operator right = tensor(Operator(a), tensor(Operator(b), Operator(c)));
    CHECK((left.matrix() - right.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("operator_fidelity") {
  CHECK(operator_fidelity(Operator(kX), Operator(kX)) == doctest::Approx(1.0));
  CHECK(operator_fidelity(Operator(kX), Operator(std::exp(kI * kPi / 7.0) * kX)) ==
        doctest::Approx(1.0));
  CHECK(operator_fidelity(Operator::identity(2), Operator(kX)) == doctest::Approx(0.0));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix u = oracle::random_unitary(4, rng);
    const Matrix v = oracle::random_unitary(4, rng);
    const double f = operator_fidelity(Operator(u), Operator(v));
    const double g = operator_fidelity(Operator(std::exp(kI * phase(rng)) * u), Operator(v));
    CHECK(std::abs(f - g) < 1e-12);
    CHECK(std::abs(f - (1.0 - oracle::phase_distance(u, v))) < 1e-12);
  }
}

TEST_CASE("operator_fidelity rejects bad operands") {
  CHECK_THROWS_AS(operator_fidelity(Operator::identity(2), Operator::identity(4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(operator_fidelity(Operator(2.0 * kX), Operator(kX)), std::invalid_argument);
}

TEST_CASE("state_fidelity") {
  std::mt19937_64 rng(3);
  const DensityMatrix rho(oracle::random_density(3, rng));
  CHECK(state_fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
  const DensityMatrix zero = DensityMatrix::pure(StateVector::basis(2, 0));
  const DensityMatrix one = DensityMatrix::pure(StateVector::basis(2, 1));
  CHECK(state_fidelity(zero, one) == doctest::Approx(0.0));
  CHECK(state_fidelity(DensityMatrix::maximally_mixed(2), zero) == doctest::Approx(0.5));

  // Pure sigma reduces to <psi|rho|psi>.
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix r = oracle::random_density(3, rng);
    const Vector psi = oracle::random_unitary(3, rng).col(0);
    const double expect = (psi.adjoint() * r * psi)(0, 0).real();
    CHECK(state_fidelity(DensityMatrix(r), DensityMatrix::pure(StateVector(psi))) ==
          doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("invariants are enforced at construction") {
  Vector v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(StateVector{v}, std::invalid_argument);
  CHECK(StateVector::normalized(v).amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(DensityMatrix{kX}, std::invalid_argument);             // trace 0
  CHECK_THROWS_AS(DensityMatrix(m2(1.5, 0, 0, -0.5)), std::invalid_argument);  // negative
  CHECK_THROWS_AS(DensityMatrix(m2(0.5, 0.1, 0.2, 0.5)), std::invalid_argument);  // not Hermitian
  CHECK_THROWS_AS(StateVector::basis(2, 2), std::out_of_range);
}

TEST_CASE("pauli_decompose examples") {
  auto c = pauli_decompose(Operator(kX));
  CHECK(std::abs(c[0]) < 1e-15);
  CHECK(std::abs(c[1] - 1.0) < 1e-15);
  c = pauli_decompose(Operator::identity(2));
  CHECK(std::abs(c[0] - 1.0) < 1e-15);
  c = pauli_decompose(Operator(kH));
  CHECK(std::abs(c[0]) < 1e-15);
  CHECK(std::abs(c[1] - kS) < 1e-15);
  CHECK(std::abs(c[2]) < 1e-15);
  CHECK(std::abs(c[3] - kS) < 1e-15);
  CHECK_THROWS_AS(pauli_decompose(Operator::identity(4)), std::invalid_argument);
}

TEST_CASE("pauli decomposition round trip and projection formula") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = oracle::random_matrix(2, rng);
    const auto c = pauli_decompose(Operator(m));
    CHECK((pauli_reconstruct(c).matrix() - m).norm() < 1e-12);
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(c[k] - (oracle::pauli(k) * m).trace() / 2.0) < 1e-12);
    }
  }
}

TEST_CASE("partial_trace examples") {
  std::mt19937_64 rng(9);
  const Matrix ra = oracle::random_density(2, rng);
  const Matrix rb = oracle::random_density(3, rng);
  const DensityMatrix prod(oracle::naive_kron(ra, rb));
  CHECK((partial_trace(prod, 2, 3, Subsystem::kA).matrix() - ra).norm() < 1e-12);
  CHECK((partial_trace(prod, 2, 3, Subsystem::kB).matrix() - rb).norm() < 1e-12);

  Vector bell = Vector::Zero(4);
  bell(0) = kS;
  bell(3) = kS;
  const DensityMatrix reduced =
      partial_trace(DensityMatrix::pure(StateVector(bell)), 2, 2, Subsystem::kA);
  CHECK((reduced.matrix() - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-12);

  const DensityMatrix spin_phonon = tensor(DensityMatrix::pure(StateVector::basis(2, 0)),
                                           DensityMatrix::pure(StateVector::basis(3, 1)));
  CHECK((partial_trace(spin_phonon, 2, 3, Subsystem::kB).matrix() -
         DensityMatrix::pure(StateVector::basis(3, 1)).matrix())
            .norm() < 1e-15);
  CHECK_THROWS_AS(partial_trace(prod, 2, 2, Subsystem::kA), std::invalid_argument);
}

TEST_CASE("partial_trace preserves trace and positivity") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const DensityMatrix rho(oracle::random_density(6, rng));
    for (Subsystem keep : {Subsystem::kA, Subsystem::kB}) {
      const DensityMatrix r = partial_trace(rho, 2, 3, keep);
      CHECK(std::abs(r.matrix().trace() - 1.0) < 1e-12);
      Eigen::SelfAdjointEigenSolver<Matrix> es(r.matrix());
      CHECK(es.eigenvalues().minCoeff() > -1e-12);
    }
  }
}

TEST_CASE("unitary_exp matches a two-level closed form across step sizes") {
  // exp(-i t (w/2) sigma_x) = cos(wt/2) I - i sin(wt/2) sigma_x
  for (double wt : {1e-6, 0.01, 0.2, 1.0, 3.0, 25.0}) {
    const Matrix u = unitary_exp(0.5 * kX, wt);
    const Matrix expect = std::cos(wt / 2) * Matrix::Identity(2, 2) - kI * std::sin(wt / 2) * kX;
    CHECK((u - expect).norm() < 1e-14);
  }
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix g = oracle::random_matrix(5, rng);
    const Matrix h = g + g.adjoint();
    for (double dt : {1e-4, 1e-2, 1.0}) {
      const Matrix u = unitary_exp(h, dt);
      CHECK((u.adjoint() * u - Matrix::Identity(5, 5)).norm() < 1e-13);
      // Two half steps compose to one full step.
      CHECK((unitary_exp(h, dt / 2) * unitary_exp(h, dt / 2) - u).norm() < 1e-12);
    }
  }
}

TEST_CASE("qubit depolarizing channel has average fidelity 1 - p/2") {
  for (double p : {0.0, 0.01, 0.3, 1.0}) {
    const Channel c = Channel::qubit_depolarizing(2, p);
    const double brute = oracle::six_state_fidelity(
        [&](const oracle::Mat& rho) { return c.apply(Matrix(rho)); }, Matrix::Identity(2, 2));
    CHECK(brute == doctest::Approx(1.0 - p / 2).epsilon(1e-12));
    CHECK(average_gate_fidelity(c, Eigen::Matrix2cd::Identity()) ==
          doctest::Approx(1.0 - p / 2).epsilon(1e-12));
  }
  CHECK_THROWS_AS(Channel::qubit_depolarizing(2, 1.5), std::invalid_argument);
}

TEST_CASE("channel composition order") {
  const Channel x = Channel::from_unitary(kX);
  const Channel h = Channel::from_unitary(kH);
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1;
  const Matrix expect = kX * kH * rho * kH.adjoint() * kX.adjoint();
  CHECK((x.after(h).apply(rho) - expect).norm() < 1e-14);
}
