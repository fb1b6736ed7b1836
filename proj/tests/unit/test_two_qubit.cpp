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

#include <sstream>

#include "darkloop/gates.hpp"
#include "darkloop/two_qubit.hpp"

using namespace darkloop;

namespace {

const double kPeak = 2 * kPi * 1e4;
constexpr double kT = 480e-6;

double spin_up(const SidebandEvolution& ev, const SpinPhononModel& m, size_t k) {
  double p = 0;
  for (int n = 0; n < m.fock_levels; ++n) p += ev.populations[k][m.index(1, n)];
  return p;
}

}  // namespace

TEST_CASE("annihilation operator") {
  const Matrix a = annihilation(4).matrix();
  CHECK(a(0, 1).real() == doctest::Approx(1.0));
  CHECK(a(2, 3).real() == doctest::Approx(std::sqrt(3.0)));
  // [a, a^dag] = 1 away from the truncation edge.
  const Matrix c = a * a.adjoint() - a.adjoint() * a;
  for (int n = 0; n < 3; ++n) CHECK(c(n, n).real() == doctest::Approx(1.0));
}

TEST_CASE("sideband Hamiltonian is Hermitian and validated") {
  SpinPhononModel m;
  m.detuning = m.trap_frequency;
  for (double t : {0.0, 1.3e-7, 4.1e-6}) {
    const Matrix h = sideband_hamiltonian(m, t).matrix();
    CHECK((h - h.adjoint()).norm() <= 1e-12 * h.norm());
  }
  SpinPhononModel bad = m;
  bad.lamb_dicke = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = m;
  bad.fock_levels = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("carrier Rabi oscillation is independent of phonon number") {
  SpinPhononModel m;
  m.lamb_dicke = 1e-9;
  m.rabi = 2 * kPi * 5e4;
  const double duration = 3 * 2 * kPi / m.rabi;
  for (int n : {0, 2}) {
    const SidebandEvolution ev =
        sideband_evolution(m, StateVector::basis(m.dim(), m.index(0, n)), duration, 60);
    for (size_t k = 0; k < ev.times.size(); ++k) {
      const double expect = std::pow(std::sin(m.rabi * ev.times[k] / 2), 2);
      CHECK(spin_up(ev, m, k) == doctest::Approx(expect).epsilon(1e-6));
    }
  }
}

TEST_CASE("blue sideband oscillates at eta * Omega") {
  SpinPhononModel m;
  m.rabi = m.trap_frequency / 20;
  const SidebandMeasurement blue = measure_blue_sideband(m);
  CHECK(blue.expected == doctest::Approx(0.1 * m.rabi));
  CHECK(std::abs(blue.frequency - blue.expected) <= 0.05 * blue.expected);
  CHECK(blue.max_top_fock_population < 1e-6);
  // Weaker drive: the off-resonant carrier matters less.
  m.rabi = m.trap_frequency / 100;
  const SidebandMeasurement weak = measure_blue_sideband(m);
  CHECK(std::abs(weak.frequency - weak.expected) <= 0.005 * weak.expected);
}

TEST_CASE("red sideband from the motional ground state barely transfers") {
  SpinPhononModel m;
  m.rabi = m.trap_frequency / 20;
  m.detuning = -m.trap_frequency;
  const double duration = 2 * 2 * kPi / (m.lamb_dicke * m.rabi);
  const SidebandEvolution ev =
      sideband_evolution(m, StateVector::basis(m.dim(), m.index(0, 0)), duration, 400);
  double worst = 0;
  for (size_t k = 0; k < ev.times.size(); ++k) worst = std::max(worst, spin_up(ev, m, k));
  CHECK(worst < 1e-2);
}

TEST_CASE("rotating-frame sideband solution agrees with direct time stepping") {
  SpinPhononModel m;
  m.rabi = m.trap_frequency / 20;
  m.detuning = m.trap_frequency;
  const double duration = 20e-6;
  const StateVector psi0 = StateVector::basis(m.dim(), m.index(0, 1));
  const SidebandEvolution ev = sideband_evolution(m, psi0, duration, 10);
  PropagationOptions opts;
  opts.tol = 1e-9;
  opts.initial_steps = 1024;
  const UnitaryTrajectory traj = propagate_unitary_trajectory(sideband_generator(m, duration), 10, opts);
  for (size_t k = 0; k < traj.times.size(); ++k) {
    const Vector psi = traj.propagators[k].matrix() * psi0.amplitudes();
    for (int j = 0; j < m.dim(); ++j) CHECK(std::norm(psi(j)) == doctest::Approx(ev.populations[k][j]).epsilon(1e-7));
  }
}

TEST_CASE("fit_oscillation_frequency on synthetic data") {
  std::vector<double> t, y;
  const double w = 1234.5;
  for (int k = 0; k <= 300; ++k) {
    t.push_back(k * 1e-5);
    y.push_back(0.02 + 0.9 * (1 - std::cos(w * t.back())) / 2);
  }
  CHECK(fit_oscillation_frequency(t, y, 1000.0) == doctest::Approx(w).epsilon(1e-8));
  CHECK_THROWS_AS(fit_oscillation_frequency({0, 1}, {0, 1}, 1.0), std::invalid_argument);
}

TEST_CASE("effective controlled-phase Hamiltonian") {
  const LoopSchedule loop(kT, 4.0, kPi);
  CHECK(effective_cz_hamiltonian(loop, 0.0).matrix().norm() < 1e-20);
  for (double t : {0.1 * kT, kT / 4, 0.7 * kT}) {
    const Matrix h = effective_cz_hamiltonian(loop, t).matrix();
    CHECK(h.row(cz::k00).norm() == 0.0);
    CHECK(h.row(cz::k01).norm() == 0.0);
    CHECK(h.row(cz::k10).norm() == 0.0);
    CHECK((h - h.adjoint()).norm() == 0.0);
  }
  const ControlAmplitudes c = control_amplitudes(kT / 4, kT, 4.0);
  const Matrix h = effective_cz_hamiltonian(loop, kT / 4).matrix();
  CHECK(std::abs(h(cz::k11, cz::kA0) - 0.5 * c.omega) <= 1e-12 * std::abs(c.omega));
  CHECK(std::abs(h(cz::k20, cz::kA0) - 0.5 * c.omega2) <= 1e-12 * std::abs(c.omega2));
  CHECK(cz_labels().size() == cz::kDim);
}

TEST_CASE("controlled-phase gate") {
  const ControlledPhaseResult id = controlled_phase_gate(0.0, PeakRabi{kPeak});
  CHECK((id.block - Eigen::Matrix4cd::Identity()).norm() < 1e-6);

  const ControlledPhaseResult cz = controlled_phase_gate(kPi, PeakRabi{kPeak});
  Eigen::Matrix4cd target = Eigen::Matrix4cd::Identity();
  target(3, 3) = -1;
  CHECK((cz.block - target).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(cz.leakage <= 1e-6);
  // Same loop and peak budget as the single-qubit gates.
  CHECK(cz.duration == doctest::Approx(solve_duration(kPeak, 4.0)).epsilon(1e-12));
  const Matrix& u = cz.full_propagator.matrix();
  for (int s : {cz::k00, cz::k01, cz::k10}) {
    Vector e = Vector::Unit(cz::kDim, s);
    CHECK((u * e - e).norm() < 1e-14);
    CHECK((u.adjoint() * e - e).norm() < 1e-14);
  }
}

TEST_CASE("effective loop equals the single-qubit theta = 0 loop") {
  for (double gamma : {kPi, 0.9}) {
    const ControlledPhaseResult r = controlled_phase_gate(gamma, Duration{kT});
    const RealizedGate g = realize(GateSpec(0.0, 0.0, gamma, 4.0, Duration{kT}));
    // With theta = phi = 0 the bright state is -|1>.
    Matrix frame = Matrix::Zero(4, 3);
    frame(level::k1, 0) = -1;
    frame(level::kA, 1) = 1;
    frame(level::k2, 2) = 1;
    const Matrix single = frame.adjoint() * g.full_propagator.matrix() * frame;
    const Matrix two = r.full_propagator.matrix().bottomRightCorner(3, 3);
    CHECK((single - two).norm() < 1e-8);
  }
}

TEST_CASE("auxiliary-state phase") {
  const double gamma = 1.1;
  // eta = 0: |a0> picks up exactly e^{-i gamma} while |11> gets e^{i gamma}.
  const Matrix u0 = controlled_phase_gate(gamma, Duration{kT}, 1e-10, 0.0).full_propagator.matrix();
  CHECK(std::abs(u0(cz::k11, cz::k11) - std::exp(kI * gamma)) < 1e-8);
  CHECK(std::abs(u0(cz::kA0, cz::kA0) - std::exp(-kI * gamma)) < 1e-8);
  // eta = 4: |a0> mixes with |20>, and the auxiliary block carries e^{-i gamma}
  // as its determinant.
  const Matrix u4 = controlled_phase_gate(gamma, Duration{kT}).full_propagator.matrix();
  const Eigen::Matrix2cd aux = u4.bottomRightCorner(2, 2);
  CHECK(std::abs(aux.determinant() - std::exp(-kI * gamma)) < 1e-8);
  CHECK(std::abs(u4(cz::k11, cz::k11) - std::exp(kI * gamma)) < 1e-8);
}

TEST_CASE("controlled-phase CSV layout") {
  std::ostringstream os;
  write_cz_csv(os, controlled_phase_gate(kPi, Duration{kT}));
  const std::string s = os.str();
  CHECK(s.rfind("row,c0_re,c0_im,c1_re,c1_im,c2_re,c2_im,c3_re,c3_im\n", 0) == 0);
  CHECK(s.find("\nleakage,") != std::string::npos);
  CHECK(s.find("\nduration_s,") != std::string::npos);
}
