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

#include "darkloop/two_qubit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <fmt/format.h>

namespace darkloop {

void SpinPhononModel::validate() const {
  if (!(lamb_dicke > 0.0)) throw std::invalid_argument("Lamb-Dicke parameter must be > 0");
  if (fock_levels < 2) throw std::invalid_argument("Fock truncation must be >= 2");
  if (!(trap_frequency > 0.0)) throw std::invalid_argument("trap frequency must be > 0");
  if (!(rabi > 0.0)) throw std::invalid_argument("Rabi frequency must be > 0");
}

Operator annihilation(int fock_levels) {
  Matrix a = Matrix::Zero(fock_levels, fock_levels);
  for (int n = 1; n < fock_levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator(std::move(a));
}

namespace {

// Time-independent pieces of the sideband Hamiltonian, so the integrator only
// pays for the phase factors at each node.
struct SidebandTerms {
  Matrix carrier;  // sigma_+ (x) I
  Matrix lower;    // sigma_+ (x) a
  Matrix raise;    // sigma_+ (x) a^dag

  explicit SidebandTerms(const SpinPhononModel& model) {
    const int n = model.fock_levels;
    const Matrix a = annihilation(n).matrix();
    Matrix sigma_plus = Matrix::Zero(2, 2);
    sigma_plus(1, 0) = 1.0;
    carrier = kron(sigma_plus, Matrix::Identity(n, n));
    lower = kron(sigma_plus, a);
    raise = kron(sigma_plus, a.adjoint());
  }

  Matrix at(const SpinPhononModel& model, double t) const {
    const cplx drive = 0.5 * model.rabi * std::exp(kI * (model.phase - model.detuning * t));
    const cplx side = kI * model.lamb_dicke * drive;
    const cplx rot = std::exp(-kI * model.trap_frequency * t);
    const Matrix h = drive * carrier + side * rot * lower + side * std::conj(rot) * raise;
    return h + h.adjoint();
  }
};

}  // namespace

Operator sideband_hamiltonian(const SpinPhononModel& model, double t) {
  model.validate();
  return Operator(SidebandTerms(model).at(model, t));
}

TimeDependentHamiltonian sideband_generator(const SpinPhononModel& model, double duration) {
  model.validate();
  TimeDependentHamiltonian h;
  h.dim = model.dim();
  h.t_begin = 0.0;
  h.t_end = duration;
  h.at = [model, terms = SidebandTerms(model)](double t) { return terms.at(model, t); };
  return h;
}

SidebandEvolution sideband_evolution(const SpinPhononModel& model, const StateVector& psi0,
                                     double duration, int n_intervals) {
  model.validate();
  if (psi0.dim() != model.dim()) throw std::invalid_argument("initial state dimension mismatch");
  if (!(duration > 0.0) || n_intervals < 1) {
    throw std::invalid_argument("need a positive duration and at least one interval");
  }
  // In the frame rotating with K = -nu a^dag a + delta |1><1| every explicit
  // time dependence cancels. K is diagonal, so populations are frame-independent
  // and the truncated evolution is exact.
  const Matrix h_lab = SidebandTerms(model).at(model, 0.0);
  Matrix h = h_lab;
  // At t = 0 the lab and rotating-frame couplings coincide.
  for (int n = 0; n < model.fock_levels; ++n) {
    h(model.index(0, n), model.index(0, n)) += model.trap_frequency * n;
    h(model.index(1, n), model.index(1, n)) += model.trap_frequency * n - model.detuning;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Vector coeffs = es.eigenvectors().adjoint() * psi0.amplitudes();

  SidebandEvolution out;
  for (int k = 0; k <= n_intervals; ++k) {
    const double t = duration * k / n_intervals;
    const Vector phased =
        coeffs.cwiseProduct((-kI * t * es.eigenvalues().cast<cplx>()).array().exp().matrix());
    const Vector psi = es.eigenvectors() * phased;
    std::vector<double> pops(psi.size());
    for (Eigen::Index j = 0; j < psi.size(); ++j) pops[j] = std::norm(psi(j));
    const double top = pops[model.index(0, model.fock_levels - 1)] +
                       pops[model.index(1, model.fock_levels - 1)];
    out.max_top_fock_population = std::max(out.max_top_fock_population, top);
    out.times.push_back(t);
    out.populations.push_back(std::move(pops));
  }
  return out;
}

double fit_oscillation_frequency(const std::vector<double>& times,
                                 const std::vector<double>& values, double omega_guess) {
  if (times.size() != values.size() || times.size() < 4) {
    throw std::invalid_argument("need >= 4 samples to fit an oscillation");
  }
  if (!(omega_guess > 0.0)) throw std::invalid_argument("frequency guess must be positive");
  // For fixed ω the model is linear in (d, c); minimize the residual over ω.
  auto residual = [&](double omega) {
    Eigen::MatrixXd a(times.size(), 2);
    Eigen::VectorXd y(times.size());
    for (size_t k = 0; k < times.size(); ++k) {
      a(k, 0) = 1.0;
      a(k, 1) = 0.5 * (1.0 - std::cos(omega * times[k]));
      y(k) = values[k];
    }
    const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
    return (a * coef - y).squaredNorm();
  };
  const int grid = 2000;
  double lo = 0.25 * omega_guess;
  double hi = 4.0 * omega_guess;
  double best = lo;
  double best_res = residual(lo);
  for (int k = 1; k <= grid; ++k) {
    const double w = lo + (hi - lo) * k / grid;
    const double r = residual(w);
    if (r < best_res) {
      best_res = r;
      best = w;
    }
  }
  const double h = (hi - lo) / grid;
  double a = best - h;
  double b = best + h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = residual(x1);
  double f2 = residual(x2);
  for (int it = 0; it < 100; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = residual(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = residual(x2);
    }
  }
  return 0.5 * (a + b);
}

SidebandMeasurement measure_blue_sideband(const SpinPhononModel& model, int phonons,
                                          double periods) {
  SpinPhononModel m = model;
  m.detuning = m.trap_frequency;
  m.validate();
  if (phonons < 0 || phonons + 1 >= m.fock_levels) {
    throw std::invalid_argument("initial phonon number outside the truncation");
  }
  const double expected = m.lamb_dicke * m.rabi * std::sqrt(phonons + 1.0);
  const double duration = periods * 2.0 * kPi / expected;
  const StateVector psi0 = StateVector::basis(m.dim(), m.index(0, phonons));
  const int n_out = std::max(400, static_cast<int>(100 * periods));
  const SidebandEvolution ev = sideband_evolution(m, psi0, duration, n_out);
  std::vector<double> target;
  for (const auto& p : ev.populations) target.push_back(p[m.index(1, phonons + 1)]);
  return {fit_oscillation_frequency(ev.times, target, expected), expected,
          ev.max_top_fock_population};
}

std::vector<std::string> cz_labels() { return {"00p", "01p", "10p", "11p", "a0p", "20p"}; }

Operator effective_cz_hamiltonian(const LoopSchedule& loop, double t) {
  const ControlAmplitudes c = loop.amplitudes(t);
  // θ = 0 puts the whole bright drive on the |11p> <-> |a0p> sideband.
  Matrix h = Matrix::Zero(cz::kDim, cz::kDim);
  h(cz::k11, cz::kA0) = 0.5 * c.omega * std::exp(-kI * loop.phase0(t));
  h(cz::k20, cz::kA0) = 0.5 * c.omega2;
  return Operator(Matrix(h + h.adjoint()));
}

TimeDependentHamiltonian effective_cz_generator(const LoopSchedule& loop) {
  TimeDependentHamiltonian h;
  h.dim = cz::kDim;
  h.t_begin = 0.0;
  h.t_end = loop.duration();
  h.breakpoints = {0.5 * loop.duration()};
  h.at = [loop](double t) { return effective_cz_hamiltonian(loop, t).matrix(); };
  return h;
}

ControlledPhaseResult controlled_phase_gate(double gamma, DriveBudget budget, double tol,
                                            double eta) {
  const GateSpec spec(0.0, 0.0, gamma, eta, budget);
  const LoopSchedule loop(resolve_duration(spec), eta, gamma);
  PropagationOptions opts;
  opts.tol = tol;
  ControlledPhaseResult out;
  out.full_propagator = propagate_unitary(effective_cz_generator(loop), opts);
  out.block = out.full_propagator.matrix().topLeftCorner(4, 4);
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(out.block);
  const double smin = svd.singularValues().minCoeff();
  out.leakage = std::clamp(1.0 - smin * smin, 0.0, 1.0);
  out.duration = loop.duration();
  return out;
}

void write_cz_csv(std::ostream& os, const ControlledPhaseResult& result) {
  os << "row,c0_re,c0_im,c1_re,c1_im,c2_re,c2_im,c3_re,c3_im\n";
  for (int i = 0; i < 4; ++i) {
    os << i;
    for (int j = 0; j < 4; ++j) {
      os << fmt::format(",{:.12g},{:.12g}", result.block(i, j).real(), result.block(i, j).imag());
    }
    os << '\n';
  }
  os << fmt::format("leakage,{:.12g},,,,,,,\n", result.leakage);
  os << fmt::format("duration_s,{:.12g},,,,,,,\n", result.duration);
}

}  // namespace darkloop
