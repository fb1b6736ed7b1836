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

#include "darkloop/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "darkloop/parallel.hpp"

namespace darkloop {

namespace {

// Fourth-order commutator-free exponential integrator with Gauss-Legendre
// nodes: y <- exp(h(a1 A1 + a2 A2)) exp(h(a2 A1 + a1 A2)) y.
constexpr double kNode1 = 0.21132486540518711775;  // 1/2 - sqrt(3)/6
constexpr double kNode2 = 0.78867513459481288225;  // 1/2 + sqrt(3)/6
constexpr double kWeight1 = -0.03867513459481288225;  // 1/4 - sqrt(3)/6
constexpr double kWeight2 = 0.53867513459481288225;   // 1/4 + sqrt(3)/6

std::vector<double> build_nodes(const TimeDependentHamiltonian& h,
                                const std::vector<double>& extra) {
  if (!(h.t_end > h.t_begin)) throw std::invalid_argument("empty propagation interval");
  if (!h.at) throw std::invalid_argument("Hamiltonian generator is not set");
  std::vector<double> nodes = {h.t_begin, h.t_end};
  for (double b : h.breakpoints) {
    if (b > h.t_begin && b < h.t_end) nodes.push_back(b);
  }
  for (double e : extra) {
    if (e > h.t_begin && e < h.t_end) nodes.push_back(e);
  }
  std::sort(nodes.begin(), nodes.end());
  const double eps = 1e-14 * (h.t_end - h.t_begin);
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [eps](double a, double b) { return std::abs(a - b) <= eps; }),
              nodes.end());
  return nodes;
}

int steps_for(double length, double total, int total_steps) {
  return std::max(1, static_cast<int>(std::ceil(total_steps * length / total - 1e-9)));
}

// Advances `state` (a propagator or a vectorized density matrix) over every
// node interval; `step` maps (t, dt, state) to the next state. `visit` is
// called at each node with its index.
template <class State, class Step, class Visit>
State march(State state, const std::vector<double>& nodes, int total_steps, Step step,
            Visit visit) {
  const double total = nodes.back() - nodes.front();
  visit(0, state);
  for (size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double len = nodes[k + 1] - nodes[k];
    const int n = steps_for(len, total, total_steps);
    const double dt = len / n;
    for (int s = 0; s < n; ++s) state = step(nodes[k] + s * dt, dt, state);
    visit(k + 1, state);
  }
  return state;
}

template <class Run>
auto converge(Run run, const PropagationOptions& opts, int* steps_used) {
  int n = std::max(1, opts.initial_steps);
  auto prev = run(n);
  double diff = std::numeric_limits<double>::infinity();
  while (2 * n <= opts.max_steps) {
    n *= 2;
    auto next = run(n);
    diff = (next - prev).norm();
    prev = std::move(next);
    if (diff < opts.tol) {
      if (steps_used) *steps_used = n;
      return prev;
    }
  }
  throw ConvergenceError(fmt::format(
      "propagation did not converge to {:.1e} within {} steps (last change {:.3e})", opts.tol,
      opts.max_steps, diff));
}

Matrix unitary_step(const TimeDependentHamiltonian& h, double t, double dt, const Matrix& u) {
  const Matrix h1 = h.at(t + kNode1 * dt);
  const Matrix h2 = h.at(t + kNode2 * dt);
  const Matrix first = kWeight2 * h1 + kWeight1 * h2;
  const Matrix second = kWeight1 * h1 + kWeight2 * h2;
  return unitary_exp(second, dt) * (unitary_exp(first, dt) * u);
}

Matrix lindblad_step_propagator(const TimeDependentHamiltonian& h, const NoiseModel& noise,
                                double t, double dt) {
  const Matrix l1 = lindbladian(h.at(t + kNode1 * dt), noise);
  const Matrix l2 = lindbladian(h.at(t + kNode2 * dt), noise);
  const Matrix first = (dt * (kWeight2 * l1 + kWeight1 * l2)).exp();
  const Matrix second = (dt * (kWeight1 * l1 + kWeight2 * l2)).exp();
  return second * first;
}

std::vector<double> uniform_times(double a, double b, int n_intervals) {
  if (n_intervals < 1) throw std::invalid_argument("need at least one output interval");
  std::vector<double> t(n_intervals + 1);
  for (int k = 0; k <= n_intervals; ++k) t[k] = a + (b - a) * k / n_intervals;
  t.back() = b;
  return t;
}

// Maps every node index back to its output slot (or -1 for pure breakpoints).
std::vector<int> output_slots(const std::vector<double>& nodes, const std::vector<double>& outs) {
  std::vector<int> slot(nodes.size(), -1);
  const double eps = 1e-12 * (outs.back() - outs.front());
  size_t j = 0;
  for (size_t k = 0; k < nodes.size() && j < outs.size(); ++k) {
    if (std::abs(nodes[k] - outs[j]) <= eps) slot[k] = static_cast<int>(j++);
  }
  if (j != outs.size()) throw std::logic_error("output times lost while building nodes");
  return slot;
}

}  // namespace

Matrix drive_hamiltonian(const DriveSample& s) {
  Matrix h = Matrix::Zero(level::kCount, level::kCount);
  for (int j = 0; j < 3; ++j) {
    const cplx c = 0.5 * s.amplitude[j] * std::exp(-kI * s.phase[j]);
    h(j, level::kA) = c;
    h(level::kA, j) = std::conj(c);
  }
  return h;
}

HamiltonianModel::HamiltonianModel(PulseSchedule schedule) : schedule_(std::move(schedule)) {}

Operator HamiltonianModel::hamiltonian_at(double t) const {
  return Operator(drive_hamiltonian(schedule_.at(t)));
}

TimeDependentHamiltonian HamiltonianModel::generator() const {
  TimeDependentHamiltonian h;
  h.dim = level::kCount;
  h.t_begin = schedule_.start();
  h.t_end = schedule_.start() + schedule_.duration();
  h.breakpoints = schedule_.breakpoints();
  // Copy the schedule so the generator outlives this model.
  h.at = [s = schedule_](double t) { return drive_hamiltonian(s.at(t)); };
  return h;
}

void NoiseModel::add(Matrix op, double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw std::invalid_argument("rates must be >= 0");
  if (op.rows() != op.cols()) throw std::invalid_argument("collapse operator must be square");
  if (!ops_.empty() && ops_.front().op.rows() != op.rows()) {
    throw std::invalid_argument("collapse operators must share one dimension");
  }
  if (rate > 0.0) ops_.push_back({std::move(op), rate});
}

void NoiseModel::add_level_dephasing(int dim, int level, double rate) {
  Matrix p = Matrix::Zero(dim, dim);
  p(level, level) = 1.0;
  add(std::move(p), 2.0 * rate);
}

void NoiseModel::add_depolarizing(int dim, double rate) {
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      Matrix op = Matrix::Zero(dim, dim);
      op(i, j) = 1.0;
      add(std::move(op), rate / dim);
    }
  }
}

NoiseModel NoiseModel::four_level(double t2, double depolarizing_rate) {
  NoiseModel noise;
  if (t2 > 0.0 && std::isfinite(t2)) {
    for (int k : {level::k1, level::k2, level::kA}) {
      noise.add_level_dephasing(level::kCount, k, 1.0 / t2);
    }
  }
  if (depolarizing_rate > 0.0) noise.add_depolarizing(level::kCount, depolarizing_rate);
  return noise;
}

Operator propagate_unitary(const TimeDependentHamiltonian& h, const PropagationOptions& opts) {
  const std::vector<double> nodes = build_nodes(h, {});
  const Matrix id = Matrix::Identity(h.dim, h.dim);
  auto run = [&](int n) {
    return march(
        id, nodes, n, [&](double t, double dt, const Matrix& u) { return unitary_step(h, t, dt, u); },
        [](size_t, const Matrix&) {});
  };
  return Operator(converge(run, opts, nullptr));
}

Operator propagate_unitary(const HamiltonianModel& model, double tol) {
  PropagationOptions opts;
  opts.tol = tol;
  return propagate_unitary(model.generator(), opts);
}

UnitaryTrajectory propagate_unitary_trajectory(const TimeDependentHamiltonian& h, int n_intervals,
                                               const PropagationOptions& opts) {
  const std::vector<double> outs = uniform_times(h.t_begin, h.t_end, n_intervals);
  const std::vector<double> nodes = build_nodes(h, outs);
  const std::vector<int> slot = output_slots(nodes, outs);
  const Matrix id = Matrix::Identity(h.dim, h.dim);
  auto step = [&](double t, double dt, const Matrix& u) { return unitary_step(h, t, dt, u); };
  int steps = 0;
  converge([&](int n) { return march(id, nodes, n, step, [](size_t, const Matrix&) {}); }, opts,
           &steps);
  UnitaryTrajectory traj;
  traj.times = outs;
  traj.propagators.resize(outs.size());
  march(id, nodes, steps, step, [&](size_t k, const Matrix& u) {
    if (slot[k] >= 0) traj.propagators[slot[k]] = Operator(u);
  });
  return traj;
}

Matrix lindbladian(const Matrix& h, const NoiseModel& noise) {
  const Eigen::Index d = h.rows();
  const Matrix id = Matrix::Identity(d, d);
  Matrix l = -kI * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& c : noise.operators()) {
    if (c.op.rows() != d) throw std::invalid_argument("collapse operator dimension mismatch");
    const Matrix ldl = c.op.adjoint() * c.op;
    l += c.rate * (kron(c.op.conjugate(), c.op) - 0.5 * kron(id, ldl) -
                   0.5 * kron(ldl.transpose(), id));
  }
  return l;
}

Channel lindblad_channel(const TimeDependentHamiltonian& h, const NoiseModel& noise,
                         const PropagationOptions& opts) {
  const std::vector<double> nodes = build_nodes(h, {});
  const Matrix id = Matrix::Identity(h.dim * h.dim, h.dim * h.dim);
  auto run = [&](int n) {
    return march(
        id, nodes, n,
        [&](double t, double dt, const Matrix& s) {
          return Matrix(lindblad_step_propagator(h, noise, t, dt) * s);
        },
        [](size_t, const Matrix&) {});
  };
  return Channel(h.dim, converge(run, opts, nullptr));
}

LindbladTrajectory propagate_lindblad(const DensityMatrix& rho0, const TimeDependentHamiltonian& h,
                                      const NoiseModel& noise, int n_intervals,
                                      const PropagationOptions& opts) {
  if (rho0.dim() != h.dim) throw std::invalid_argument("initial state dimension mismatch");
  const std::vector<double> outs = uniform_times(h.t_begin, h.t_end, n_intervals);
  const std::vector<double> nodes = build_nodes(h, outs);
  const std::vector<int> slot = output_slots(nodes, outs);
  auto step = [&](double t, double dt, const Vector& v) {
    return Vector(lindblad_step_propagator(h, noise, t, dt) * v);
  };
  const Vector v0 = vec(rho0.matrix());
  int steps = 0;
  converge([&](int n) { return march(v0, nodes, n, step, [](size_t, const Vector&) {}); }, opts,
           &steps);
  LindbladTrajectory traj;
  traj.times = outs;
  traj.states.resize(outs.size());
  march(v0, nodes, steps, step, [&](size_t k, const Vector& v) {
    if (slot[k] >= 0) {
      Matrix rho = unvec(v, h.dim);
      traj.states[slot[k]] = 0.5 * (rho + rho.adjoint());
    }
  });
  return traj;
}

LindbladTrajectory propagate_lindblad(const DensityMatrix& rho0, const HamiltonianModel& model,
                                      const NoiseModel& noise, double tol, int n_intervals) {
  PropagationOptions opts;
  opts.tol = tol;
  return propagate_lindblad(rho0, model.generator(), noise, n_intervals, opts);
}

FrameStates frame_states(double theta, double phi) {
  const double s = std::sin(0.5 * theta);
  const double c = std::cos(0.5 * theta);
  Vector b = Vector::Zero(level::kCount);
  b(level::k0) = s;
  b(level::k1) = -std::exp(kI * phi) * c;
  Vector d1 = Vector::Zero(level::kCount);
  d1(level::k0) = -c * std::exp(-kI * phi);
  d1(level::k1) = -s;
  return {StateVector::normalized(b, four_level_labels()),
          StateVector::normalized(d1, four_level_labels()), theta, phi};
}

StateVector dark_path_state(double t, const LoopSchedule& loop, const FrameStates& frame) {
  const double a = loop.alpha(t);
  const double b = loop.beta(t);
  const double phi0 = loop.phase0(t);
  Vector v = std::cos(a) * std::cos(b) * std::exp(-kI * phi0) * frame.bright.amplitudes();
  v(level::k2) += -std::cos(a) * std::sin(b);
  v(level::kA) += -kI * std::sin(a);
  return StateVector::normalized(std::move(v), four_level_labels());
}

Operator bright_frame_hamiltonian(double t, const LoopSchedule& loop, const FrameStates& frame) {
  const ControlAmplitudes c = loop.amplitudes(t);
  const double phi0 = loop.phase0(t);
  const Vector& b = frame.bright.amplitudes();
  Vector a = Vector::Zero(level::kCount);
  a(level::kA) = 1.0;
  Vector two = Vector::Zero(level::kCount);
  two(level::k2) = 1.0;
  Matrix h = 0.5 * c.omega * std::exp(-kI * phi0) * b * a.adjoint() +
             0.5 * c.omega2 * two * a.adjoint();
  return Operator(h + h.adjoint());
}

namespace {

void record(PopulationTrace& trace, const Matrix& rho) {
  trace.populations.push_back(
      {rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real(), rho(3, 3).real()});
  trace.coherences.push_back({std::abs(rho(0, 1)), std::abs(rho(0, 3)), std::abs(rho(1, 3))});
}

}  // namespace

PopulationTrace population_trace(const StateVector& psi0, const HamiltonianModel& model,
                                 const std::optional<NoiseModel>& noise, int n_intervals,
                                 double tol) {
  if (psi0.dim() != level::kCount) throw std::invalid_argument("expected a four-level state");
  PropagationOptions opts;
  opts.tol = tol;
  PopulationTrace trace;
  if (noise && !noise->empty()) {
    const LindbladTrajectory traj = propagate_lindblad(
        DensityMatrix::pure(psi0), model.generator(), *noise, n_intervals, opts);
    trace.times = traj.times;
    for (const auto& rho : traj.states) record(trace, rho);
    return trace;
  }
  const UnitaryTrajectory traj = propagate_unitary_trajectory(model.generator(), n_intervals, opts);
  trace.times = traj.times;
  for (const auto& u : traj.propagators) {
    const Vector psi = u.matrix() * psi0.amplitudes();
    record(trace, psi * psi.adjoint());
  }
  return trace;
}

PopulationTrace sample_population_trace(const PopulationTrace& exact, int shots,
                                        std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  PopulationTrace out = exact;
  for (size_t k = 0; k < exact.populations.size(); ++k) {
    std::mt19937_64 rng(derive_seed(seed, k));
    const auto& p = exact.populations[k];
    int remaining = shots;
    double mass = 1.0;
    for (int j = 0; j < 4; ++j) {
      int n = remaining;
      if (j < 3) {
        const double q = mass > 0.0 ? std::clamp(p[j] / mass, 0.0, 1.0) : 0.0;
        n = std::binomial_distribution<int>(remaining, q)(rng);
        mass -= std::max(p[j], 0.0);
      }
      out.populations[k][j] = static_cast<double>(n) / shots;
      remaining -= n;
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const PopulationTrace& trace, bool coherences) {
  os << "t_s,p0,p1,p2,pa" << (coherences ? ",c01,c0a,c1a" : "") << '\n';
  for (size_t k = 0; k < trace.times.size(); ++k) {
    const auto& p = trace.populations[k];
    os << fmt::format("{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}", trace.times[k], p[0], p[1], p[2],
                      p[3]);
    if (coherences) {
      const auto& c = trace.coherences[k];
      os << fmt::format(",{:.12g},{:.12g},{:.12g}", c[0], c[1], c[2]);
    }
    os << '\n';
  }
}

}  // namespace darkloop
