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

#include "darkloop/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "darkloop/parallel.hpp"

namespace darkloop {

namespace {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

constexpr double kCptpTol = 1e-10;

Mat2 herm(const Mat2& m) { return 0.5 * (m + m.adjoint()); }

double outcome_probability(const Mat2& rho, Axis axis, int outcome) {
  return std::clamp((axis_projector(axis, outcome) * rho).trace().real(), 0.0, 1.0);
}

// Column m of V is Σ_i e_i ⊗ P_m e_i, so the Choi matrix (input slow) is V χ V†.
const Mat4& choi_basis() {
  static const Mat4 v = [] {
    Mat4 out = Mat4::Zero();
    for (int m = 0; m < 4; ++m) {
      for (int i = 0; i < 2; ++i) {
        for (int a = 0; a < 2; ++a) out(2 * i + a, m) = pauli_basis()[m](a, i);
      }
    }
    return out;
  }();
  return v;
}

Mat4 chi_to_choi(const Mat4& chi) { return choi_basis() * chi * choi_basis().adjoint(); }
Mat4 choi_to_chi(const Mat4& choi) { return choi_basis().adjoint() * choi * choi_basis() / 4.0; }

Mat2 trace_output(const Mat4& s) {
  Mat2 out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out(i, j) = s(2 * i, 2 * j) + s(2 * i + 1, 2 * j + 1);
  }
  return out;
}

Mat4 input_congruence(const Mat2& a, const Mat4& s) {
  const Mat4 big = kron(a, Mat2::Identity());
  return big * s * big.adjoint();
}

Mat2 inverse_sqrt_psd(const Mat2& m) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(herm(m));
  const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

bool is_cptp(const Mat4& chi) {
  const Mat4 h = 0.5 * (chi + chi.adjoint());
  if ((chi - h).norm() > kCptpTol) return false;
  Eigen::SelfAdjointEigenSolver<Mat4> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kCptpTol) return false;
  return (trace_output(chi_to_choi(h)) - Mat2::Identity()).norm() <= kCptpTol;
}

struct ProcessTerm {
  Mat4 effect;  // ρ_in^T ⊗ Π
  double frequency;
};

std::vector<ProcessTerm> process_terms(const std::array<TomographyData, 6>& data) {
  std::vector<ProcessTerm> terms;
  for (int i = 0; i < 6; ++i) {
    const Vector& psi = basis_states()[i].amplitudes();
    const Mat2 rho_in = psi * psi.adjoint();
    for (int k = 0; k < 3; ++k) {
      const double total = data[i].plus[k] + data[i].minus[k];
      if (total <= 0.0) continue;
      const Axis axis = static_cast<Axis>(k);
      terms.push_back({kron(rho_in.transpose(), axis_projector(axis, 0)), data[i].plus[k] / total});
      terms.push_back(
          {kron(rho_in.transpose(), axis_projector(axis, 1)), data[i].minus[k] / total});
    }
  }
  return terms;
}

double process_log_likelihood(const std::vector<ProcessTerm>& terms, const Mat4& s) {
  double ll = 0.0;
  for (const auto& t : terms) {
    if (t.frequency > 0.0) {
      ll += t.frequency * std::log(std::max((s * t.effect).trace().real(), 1e-300));
    }
  }
  return ll;
}

// Iterative maximum-likelihood process estimate on the Choi matrix with the
// trace-preservation constraint enforced through the Lagrange operator λ.
Mat4 process_mle(const std::vector<ProcessTerm>& terms, Mat4 s, const MleOptions& opts) {
  double ll = process_log_likelihood(terms, s);
  for (int it = 0; it < opts.max_iterations; ++it) {
    Mat4 k = Mat4::Zero();
    for (const auto& t : terms) {
      const double p = std::max((s * t.effect).trace().real(), 1e-300);
      k += (t.frequency / p) * t.effect;
    }
    const Mat4 ksk = k * s * k;
    const Mat2 lambda_inv = inverse_sqrt_psd(trace_output(ksk));
    Mat4 next = input_congruence(lambda_inv, ksk);
    next = 0.5 * (next + next.adjoint());
    const double next_ll = process_log_likelihood(terms, next);
    s = next;
    const double gain = next_ll - ll;
    ll = next_ll;
    if (std::abs(gain) < opts.likelihood_tol) break;
  }
  return s;
}

// Nearest-ish CPTP start point: clip negative eigenvalues, mix in a little of
// the fully depolarizing map, then renormalize the input marginal to I.
Mat4 cptp_start(const Mat4& chi_lin) {
  Mat4 s = chi_to_choi(0.5 * (chi_lin + chi_lin.adjoint()));
  Eigen::SelfAdjointEigenSolver<Mat4> es(s);
  const Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
  s = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  s = (1.0 - 1e-3) * s + 1e-3 * 0.5 * Mat4::Identity() * s.trace().real() / 2.0;
  const Mat2 l = inverse_sqrt_psd(trace_output(s));
  return input_congruence(l, s);
}

}  // namespace

const std::array<StateVector, 6>& basis_states() {
  static const std::array<StateVector, 6> states = [] {
    const double r = 1.0 / std::sqrt(2.0);
    auto make = [](cplx a, cplx b) {
      Vector v(2);
      v << a, b;
      return StateVector::normalized(v, {"0", "1"});
    };
    return std::array<StateVector, 6>{make(1, 0),      make(0, 1),     make(r, r),
                                      make(r, -r),     make(r, kI * r), make(r, -kI * r)};
  }();
  return states;
}

Eigen::Matrix2cd axis_projector(Axis axis, int outcome) {
  if (outcome != 0 && outcome != 1) throw std::invalid_argument("outcome must be 0 or 1");
  const double sign = outcome == 0 ? 1.0 : -1.0;
  return 0.5 * (pauli_basis()[0] + sign * pauli_basis()[1 + static_cast<int>(axis)]);
}

double with_readout_error(double p, double readout_error) {
  if (!(readout_error >= 0.0 && readout_error <= 0.5)) {
    throw std::invalid_argument("readout error must lie in [0, 0.5]");
  }
  return std::clamp(p * (1.0 - readout_error) + (1.0 - p) * readout_error, 0.0, 1.0);
}

AxisCounts sample_measurement(const DensityMatrix& rho, Axis axis, int shots,
                              std::mt19937_64& rng, double readout_error) {
  if (rho.dim() != 2) throw std::invalid_argument("measurement expects a qubit state");
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  const double p =
      with_readout_error(outcome_probability(rho.matrix(), axis, 0), readout_error);
  std::binomial_distribution<std::int64_t> draw(shots, p);
  const std::int64_t plus = draw(rng);
  return {plus, shots - plus};
}

AxisCounts sample_measurement(const DensityMatrix& rho, Axis axis, const ShotConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  return sample_measurement(rho, axis, cfg.shots, rng, cfg.readout_error);
}

TomographyData measure_all_axes(const DensityMatrix& rho, int shots, std::mt19937_64& rng,
                                double readout_error) {
  TomographyData d;
  for (int k = 0; k < 3; ++k) {
    const AxisCounts c = sample_measurement(rho, static_cast<Axis>(k), shots, rng, readout_error);
    d.plus[k] = static_cast<double>(c.plus);
    d.minus[k] = static_cast<double>(c.minus);
  }
  return d;
}

TomographyData exact_probabilities(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw std::invalid_argument("tomography expects a qubit state");
  TomographyData d;
  for (int k = 0; k < 3; ++k) {
    d.plus[k] = outcome_probability(rho.matrix(), static_cast<Axis>(k), 0);
    d.minus[k] = outcome_probability(rho.matrix(), static_cast<Axis>(k), 1);
  }
  return d;
}

DensityMatrix state_mle(const TomographyData& data, const MleOptions& opts) {
  double grand_total = 0.0;
  Eigen::Vector3d bloch = Eigen::Vector3d::Zero();
  std::array<double, 3> totals{};
  for (int k = 0; k < 3; ++k) {
    if (data.plus[k] < 0.0 || data.minus[k] < 0.0) throw std::invalid_argument("negative counts");
    totals[k] = data.plus[k] + data.minus[k];
    grand_total += totals[k];
    if (totals[k] > 0.0) bloch(k) = (data.plus[k] - data.minus[k]) / totals[k];
  }
  if (grand_total <= 0.0) throw std::invalid_argument("state_mle: all counts are zero");

  auto from_bloch = [](const Eigen::Vector3d& r) {
    Mat2 rho = 0.5 * pauli_basis()[0];
    for (int k = 0; k < 3; ++k) rho += 0.5 * r(k) * pauli_basis()[k + 1];
    return rho;
  };

  // Inside the Bloch ball the linear-inversion estimate already maximizes the
  // independent-binomial likelihood. A rounding-level excess over the unit
  // sphere is a pure state and only needs renormalizing.
  if (bloch.norm() <= 1.0) return DensityMatrix(from_bloch(bloch));
  if (bloch.norm() <= 1.0 + 1e-12) return DensityMatrix(from_bloch(bloch.normalized()));

  std::vector<std::pair<Mat2, double>> terms;
  for (int k = 0; k < 3; ++k) {
    if (totals[k] <= 0.0) continue;
    terms.emplace_back(axis_projector(static_cast<Axis>(k), 0), data.plus[k] / totals[k]);
    terms.emplace_back(axis_projector(static_cast<Axis>(k), 1), data.minus[k] / totals[k]);
  }
  auto log_likelihood = [&](const Mat2& rho) {
    double ll = 0.0;
    for (const auto& [proj, f] : terms) {
      if (f > 0.0) ll += f * std::log(std::max((proj * rho).trace().real(), 1e-300));
    }
    return ll;
  };

  Mat2 rho = 0.5 * Mat2::Identity();
  double ll = log_likelihood(rho);
  for (int it = 0; it < opts.max_iterations; ++it) {
    Mat2 r = Mat2::Zero();
    for (const auto& [proj, f] : terms) {
      r += (f / std::max((proj * rho).trace().real(), 1e-300)) * proj;
    }
    Mat2 next = r * rho * r;
    next = herm(next / next.trace().real());
    const double next_ll = log_likelihood(next);
    rho = next;
    const double gain = next_ll - ll;
    ll = next_ll;
    if (std::abs(gain) < opts.likelihood_tol) break;
  }
  return DensityMatrix(herm(rho / rho.trace().real()));
}

ProcessMatrix chi_from_unitary(const Eigen::Matrix2cd& u) {
  const std::array<cplx, 4> c = pauli_decompose(Operator(Matrix(u)));
  Eigen::Vector4cd v(c[0], c[1], c[2], c[3]);
  return {v * v.adjoint()};
}

Eigen::Matrix2cd apply_chi(const ProcessMatrix& p, const Eigen::Matrix2cd& rho) {
  Mat2 out = Mat2::Zero();
  const auto& pb = pauli_basis();
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) out += p.chi(m, n) * pb[m] * rho * pb[n].adjoint();
  }
  return out;
}

double process_fidelity(const ProcessMatrix& measured, const ProcessMatrix& ideal) {
  return std::abs((measured.chi * ideal.chi.adjoint()).trace());
}

ProcessMatrix chi_linear_inversion(const std::array<Eigen::Matrix2cd, 6>& outputs) {
  Eigen::Matrix<cplx, 24, 16> a;
  Eigen::Matrix<cplx, 24, 1> b;
  const auto& pb = pauli_basis();
  for (int i = 0; i < 6; ++i) {
    const Vector& psi = basis_states()[i].amplitudes();
    const Mat2 rho_in = psi * psi.adjoint();
    for (int m = 0; m < 4; ++m) {
      for (int n = 0; n < 4; ++n) {
        const Mat2 term = pb[m] * rho_in * pb[n].adjoint();
        for (int r = 0; r < 2; ++r) {
          for (int c = 0; c < 2; ++c) a(4 * i + 2 * r + c, 4 * m + n) = term(r, c);
        }
      }
    }
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) b(4 * i + 2 * r + c) = outputs[i](r, c);
    }
  }
  const Eigen::Matrix<cplx, 16, 1> x = a.completeOrthogonalDecomposition().solve(b);
  ProcessMatrix p;
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) p.chi(m, n) = x(4 * m + n);
  }
  p.chi = 0.5 * (p.chi + p.chi.adjoint());
  return p;
}

QubitProcess qubit_process(const Channel& channel) {
  return [channel](const Eigen::Matrix2cd& rho) {
    const Mat2 out = qubit_block(channel.apply(embed_qubit(rho, channel.dim())));
    const double tr = out.trace().real();
    if (!(tr > 0.0)) throw std::runtime_error("all population left the qubit levels");
    return Mat2(herm(out / tr));
  };
}

QptResult qpt(const QubitProcess& process, const Eigen::Matrix2cd& target,
              const std::optional<ShotConfig>& shots, const MleOptions& opts) {
  QptResult result;
  std::array<Mat2, 6> reconstructed;
  for (int i = 0; i < 6; ++i) {
    const Vector& psi = basis_states()[i].amplitudes();
    const DensityMatrix out(herm(process(psi * psi.adjoint())));
    if (shots) {
      std::mt19937_64 rng(derive_seed(shots->seed, static_cast<std::uint64_t>(i)));
      result.data[i] = measure_all_axes(out, shots->shots, rng, shots->readout_error);
    } else {
      result.data[i] = exact_probabilities(out);
    }
    result.outputs[i] = state_mle(result.data[i], opts);
    reconstructed[i] = result.outputs[i].matrix();
  }
  ProcessMatrix chi = chi_linear_inversion(reconstructed);
  if (shots || !is_cptp(chi.chi)) {
    const Mat4 s = process_mle(process_terms(result.data), cptp_start(chi.chi), opts);
    chi.chi = choi_to_chi(s);
    chi.chi = 0.5 * (chi.chi + chi.chi.adjoint());
    chi.chi /= chi.chi.trace().real();
    result.projected = true;
  }
  result.chi = chi;
  result.fidelity = process_fidelity(chi, chi_from_unitary(target));
  return result;
}

void write_chi_csv(std::ostream& os, const ProcessMatrix& chi, double fidelity) {
  os << "part,row,I,X,Y,Z\n";
  const char* names[] = {"I", "X", "Y", "Z"};
  for (int part = 0; part < 2; ++part) {
    for (int m = 0; m < 4; ++m) {
      os << (part == 0 ? "re" : "im") << ',' << names[m];
      for (int n = 0; n < 4; ++n) {
        const cplx v = chi.chi(m, n);
        os << fmt::format(",{:.12g}", part == 0 ? v.real() : v.imag());
      }
      os << '\n';
    }
  }
  os << fmt::format("fidelity,,{:.12g},,,\n", fidelity);
}

}  // namespace darkloop
