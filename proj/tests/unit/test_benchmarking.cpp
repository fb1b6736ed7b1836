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
#include <sstream>

#include "darkloop/benchmarking.hpp"
#include "support/oracles.hpp"

using namespace darkloop;

namespace {

using Mat2 = Eigen::Matrix2cd;

bool equal_up_to_phase(const Mat2& a, const Mat2& b, double tol) {
  return std::abs(std::abs((a.adjoint() * b).trace()) / 2 - 1.0) < tol;
}

GateImplementation depolarized(double p) {
  return [p](const GateAngles& a) {
    return Channel::qubit_depolarizing(2, p).after(
        Channel::from_unitary(oracle::rotation(a.theta, a.phi, a.gamma)));
  };
}

}  // namespace

TEST_CASE("Clifford group: order, identity, closure, uniqueness") {
  const auto& g = clifford_group();
  REQUIRE(g.size() == 24);
  CHECK(g[0].angles.gamma == 0.0);
  CHECK(equal_up_to_phase(g[0].unitary, Mat2::Identity(), 1e-14));
  for (size_t i = 0; i < g.size(); ++i) {
    // Each element is the single rotation its angles describe.
    CHECK((Matrix(g[i].unitary) -
           oracle::rotation(g[i].angles.theta, g[i].angles.phi, g[i].angles.gamma)).norm() < 1e-12);
    for (size_t j = 0; j < g.size(); ++j) {
      if (i != j) CHECK_FALSE(equal_up_to_phase(g[i].unitary, g[j].unitary, 1e-6));
      const Mat2 prod = g[i].unitary * g[j].unitary;
      int matches = 0;
      for (const auto& e : g) matches += equal_up_to_phase(prod, e.unitary, 1e-10);
      CHECK(matches == 1);
      CHECK(equal_up_to_phase(g[clifford_compose(i, j)].unitary, prod, 1e-10));
    }
    CHECK(equal_up_to_phase(g[clifford_inverse(i)].unitary * g[i].unitary, Mat2::Identity(), 1e-10));
  }
  CHECK(clifford_find(target_unitary(named_gate_angles("T")).matrix()) == -1);
  CHECK(clifford_find(target_unitary(named_gate_angles("H")).matrix()) >= 0);
}

TEST_CASE("rotation_angles recovers any unitary up to phase") {
  std::mt19937_64 rng(19);
  for (int k = 0; k < 50; ++k) {
    const Mat2 u = oracle::random_unitary(2, rng);
    const GateAngles a = rotation_angles(u);
    CHECK(a.gamma >= 0.0);
    CHECK(a.gamma <= kPi + 1e-12);
    CHECK(equal_up_to_phase(Mat2(oracle::rotation(a.theta, a.phi, a.gamma)), u, 1e-12));
  }
  const GateAngles id = rotation_angles(Mat2::Identity());
  CHECK(std::abs(id.gamma) < 1e-12);
}

TEST_CASE("sequences are deterministic and recover to the identity") {
  CHECK(rb_sequence(5, 3, 16) == rb_sequence(5, 3, 16));
  CHECK(rb_sequence(5, 3, 16) != rb_sequence(5, 4, 16));
  const auto& g = clifford_group();
  for (std::uint64_t c = 0; c < 50; ++c) {
    const std::vector<int> seq = rb_sequence(99, c, 1 + static_cast<int>(c % 20));
    Mat2 u = Mat2::Identity();
    int index = 0;
    for (int k : seq) {
      CHECK(k >= 0);
      CHECK(k < 24);
      u = g[k].unitary * u;
      index = clifford_compose(k, index);
    }
    const Mat2 total = g[clifford_inverse(index)].unitary * u;
    CHECK(equal_up_to_phase(total, Mat2::Identity(), 1e-8));
  }
}

TEST_CASE("fit_decay recovers synthetic parameters") {
  const std::vector<int> m = {1, 2, 4, 8, 16, 32, 64};
  for (auto [a, r, b] : {std::tuple{0.5, 0.99, 0.5}, std::tuple{0.45, 0.95, 0.52},
                         std::tuple{0.3, 0.8, 0.6}}) {
    std::vector<double> y;
    for (int x : m) y.push_back(a * std::pow(r, x) + b);
    const FitResult f = fit_decay(m, y);
    CHECK(f.converged);
    CHECK(std::abs(f.a - a) < 1e-6);
    CHECK(std::abs(f.r - r) < 1e-6);
    CHECK(std::abs(f.b - b) < 1e-6);
  }
}

TEST_CASE("rb_fidelities") {
  const RBFidelities one = rb_fidelities(1.0, 1.0);
  CHECK(one.average == 1.0);
  CHECK(one.gate == 1.0);
  CHECK(rb_fidelities(0.975, 0.975).average == doctest::Approx(0.9875));
  CHECK(rb_fidelities(0.98, 0.9702).gate == doctest::Approx(0.995));
  CHECK_THROWS_AS(rb_fidelities(0.0, 0.9), std::invalid_argument);
}

TEST_CASE("RB with ideal gates") {
  RBConfig cfg;
  cfg.seed = 1;
  const RBResult res = rb_run(cfg, ideal_gate_implementation());
  CHECK(res.reference.fit.r >= 0.9999);
  for (double s : res.reference.mean_survival) CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_FALSE(res.interleaved.has_value());
}

TEST_CASE("RB with depolarizing gates matches the analytic decay") {
  const double p = 0.01;
  RBConfig cfg;
  cfg.seed = 2;
  cfg.interleaved = named_gate_angles("X");
  const RBResult res = rb_run(cfg, depolarized(p));
  // Every Clifford and the recovery carry one depolarizing step each.
  for (size_t k = 0; k < cfg.lengths.size(); ++k) {
    const double expect = 0.5 + 0.5 * std::pow(1 - p, cfg.lengths[k] + 1);
    CHECK(res.reference.mean_survival[k] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(std::abs(res.reference.fit.r - (1 - p)) <= 0.002);
  const RBFidelities f = rb_fidelities(res.reference.fit.r, res.interleaved->fit.r);
  CHECK(std::abs(f.average - (1 - p / 2)) <= 0.002);
  CHECK(std::abs(f.gate - (1 - p / 2)) <= 0.002);
}

TEST_CASE("interleaving a non-Clifford gate") {
  RBConfig cfg;
  cfg.seed = 3;
  cfg.lengths = {1, 2, 4, 8};
  cfg.sequences_per_length = 5;
  cfg.interleaved = named_gate_angles("T");
  const RBResult res = rb_run(cfg, ideal_gate_implementation());
  for (double s : res.interleaved->mean_survival) CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("RB is deterministic and independent of thread count") {
  RBConfig cfg;
  cfg.seed = 4;
  cfg.shots = 500;
  cfg.lengths = {1, 4, 16};
  cfg.sequences_per_length = 6;
  const RBResult a = rb_run(cfg, depolarized(0.02));
  cfg.threads = 3;
  const RBResult b = rb_run(cfg, depolarized(0.02));
  CHECK(a.reference.mean_survival == b.reference.mean_survival);
  CHECK(a.reference.stddev == b.reference.stddev);
}

TEST_CASE("RB rejects bad configurations") {
  RBConfig cfg;
  cfg.lengths = {1, 4, 2};
  CHECK_THROWS_AS(rb_run(cfg, ideal_gate_implementation()), std::invalid_argument);
  cfg.lengths = {};
  CHECK_THROWS_AS(rb_run(cfg, ideal_gate_implementation()), std::invalid_argument);
}

TEST_CASE("RB CSV layout") {
  RBConfig cfg;
  cfg.lengths = {1, 2, 3};
  cfg.sequences_per_length = 2;
  std::ostringstream os;
  write_rb_csv(os, rb_run(cfg, ideal_gate_implementation()).reference);
  CHECK(os.str().rfind("m,mean_survival,stddev,n_sequences\n1,", 0) == 0);
}
