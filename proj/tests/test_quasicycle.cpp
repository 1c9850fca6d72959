// Copyright 2026 The qthermo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "qthermo/quasicycle.hpp"
#include "support.hpp"

using namespace qthermo;
using Catch::Approx;

namespace {

const double kLn2 = std::log(2.0);

QuasiCycleSpec standard(double eps = 0.0) { return QuasiCycleSpec(kLn2, 2.0 * kLn2, 1.0, eps); }

}  // namespace

TEST_CASE("quasicycle probabilities match the linear system", "[quasicycle]") {
  for (double beta : {0.3, 1.0, 2.5}) {
    QuasiCycleSpec s(kLn2, 2.0 * kLn2 + 0.1, beta);
    auto [g, residual] = testing::solve_quasicycle(s.a(), s.b());
    CHECK(residual <= 1e-12);
    CHECK(max_abs(RMatrix(quasicycle_probs(s).matrix() - g)) <= 1e-12);
    CHECK(quasicycle_probs(s).is_gibbs_stochastic(s.hamiltonian(), s.inverse_temperature(), 1e-12));
  }
}

TEST_CASE("quasicycle example in descending order", "[quasicycle]") {
  QuasiCycleSpec s = standard();
  CHECK(s.a() == Approx(0.5).epsilon(1e-15));
  CHECK(s.b() == Approx(0.25).epsilon(1e-15));
  RMatrix d = descending_view(quasicycle_probs(s).matrix());
  RMatrix expect(3, 3);
  expect << 0.0, 0.0, 1.0, 0.5, 0.5, 0.0, 0.0, 0.25, 0.75;
  CHECK(max_abs(RMatrix(d - expect)) < 1e-15);
  // (p2, p1, p0) = (0, 1/2, 1/2) -> (1/4, 3/8, 3/8)
  std::vector<double> out = quasicycle_probs(s).apply(std::vector<double>{0.5, 0.5, 0.0});
  CHECK(out[2] == Approx(0.25).epsilon(1e-15));
  CHECK(out[1] == Approx(0.375).epsilon(1e-15));
  CHECK(out[0] == Approx(0.375).epsilon(1e-15));
  CHECK_THROWS_AS(QuasiCycleSpec(2.0, 1.0, 1.0), DomainError);
}

TEST_CASE("low temperature limit freezes the upward transitions", "[quasicycle]") {
  QuasiCycleSpec s(1.0, 2.0, 60.0);
  TransitionMatrix g = quasicycle_probs(s);
  CHECK(g(1, 2) < 1e-20);
  CHECK(g(0, 1) < 1e-20);
  CHECK(g(2, 0) == 1.0);
}

TEST_CASE("perturbed family", "[quasicycle]") {
  CHECK(max_abs(RMatrix(perturbed_probs(standard(0.0)).matrix() - quasicycle_probs(standard()).matrix())) == 0.0);
  TransitionMatrix g = perturbed_probs(standard(0.01));
  CHECK(g(2, 0) == Approx(0.98).epsilon(1e-14));
  CHECK(g(1, 2) == Approx(0.475).epsilon(1e-14));
  for (auto [i, j] : {std::pair{2, 2}, {2, 1}, {1, 0}, {0, 2}}) CHECK(g(i, j) == Approx(0.01).epsilon(1e-14));

  QuasiCycleSpec base = standard();
  const double emax = perturbed_max_epsilon(base);
  CHECK(emax > 0.0);
  double slope = 0.0;
  for (int k = 0; k <= 100; ++k) {
    QuasiCycleSpec s = standard(emax * k / 100.0);
    TransitionMatrix p = perturbed_probs(s);
    CHECK(p.gibbs_defect(gibbs_probabilities(s.hamiltonian(), s.inverse_temperature())) <= 1e-12);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(p.matrix().row(i).sum() - 1.0) <= 1e-12);
    if (k > 0) slope = std::max(slope, max_abs(RMatrix(p.matrix() - quasicycle_probs(base).matrix())) / s.epsilon);
  }
  // Linear in epsilon with the measured constant.
  CHECK(slope == Approx(2.5).epsilon(1e-10));
  CHECK_THROWS_AS(perturbed_probs(standard(emax * 1.01)), DomainError);
}

TEST_CASE("von Neumann trace bound", "[quasicycle]") {
  CHECK(vonneumann_trace_bound(CMatrix::Identity(3, 3), CMatrix::Identity(3, 3)) == Approx(3.0));
  CMatrix x = CMatrix::Zero(2, 2), y = CMatrix::Zero(2, 2);
  x(0, 0) = 2.0;
  x(1, 1) = 1.0;
  y(0, 0) = 3.0;
  CHECK(vonneumann_trace_bound(x, y) == Approx(6.0));
  CHECK_THROWS_AS(vonneumann_trace_bound(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)), DimensionError);

  Rng rng(31);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto ginibre = [&](Eigen::Index n) {
    CMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = complex_t(n01(rng), n01(rng));
    return m;
  };
  for (int s = 0; s < 5; ++s) {
    CMatrix a = ginibre(4), b = ginibre(4);
    const double bound = vonneumann_trace_bound(a, b);
    CHECK(std::abs(bound - vonneumann_trace_bound(b, a)) <= 1e-10);
    CMatrix u = haar_unitary(4, rng);
    CHECK(std::abs(bound - vonneumann_trace_bound(CMatrix(u * a), b)) <= 1e-10);
    CHECK(std::abs(bound - vonneumann_trace_bound(a, CMatrix(b * u))) <= 1e-10);
    double sampled = 0.0;
    for (int k = 0; k < 2000; ++k) {
      CMatrix w = haar_unitary(4, rng), v = haar_unitary(4, rng);
      sampled = std::max(sampled, std::abs((w * a * v * b).trace()));
    }
    CHECK(sampled <= bound + 1e-10);
    double ascent = 0.0;
    for (int r = 0; r < 5; ++r) ascent = std::max(ascent, testing::polar_ascent(a, b, rng));
    CHECK(ascent <= bound + 1e-10);
    CHECK(bound - ascent <= 1e-6);
  }
}

TEST_CASE("brute-form realization and the no-go check", "[quasicycle]") {
  QuasiCycleSpec s = standard();
  BathSpec b = build_bath(s.hamiltonian(), s.inverse_temperature(), 6);
  EnergyBlockLayout lay = enumerate_blocks(s.hamiltonian(), b);
  BlockUnitary u = brute_quasicycle_unitary(lay);
  CHECK(verify_energy_conservation(u, lay, b));
  NogoReport r = nogo_check(u, lay, b, s);
  CHECK(r.checks_passed);
  CHECK_FALSE(r.saturation_possible);
  CHECK(r.zero_block_max <= 1e-10);
  CHECK(r.singular_value_deviation <= 1e-8);
  CHECK(r.min_gap > 1e-8);
  CHECK(r.alpha_measured < r.minor_bound);
  CHECK(r.minor_bound == Approx(std::sqrt(0.75 * 0.5)).epsilon(1e-14));
  for (const auto& p : r.pairs) {
    CHECK(p.unit_count_00 != p.unit_count_11);
    CHECK(p.overlap <= p.vn_bound + 1e-12);
    CHECK(p.vn_bound <= p.cs_bound + 1e-12);
  }
}

TEST_CASE("no-go check rejects a unitary that misses the cycle", "[quasicycle]") {
  QuasiCycleSpec s = standard();
  BathSpec b = build_bath(s.hamiltonian(), s.inverse_temperature(), 6);
  EnergyBlockLayout lay = enumerate_blocks(s.hamiltonian(), b);
  try {
    (void)nogo_check(identity_unitary(lay), lay, b, s);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("p(") != std::string::npos);
  }
  // Equal segment dimensions (infinite temperature bath) are not generic.
  QuasiCycleSpec hot(kLn2, 2.0 * kLn2, 1e-12);
  BathOptions opt;
  opt.quantum = kLn2;
  BathSpec flat = build_bath(hot.hamiltonian(), InverseTemperature(0.0), 6, opt);
  EnergyBlockLayout flay = enumerate_blocks(hot.hamiltonian(), flat);
  CHECK_THROWS_AS(nogo_check(brute_quasicycle_unitary(flay), flay, flat, hot), PreconditionError);
}

TEST_CASE("conjecture search is deterministic and monotone", "[quasicycle]") {
  QuasiCycleSpec s = standard(0.01);
  BathSpec b = build_bath(s.hamiltonian(), s.inverse_temperature(), 6);
  EnergyBlockLayout lay = enumerate_blocks(s.hamiltonian(), b);
  SearchOptions opt;
  opt.budget = 150;
  opt.restarts = 2;
  opt.seed = 3;
  SearchReport r1 = conjecture_search(s, lay, b, opt), r2 = conjecture_search(s, lay, b, opt);
  REQUIRE(r1.status == "ok");
  CHECK(r1.best_alpha == r2.best_alpha);
  CHECK(r1.trace.size() == r2.trace.size());
  CHECK(r1.g_deviation <= opt.tol_G);
  CHECK(r1.best_alpha <= r1.bound + 1e-12);
  CHECK(r1.gap == Approx(r1.bound - r1.best_alpha).margin(1e-15));
  for (std::size_t k = 1; k < r1.trace.size(); ++k) CHECK(r1.trace[k].best_alpha >= r1.trace[k - 1].best_alpha);
}

TEST_CASE("search at epsilon zero reproduces the exact cycle", "[quasicycle]") {
  QuasiCycleSpec s = standard(0.0);
  BathSpec b = build_bath(s.hamiltonian(), s.inverse_temperature(), 6);
  EnergyBlockLayout lay = enumerate_blocks(s.hamiltonian(), b);
  SearchOptions opt;
  opt.budget = 100;
  opt.restarts = 1;
  SearchReport r = conjecture_search(s, lay, b, opt);
  REQUIRE(r.status == "ok");
  CHECK(r.g_deviation <= 1e-6);
  CHECK(r.best_alpha < r.bound);
}
