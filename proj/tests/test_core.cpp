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
#include <numeric>

#include "qthermo/core.hpp"

using namespace qthermo;
using Catch::Approx;

TEST_CASE("Hamiltonian shifts levels to a zero ground", "[core]") {
  Hamiltonian h({2.0, 3.5, 7.0});
  CHECK(h.level(0) == 0.0);
  CHECK(h.level(1) == 1.5);
  CHECK(h.level(2) == 5.0);
  CHECK(h.offset() == 2.0);
  CHECK(h.original_levels() == std::vector<double>{2.0, 3.5, 7.0});
  CHECK_THROWS_AS(Hamiltonian({1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(Hamiltonian({}), DomainError);
  CHECK_THROWS_AS(Hamiltonian({0.0, NAN}), DomainError);
}

TEST_CASE("inverse temperature rejects negative and non-finite values", "[core]") {
  CHECK_THROWS_AS(InverseTemperature(-0.1), DomainError);
  CHECK_THROWS_AS(InverseTemperature(INFINITY), DomainError);
  CHECK(InverseTemperature(0.0).infinite_temperature());
}

TEST_CASE("Bohr spectrum degeneracy", "[core]") {
  CHECK(bohr_spectrum(Hamiltonian({0.0, 1.0, 2.7})).nondegenerate);
  // Equally spaced levels repeat the gap.
  CHECK_FALSE(bohr_spectrum(Hamiltonian({0.0, 1.0, 2.0})).nondegenerate);
  CHECK(supports_coherence_analysis(Hamiltonian({0.0, 1.0})));
  CHECK_FALSE(supports_coherence_analysis(Hamiltonian({0.0, 0.0})));
  CHECK(bohr_spectrum(Hamiltonian({0.0, 1.0, 2.7})).frequencies.size() == 6);
}

TEST_CASE("state validation names the violated invariant", "[core]") {
  CMatrix m(2, 2);
  m << 0.5, 0.1, 0.2, 0.5;
  auto e = validate_state(m);
  REQUIRE(e);
  CHECK(e->violation() == StateViolation::hermiticity);

  m << 0.6, 0.0, 0.0, 0.5;
  e = validate_state(m);
  REQUIRE(e);
  CHECK(e->violation() == StateViolation::trace);
  CHECK(e->magnitude() == Approx(0.1));

  m << 1.2, 0.0, 0.0, -0.2;
  e = validate_state(m);
  REQUIRE(e);
  CHECK(e->violation() == StateViolation::positivity);
  CHECK(e->magnitude() == Approx(-0.2));

  CHECK_FALSE(validate_state(CMatrix(CMatrix::Zero(2, 3))) == std::nullopt);
  CHECK_THROWS_AS(assert_state(m), StateError);
}

TEST_CASE("random density matrices pass validation", "[core]") {
  Rng rng(11);
  for (int s = 0; s < 200; ++s) {
    const Eigen::Index d = 2 + s % 4;
    CMatrix rho = random_density(d, rng, 1 + s % static_cast<int>(d));
    CHECK_FALSE(validate_state(rho));
  }
}

TEST_CASE("Gibbs state and thermodynamic quantities", "[core]") {
  Hamiltonian h({0.0, 1.0, 2.5});
  InverseTemperature beta(0.7);
  std::vector<double> g = gibbs_probabilities(h, beta);
  const double z = 1.0 + std::exp(-0.7) + std::exp(-1.75);
  CHECK(partition_function(h, beta) == Approx(z).epsilon(1e-14));
  CHECK(g[1] == Approx(std::exp(-0.7) / z).epsilon(1e-14));
  CHECK(std::accumulate(g.begin(), g.end(), 0.0) == Approx(1.0).epsilon(1e-15));

  DensityMatrix tau = gibbs_state(h, beta);
  // F(tau) = -ln Z / beta
  CHECK(free_energy(tau, h, beta) == Approx(-std::log(z) / 0.7).epsilon(1e-12));
  CHECK_THROWS_AS(free_energy(tau, h, InverseTemperature(0.0)), DomainError);

  DensityMatrix mixed = assert_state(CMatrix(CMatrix::Identity(3, 3) / 3.0));
  CHECK(von_neumann_entropy(mixed) == Approx(std::log(3.0)).epsilon(1e-13));
  DensityMatrix pure = assert_state(CMatrix((CMatrix(2, 2) << 0.5, 0.5, 0.5, 0.5).finished()));
  CHECK(std::abs(von_neumann_entropy(pure)) < 1e-12);
}

TEST_CASE("Gibbs state minimizes the free energy", "[core]") {
  Hamiltonian h({0.0, 0.4, 1.3});
  InverseTemperature beta(1.2);
  const double f_tau = free_energy(gibbs_state(h, beta), h, beta);
  Rng rng(5);
  for (int s = 0; s < 300; ++s) {
    DensityMatrix rho = assert_state(random_density(3, rng));
    CHECK(free_energy(rho, h, beta) >= f_tau - 1e-12);
  }
}

TEST_CASE("Haar unitaries are unitary and seeded", "[core]") {
  Rng a(3), b(3);
  CMatrix u = haar_unitary(5, a), v = haar_unitary(5, b);
  CHECK(max_abs(CMatrix(u.adjoint() * u - CMatrix::Identity(5, 5))) < 1e-12);
  CHECK(max_abs(CMatrix(u - v)) == 0.0);
}
