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


// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qthermo/qthermo.hpp"
#include "../support.hpp"

using namespace qthermo;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// 1 -------------------------------------------------------------------------
void qubit_kappa_grid() {
  double worst = 0.0;
  bool diagonal_exact = true, threw = false;
  int points = 0;
  for (double bde : {0.1, std::log(2.0), 3.0}) {
    const double g0 = 1.0 / (1.0 + std::exp(-bde));
    InverseTemperature beta(1.0);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) {
        const double p = i / 49.0, q = j / 49.0;
        if (i == j) {
          if (qubit_kappa(p, q, beta, bde).value != 1.0) diagonal_exact = false;
          continue;
        }
        if (std::abs(p - g0) < 1e-9) continue;
        auto [x, y] = testing::solve_qubit(p, q, g0);
        if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) continue;
        try {
          const double k = qubit_kappa(p, q, beta, bde).value;
          worst = std::max(worst, std::abs(k * k - x * y));
          ++points;
        } catch (const Error&) {
          threw = true;
        }
      }
  }
  report(1, "qubit kappa equivalence", worst <= 1e-12 && diagonal_exact && !threw,
         fmt("%.0f feasible off-diagonal points, max |kappa^2 - p00 p11| = %.3g", points, worst) +
             (diagonal_exact ? ", kappa(p,p) = 1 exactly" : ", kappa(p,p) != 1"));
}

// 2 -------------------------------------------------------------------------
void minor_bound_necessity() {
  Hamiltonian h({0.0, std::log(2.0)});
  InverseTemperature beta(1.0);
  BathSpec b = build_bath(h, beta, 6);
  EnergyBlockLayout lay = enumerate_blocks(h, b);
  double excess = -1.0, min_eig = 1.0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    InducedChannel ch = random_to_channel(lay, b, h, 1000 + s);
    const RMatrix& g = ch.G_full;
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j)
        if (i != j) excess = std::max(excess, std::abs(ch.alpha_full(i, j)) - std::sqrt(g(i, i) * g(j, j)));
    min_eig = std::min(min_eig, dmp_check(damping_matrix(ch.transitions(ChannelView::full),
                                                         ch.damping(ChannelView::full)))
                                    .min_eigenvalue);
  }
  report(2, "minor-bound necessity", excess <= 1e-9 && min_eig >= -1e-9,
         fmt("1000 Haar block unitaries, max |alpha| - bound = %.3g, min DMP eigenvalue = %.3g", excess, min_eig));
}

// 3 -------------------------------------------------------------------------
void qubit_tightness() {
  Hamiltonian h({0.0, std::log(2.0)});
  InverseTemperature beta(1.0);
  const double kappa = std::sqrt((6.0 / 7.0) * (5.0 / 7.0));
  TransitionMatrix target = qubit_transition_probs(0.9, 0.8, beta, std::log(2.0));
  BathOptions opt;
  opt.scale = 7;
  bool ok = true;
  double prev_gap = 1.0, worst_interior = 0.0;
  std::string detail = fmt("kappa = %.10f;", kappa);
  for (std::size_t rungs : {4, 6, 8}) {
    BathSpec b = build_bath(h, beta, rungs, opt);
    EnergyBlockLayout lay = enumerate_blocks(h, b);
    InducedChannel ch = induced_channel(optimal_qubit_unitary(target, lay, b).unitary, lay, b, h);
    const double interior = std::abs(ch.alpha_interior(0, 1));
    const double gap = std::abs(kappa - std::abs(ch.alpha_full(0, 1)));
    worst_interior = std::max(worst_interior, std::abs(interior - kappa));
    ok = ok && std::abs(interior - kappa) <= 1e-10 && gap <= ch.boundary_mass && gap < prev_gap;
    prev_gap = gap;
    detail += fmt(" rungs %.0f: gap %.4g (boundary mass %.4g);", static_cast<double>(rungs), gap, ch.boundary_mass);
  }
  detail += fmt(" max interior error %.3g", worst_interior);
  report(3, "qubit tightness", ok, detail);
}

// 4 -------------------------------------------------------------------------
bool majorizes(std::vector<int> p, std::vector<int> q) {
  std::sort(p.rbegin(), p.rend());
  std::sort(q.rbegin(), q.rend());
  int sp = 0, sq = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sp += p[i];
    sq += q[i];
    if (sp < sq) return false;
  }
  return true;
}

void majorization_oracle() {
  std::vector<std::vector<int>> grid;
  for (int a = 0; a <= 20; ++a)
    for (int b = 0; a + b <= 20; ++b) grid.push_back({a, b, 20 - a - b});
  auto real = [](const std::vector<int>& v) {
    return std::vector<double>{v[0] / 20.0, v[1] / 20.0, v[2] / 20.0};
  };
  Hamiltonian h({0.0, 0.5, 1.3});
  std::vector<ThermoCurve> curves;
  for (const auto& p : grid) curves.push_back(thermo_curve(real(p), h, InverseTemperature(0.0)));
  long disagreements = 0, pairs = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) {
      ++pairs;
      if (curve_dominates(curves[i], curves[j]) != majorizes(grid[i], grid[j])) ++disagreements;
    }
  InverseTemperature one(1.0);
  ThermoCurve gibbs = thermo_curve(gibbs_probabilities(h, one), h, one);
  int undominated = 0;
  for (const auto& p : grid)
    if (!curve_dominates(thermo_curve(real(p), h, one), gibbs)) ++undominated;
  report(4, "thermo-majorization oracle", disagreements == 0 && undominated == 0,
         fmt("%.0f pairs, %.0f disagreements; Gibbs curve undominated by %.0f grid states",
             static_cast<double>(pairs), static_cast<double>(disagreements), undominated));
}

// 5 -------------------------------------------------------------------------
void eto_soundness() {
  Rng rng(2026);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  InverseTemperature beta(1.0);
  const std::vector<Hamiltonian> hs{Hamiltonian({0.0, std::log(2.0)}), Hamiltonian({0.0, 1.0, 2.7}),
                                    Hamiltonian({0.0, 1.0, 2.5, 4.3})};
  long mismatches = 0, built = 0, rejected = 0, skipped = 0;
  double worst_fixed = 0.0, worst_cov = 0.0;
  for (int s = 0; s < 10000; ++s) {
    const Hamiltonian& h = hs[static_cast<std::size_t>(s % 3)];
    const auto gibbs = gibbs_probabilities(h, beta);
    RMatrix g = testing::random_gibbs_stochastic(gibbs, rng);
    CMatrix a = testing::random_damping(g, 1.4 * u(rng), rng);
    bool inside;
    if (h.dimension() == 2) {
      const double margin = g(0, 0) * g(1, 1) - std::norm(a(0, 1));
      if (std::abs(margin) < 1e-8) {
        ++skipped;
        continue;
      }
      inside = margin > 0.0;
    } else {
      const double e = testing::min_eig(testing::direct_choi(g, a));
      if (std::abs(e) < 1e-8) {
        ++skipped;
        continue;
      }
      inside = e > 0.0;
    }
    try {
      ETOChannel ch = build_eto(TransitionMatrix(g), DampingFactors(a), h, beta);
      ++built;
      if (!inside) ++mismatches;
      worst_fixed = std::max(worst_fixed, gibbs_fixed_point_defect(ch));
      worst_cov = std::max(worst_cov, verify_covariance(ch, 100, static_cast<std::uint64_t>(s)).max_deviation);
    } catch (const NotCompletelyPositiveError&) {
      ++rejected;
      if (inside) ++mismatches;
    }
  }
  report(5, "ETO construction soundness", mismatches == 0 && worst_fixed <= 1e-10 && worst_cov <= 1e-9,
         fmt("%.0f built, %.0f rejected, ", static_cast<double>(built), static_cast<double>(rejected)) +
             fmt("%.0f mismatches (%.0f within 1e-8 of the boundary skipped), ", static_cast<double>(mismatches),
                 static_cast<double>(skipped)) +
             fmt("max Gibbs defect %.3g, max covariance deviation %.3g", worst_fixed, worst_cov));
}

// 6 -------------------------------------------------------------------------
void quasicycle_probabilities() {
  QuasiCycleSpec spec(std::log(2.0), 2.0 * std::log(2.0), 1.0);
  auto [oracle, residual] = testing::solve_quasicycle(0.5, 0.25);
  const double diff = max_abs(RMatrix(quasicycle_probs(spec).matrix() - oracle));
  std::vector<double> out = quasicycle_probs(spec).apply(std::vector<double>{0.5, 0.5, 0.0});
  const double map_err =
      std::max({std::abs(out[2] - 0.25), std::abs(out[1] - 0.375), std::abs(out[0] - 0.375)});
  const double emax = perturbed_max_epsilon(spec);
  double stoch = 0.0;
  for (int k = 0; k <= 200; ++k) {
    QuasiCycleSpec s(spec.dE21, spec.dE20, spec.beta, emax * k / 200.0);
    TransitionMatrix p = perturbed_probs(s);
    stoch = std::max(stoch, p.gibbs_defect(gibbs_probabilities(s.hamiltonian(), s.inverse_temperature())));
    for (int i = 0; i < 3; ++i) stoch = std::max(stoch, std::abs(p.matrix().row(i).sum() - 1.0));
  }
  report(6, "quasicycle probabilities", residual <= 1e-12 && diff <= 1e-12 && map_err <= 1e-12 && stoch <= 1e-12,
         fmt("linear-solve difference %.3g (residual %.3g), ", diff, residual) +
             fmt("mapping error %.3g, max stochasticity defect on 201 eps in [0, %.4g] = %.3g", map_err, emax, stoch));
}

// 7 -------------------------------------------------------------------------
void nogo_evidence() {
  QuasiCycleSpec spec(std::log(2.0), 2.0 * std::log(2.0), 1.0);
  BathSpec b = build_bath(spec.hamiltonian(), spec.inverse_temperature(), 6);
  EnergyBlockLayout lay = enumerate_blocks(spec.hamiltonian(), b);
  NogoReport r = nogo_check(brute_quasicycle_unitary(lay), lay, b, spec);
  const bool nogo_ok = r.zero_block_max <= 1e-10 && r.singular_value_deviation <= 1e-8 && r.min_gap > 1e-8;

  QuasiCycleSpec pert(spec.dE21, spec.dE20, spec.beta, 0.01);
  SearchOptions opt;
  opt.budget = 10000;
  opt.seed = 7;
  const auto t0 = std::chrono::steady_clock::now();
  SearchReport s = conjecture_search(pert, lay, b, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool search_ok = s.status == "ok" && s.best_alpha < s.bound;
  report(7, "no-go evidence", nogo_ok && search_ok,
         fmt("brute form: zero blocks %.3g, singular-value deviation %.3g, CS gap %.4g; ", r.zero_block_max,
             r.singular_value_deviation, r.min_gap) +
             "search (eps 0.01, budget 1e4, seed 7): status " + s.status +
             fmt(", best alpha %.6f, bound %.6f, ", s.best_alpha, s.bound) +
             fmt("gap %.4g, G deviation %.3g, %.1f s", s.gap, s.g_deviation, secs));
}

// 8 -------------------------------------------------------------------------
void t2_reformulation() {
  Rng rng(88);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool start_exact = true;
  double limit_err = 0.0, bound_excess = -1.0;
  for (int s = 0; s < 1000; ++s) {
    const double p0 = u(rng), T2 = 0.01 + 10.0 * u(rng), t = 5.0 * T2 * u(rng);
    if (t2_kappa(p0, 0.0, T2) != 1.0) start_exact = false;
    limit_err = std::max(limit_err, std::abs(t2_kappa(p0, 1e3 * T2, T2) - std::sqrt(p0 * (1.0 - p0))));
    bound_excess = std::max(bound_excess, t2_kappa(p0, t, T2) - t2_kappa_upper_bound(p0, t, T2));
  }
  report(8, "T2 reformulation", start_exact && limit_err <= 1e-9 && bound_excess <= 0.0,
         std::string(start_exact ? "kappa(t=0) = 1 exactly" : "kappa(t=0) != 1") +
             fmt(", limit error %.3g, max kappa - upper bound = %.3g", limit_err, bound_excess));
}

// 9 -------------------------------------------------------------------------
void free_energy_monotone() {
  Rng rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  InverseTemperature beta(1.0);
  const std::vector<Hamiltonian> hs{Hamiltonian({0.0, std::log(2.0)}), Hamiltonian({0.0, 1.0, 2.7})};
  double worst = -1e300;
  for (int c = 0; c < 500; ++c) {
    const Hamiltonian& h = hs[static_cast<std::size_t>(c % 2)];
    RMatrix g = testing::random_gibbs_stochastic(gibbs_probabilities(h, beta), rng);
    ETOChannel ch = build_eto(TransitionMatrix(g), DampingFactors(testing::random_damping(g, u(rng), rng)), h, beta);
    for (int s = 0; s < 100; ++s) {
      DensityMatrix rho = assert_state(random_density(static_cast<Eigen::Index>(h.dimension()), rng));
      worst = std::max(worst, free_energy(apply(ch, rho), h, beta) - free_energy(rho, h, beta));
    }
  }
  report(9, "free-energy monotonicity", worst <= 1e-9,
         fmt("50000 channel applications, max F(out) - F(in) = %.3g", worst));
}

}  // namespace

int main() {
  const std::vector<void (*)()> criteria{qubit_kappa_grid,         minor_bound_necessity, qubit_tightness,
                                         majorization_oracle,      eto_soundness,         quasicycle_probabilities,
                                         nogo_evidence,            t2_reformulation,      free_energy_monotone};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "criterion", false, std::string("exception: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
