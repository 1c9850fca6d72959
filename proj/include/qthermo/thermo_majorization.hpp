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

// Thermo-majorization: beta-ordering of populations, the piecewise-linear
// Lorenz-type curves built from them, and curve dominance, which decides
// whether one diagonal state can be turned into another by thermal
// operations. Includes the closed-form four-case classifier for qubits.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qthermo/core.hpp"
#include "qthermo/format.hpp"

namespace qthermo {

/// Absolute tolerance on curve comparisons.
inline constexpr double kCurveTol = 1e-9;

struct BetaOrderedEntry {
  double probability;
  double energy;
  std::size_t level;
};

/// Populations sorted by p_i e^{beta E_i}, largest first; ties go to the lower
/// energy. `permutation[k]` is the level placed at position k.
struct BetaOrderedSpectrum {
  std::vector<BetaOrderedEntry> entries;
  std::vector<std::size_t> permutation;
  double beta = 0.0;
};

struct CurvePoint {
  double x;
  double y;
};

/// Breakpoints (0,0), (x_1,y_1), ..., (Z,1) of a thermo-majorization curve.
class ThermoCurve {
 public:
  ThermoCurve() = default;
  explicit ThermoCurve(std::vector<CurvePoint> pts) : points_(std::move(pts)) {}

  const std::vector<CurvePoint>& points() const { return points_; }
  double partition_function() const { return points_.empty() ? 0.0 : points_.back().x; }

  /// Piecewise-linear interpolation. Where several breakpoints share an x
  /// (vanishing Gibbs weights) the largest y is returned.
  double operator()(double x) const {
    if (points_.empty()) return 0.0;
    if (x <= points_.front().x) return points_.front().y;
    if (x >= points_.back().x) return points_.back().y;
    double best = 0.0;
    bool found = false;
    for (std::size_t k = 1; k < points_.size(); ++k) {
      const CurvePoint& a = points_[k - 1];
      const CurvePoint& b = points_[k];
      if (x < a.x || x > b.x) continue;
      double y = (b.x == a.x) ? std::max(a.y, b.y) : a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
      best = found ? std::max(best, y) : y;
      found = true;
    }
    return best;
  }

 private:
  std::vector<CurvePoint> points_;
};

inline BetaOrderedSpectrum beta_order(std::span<const double> diag, const Hamiltonian& h,
                                      InverseTemperature beta, double tol_trace = 1e-10) {
  if (diag.size() != h.dimension()) throw DimensionError("population vector and Hamiltonian differ in size");
  double total = 0.0;
  for (double p : diag) {
    if (!std::isfinite(p) || p < -tol_trace) throw DomainError("populations must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > tol_trace) {
    std::ostringstream os;
    os << "populations sum to " << total << ", expected 1";
    throw DomainError(os.str());
  }
  BetaOrderedSpectrum out;
  out.beta = beta.value();
  std::vector<double> key(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    double p = std::max(diag[i], 0.0);
    out.entries.push_back({p, h.level(i), i});
    key[i] = p * std::exp(beta.value() * h.level(i));
  }
  std::vector<std::size_t> idx(diag.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (key[a] != key[b]) return key[a] > key[b];
    return h.level(a) < h.level(b);
  });
  std::vector<BetaOrderedEntry> sorted;
  for (std::size_t i : idx) sorted.push_back(out.entries[i]);
  out.entries = std::move(sorted);
  out.permutation = std::move(idx);
  return out;
}

inline ThermoCurve build_curve(const BetaOrderedSpectrum& s) {
  std::vector<CurvePoint> pts{{0.0, 0.0}};
  double x = 0.0, y = 0.0;
  for (const auto& e : s.entries) {
    x += std::exp(-s.beta * e.energy);
    y += e.probability;
    pts.push_back({x, y});
  }
  // Final ordinate is 1 up to rounding of the sum.
  pts.back().y = 1.0;
  return ThermoCurve(std::move(pts));
}

inline ThermoCurve thermo_curve(std::span<const double> diag, const Hamiltonian& h, InverseTemperature beta) {
  return build_curve(beta_order(diag, h, beta));
}

/// fp(x) >= fq(x) - tol for all x. Both curves are concave and piecewise
/// linear, so checking both breakpoint sets suffices.
inline bool curve_dominates(const ThermoCurve& fp, const ThermoCurve& fq, double tol = kCurveTol) {
  double zp = fp.partition_function(), zq = fq.partition_function();
  if (std::abs(zp - zq) > 1e-12 * std::max(1.0, std::abs(zp)))
    throw DimensionError("curves have different partition functions");
  for (const auto& pt : fq.points())
    if (fp(pt.x) < pt.y - tol) return false;
  for (const auto& pt : fp.points())
    if (pt.y < fq(pt.x) - tol) return false;
  return true;
}

/// CSV with header "x,y", one breakpoint per line.
inline std::string curve_to_csv(const ThermoCurve& c) {
  std::string out = "x,y\n";
  for (const auto& pt : c.points()) out += format_double(pt.x) + "," + format_double(pt.y) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Qubit classifier

enum class QubitCase { a, b, c, d };

inline const char* to_string(QubitCase c) {
  switch (c) {
    case QubitCase::a: return "a";
    case QubitCase::b: return "b";
    case QubitCase::c: return "c";
    case QubitCase::d: return "d";
  }
  return "?";
}

struct QubitDiagonalVerdict {
  QubitCase label;
  bool feasible;
};

/// Ground-level population of the qubit Gibbs state, 1 / (1 + e^{-beta dE}).
inline double gibbs_ground_population(double beta, double dE) {
  return 1.0 / (1.0 + std::exp(-beta * dE));
}

/// Decides p -> q for qubit ground populations p (input) and q (output).
/// A population is "ground-weighted" when f/(1-f) >= e^{beta dE}, i.e.
/// f >= r with r the Gibbs ground population. Cases:
///   a  both ground-weighted       feasible iff p >= q
///   b  both excited-weighted      feasible iff p <= q
///   c  p ground, q excited        feasible iff p/(1-q) >= r/(1-r)
///   d  p excited, q ground        feasible iff p/(1-q) <= r/(1-r)
/// The ratio conditions are evaluated in product form to stay finite at the
/// pure states.
inline QubitDiagonalVerdict qubit_diagonal_feasible(double p, double q, const Hamiltonian& h,
                                                    InverseTemperature beta, double tol = kCurveTol) {
  if (h.dimension() != 2) throw DimensionError("qubit classifier needs a two-level Hamiltonian");
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
    throw DomainError("qubit populations must lie in [0, 1]");
  const double dE = h.level(1) - h.level(0);
  const double w = std::exp(-beta.value() * dE);  // (1-r)/r
  const double r = 1.0 / (1.0 + w);
  const bool p_ground = p >= r;
  const bool q_ground = q >= r;
  if (p_ground && q_ground) return {QubitCase::a, p >= q - tol};
  if (!p_ground && !q_ground) return {QubitCase::b, p <= q + tol};
  if (p_ground) return {QubitCase::c, 1.0 - q <= p * w + tol};
  return {QubitCase::d, p * w <= 1.0 - q + tol};
}

}  // namespace qthermo
