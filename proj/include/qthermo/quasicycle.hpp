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

// Qutrit quasi-cycle: with the transitions 2->2, 2->1, 1->0 and 0->2
// forbidden, Gibbs-stochasticity fixes every remaining probability. Includes
// the epsilon-perturbed family, the singular-value trace bound, a check that
// exact realizations on a finite bath cannot saturate the coherence bound,
// and a seeded local search over block unitaries for the perturbed case.
//
// Matrices are indexed in level order (0, 1, 2) with 0 the ground level;
// `descending_view` gives the (2, 1, 0) arrangement.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qthermo/coherence_bounds.hpp"
#include "qthermo/core.hpp"
#include "qthermo/finite_bath_sim.hpp"

namespace qthermo {

inline constexpr double kSearchTolG = 1e-6;
inline constexpr double kZeroBlockTol = 1e-10;
inline constexpr double kSingularValueTol = 1e-8;

/// dE21 = E2 - E1 and dE20 = E2 - E0, 0 < dE21 < dE20.
struct QuasiCycleSpec {
  double dE21;
  double dE20;
  double beta;
  double epsilon = 0.0;

  QuasiCycleSpec(double e21, double e20, double b, double eps = 0.0) : dE21(e21), dE20(e20), beta(b), epsilon(eps) {
    if (!std::isfinite(e21) || !std::isfinite(e20) || !(e21 > 0.0) || !(e20 > e21))
      throw DomainError("quasi-cycle gaps need 0 < dE21 < dE20");
    if (!std::isfinite(b) || !(b > 0.0)) throw DomainError("quasi-cycle needs a finite positive beta");
    if (!std::isfinite(eps) || eps < 0.0) throw DomainError("epsilon must be non-negative");
  }

  /// e^{-beta dE21}
  double a() const { return std::exp(-beta * dE21); }
  /// e^{-beta dE20}
  double b() const { return std::exp(-beta * dE20); }
  /// e^{-beta dE10}, dE10 = dE20 - dE21.
  double c() const { return std::exp(-beta * (dE20 - dE21)); }

  Hamiltonian hamiltonian() const { return Hamiltonian({0.0, dE20 - dE21, dE20}); }
  InverseTemperature inverse_temperature() const { return InverseTemperature(beta); }
};

inline RMatrix descending_view(const RMatrix& g) { return g.reverse(); }

/// Probabilities from the exponentials a = e^{-beta dE21}, b = e^{-beta dE20}.
inline RMatrix quasicycle_matrix(double a, double b) {
  RMatrix g = RMatrix::Zero(3, 3);
  g(2, 0) = 1.0;
  g(1, 2) = a;
  g(1, 1) = 1.0 - a;
  g(0, 1) = b;
  g(0, 0) = 1.0 - b;
  return g;
}

inline TransitionMatrix quasicycle_probs(const QuasiCycleSpec& spec) {
  return TransitionMatrix(quasicycle_matrix(spec.a(), spec.b()));
}

namespace detail {

/// Entries of the perturbed matrix as v0 + v1 * eps.
inline void perturbed_coefficients(double a, double b, double c, RMatrix& v0, RMatrix& v1) {
  v0 = quasicycle_matrix(a, b);
  v1 = RMatrix::Zero(3, 3);
  v1(2, 2) = 1.0;
  v1(2, 1) = 1.0;
  v1(2, 0) = -2.0;
  v1(1, 0) = 1.0;
  v1(1, 2) = -a - 1.0 / c;
  v1(1, 1) = -(1.0 - a) + 1.0 / c;
  v1(0, 2) = 1.0;
  v1(0, 1) = -2.0 * b + c - 1.0;
  v1(0, 0) = 2.0 * b - c;
}

}  // namespace detail

/// Largest epsilon keeping every perturbed entry inside [0, 1].
inline double perturbed_max_epsilon(const QuasiCycleSpec& spec) {
  RMatrix v0, v1;
  detail::perturbed_coefficients(spec.a(), spec.b(), spec.c(), v0, v1);
  double emax = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) {
      if (v1(i, j) < 0.0) emax = std::min(emax, v0(i, j) / -v1(i, j));
      if (v1(i, j) > 0.0) emax = std::min(emax, (1.0 - v0(i, j)) / v1(i, j));
    }
  return emax;
}

/// Perturbed family with p(2->2) = p(2->1) = p(1->0) = p(0->2) = epsilon.
inline TransitionMatrix perturbed_probs(const QuasiCycleSpec& spec) {
  const double emax = perturbed_max_epsilon(spec);
  if (spec.epsilon > emax) {
    std::ostringstream os;
    os << "epsilon = " << spec.epsilon << " exceeds the admissible maximum " << emax;
    throw DomainError(os.str());
  }
  RMatrix v0, v1;
  detail::perturbed_coefficients(spec.a(), spec.b(), spec.c(), v0, v1);
  RMatrix g = v0 + spec.epsilon * v1;
  // Exact zeros at epsilon = 0.
  if (spec.epsilon == 0.0) g = v0;
  return TransitionMatrix(g, 1e-12);
}

/// sum_i sigma_i(X) sigma_i(Y), both sorted descending: the supremum of
/// |tr(W X V Y)| over unitaries W, V.
inline double vonneumann_trace_bound(const CMatrix& x, const CMatrix& y) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
    throw DimensionError("trace bound needs square matrices of equal size");
  RVector sx = singular_values(x), sy = singular_values(y);
  return sx.dot(sy);
}

// ---------------------------------------------------------------------------
// Exact realization on a finite bath

/// Permutation realization: in each interior block the level-2 segment moves
/// into the first d2 level-0 states, the first d2 level-1 states move to
/// level 2 and the first d2 level-0 states move to level 1.
inline BlockUnitary brute_quasicycle_unitary(const EnergyBlockLayout& lay) {
  if (lay.n_levels != 3) throw DimensionError("quasi-cycle realization needs three levels");
  BlockUnitary u(lay);
  for (const auto& blk : lay.blocks) {
    if (!blk.interior) continue;
    const Segment* s0 = blk.segment_for(0);
    const Segment* s1 = blk.segment_for(1);
    const Segment* s2 = blk.segment_for(2);
    if (s2->dimension > s1->dimension || s1->dimension > s0->dimension)
      throw PreconditionError("segment dimensions must not increase with the system level");
    const auto n = static_cast<Eigen::Index>(blk.dimension);
    std::vector<std::size_t> target(blk.dimension);
    for (std::size_t c = 0; c < blk.dimension; ++c) target[c] = c;
    for (std::size_t m = 0; m < s2->dimension; ++m) {
      target[s2->offset + m] = s0->offset + m;
      target[s1->offset + m] = s2->offset + m;
      target[s0->offset + m] = s1->offset + m;
    }
    CMatrix p = CMatrix::Zero(n, n);
    for (std::size_t c = 0; c < blk.dimension; ++c)
      p(static_cast<Eigen::Index>(target[c]), static_cast<Eigen::Index>(c)) = 1.0;
    u.set_block(blk.index, std::move(p));
  }
  return u;
}

struct CoherencePairEvidence {
  /// Bath rung of the coherence |0><1| input.
  std::size_t rung = 0;
  std::size_t unit_count_00 = 0;
  std::size_t unit_count_11 = 0;
  /// sqrt(tr u00 u00^dagger tr u11 u11^dagger) - |tr u00 u11^dagger|
  double cs_gap = 0.0;
  double cs_bound = 0.0;
  double vn_bound = 0.0;
  double overlap = 0.0;
};

struct NogoReport {
  bool saturation_possible = true;
  bool checks_passed = false;
  double zero_block_max = 0.0;
  double singular_value_deviation = 0.0;
  double min_gap = 0.0;
  std::vector<CoherencePairEvidence> pairs;
  /// Index into `pairs` with the smallest gap.
  std::size_t witness = 0;
  double alpha_measured = 0.0;
  double minor_bound = 0.0;
};

namespace detail {

inline const char* level_name(std::size_t i) {
  static const char* names[] = {"0", "1", "2"};
  return i < 3 ? names[i] : "?";
}

inline void require_realizes(const RMatrix& measured, const RMatrix& target, double tol) {
  double worst = 0.0;
  Eigen::Index wi = 0, wj = 0;
  for (Eigen::Index i = 0; i < target.rows(); ++i)
    for (Eigen::Index j = 0; j < target.cols(); ++j) {
      const double dev = std::abs(measured(i, j) - target(i, j));
      if (dev > worst) {
        worst = dev;
        wi = i;
        wj = j;
      }
    }
  if (worst > tol) {
    std::ostringstream os;
    os << "unitary does not realize the quasi-cycle: p(" << level_name(static_cast<std::size_t>(wi)) << "->"
       << level_name(static_cast<std::size_t>(wj)) << ") = " << measured(wi, wj) << ", expected " << target(wi, wj);
    throw PreconditionError(os.str());
  }
}

inline std::size_t count_unit(const RVector& s, double tol) {
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (std::abs(s(i) - 1.0) <= tol) ++n;
  return n;
}

inline double zero_one_deviation(const RVector& s) {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) dev = std::max(dev, std::min(std::abs(s(i)), std::abs(s(i) - 1.0)));
  return dev;
}

}  // namespace detail

/// Verifies that an exact realization of the quasi-cycle has the vanishing
/// sub-blocks u(2->2), u(2->1), u(1->0), u(0->2), diagonal sub-blocks with
/// singular values in {0, 1}, and a strict Cauchy-Schwarz gap for every
/// coherence pair, so the coherence bound cannot be reached.
inline NogoReport nogo_check(const BlockUnitary& u, const EnergyBlockLayout& lay, const BathSpec& bath,
                             const QuasiCycleSpec& spec) {
  if (lay.n_levels != 3) throw DimensionError("quasi-cycle check needs three levels");
  for (const auto& blk : lay.blocks) {
    if (!blk.interior) continue;
    if (!(blk.segment_for(0)->dimension > blk.segment_for(1)->dimension &&
          blk.segment_for(1)->dimension > blk.segment_for(2)->dimension))
      throw PreconditionError("bath must give strictly decreasing segment dimensions d0 > d1 > d2");
  }
  const Hamiltonian h = spec.hamiltonian();
  InducedChannel ic = induced_channel(u, lay, bath, h);
  const RMatrix target = quasicycle_matrix(spec.a(), spec.b());
  detail::require_realizes(ic.G_interior, target, 1e-10);

  NogoReport rep;
  rep.alpha_measured = std::abs(ic.alpha_interior(0, 1));
  rep.minor_bound = std::sqrt(target(0, 0) * target(1, 1));
  const std::size_t forbidden[4][2] = {{2, 2}, {2, 1}, {1, 0}, {0, 2}};
  for (std::size_t k : ic.interior_rungs) {
    for (const auto& f : forbidden) {
      const std::size_t t = lay.block_of(f[0], k);
      rep.zero_block_max = std::max(rep.zero_block_max, max_abs(u.sub(lay, t, f[1], f[0])));
    }
    CMatrix x = u.sub(lay, lay.block_of(0, k), 0, 0);
    CMatrix y = u.sub(lay, lay.block_of(1, k), 1, 1);
    RVector sx = singular_values(x), sy = singular_values(y);
    rep.singular_value_deviation =
        std::max({rep.singular_value_deviation, detail::zero_one_deviation(sx), detail::zero_one_deviation(sy)});
    CoherencePairEvidence ev;
    ev.rung = k;
    ev.unit_count_00 = detail::count_unit(sx, kSingularValueTol);
    ev.unit_count_11 = detail::count_unit(sy, kSingularValueTol);
    ev.cs_bound = std::sqrt(x.squaredNorm() * y.squaredNorm());
    ev.overlap = std::abs(frobenius_inner(x, y));
    ev.vn_bound = vonneumann_trace_bound(x, y);
    ev.cs_gap = ev.cs_bound - ev.overlap;
    rep.pairs.push_back(ev);
  }
  if (rep.pairs.empty()) throw PreconditionError("bath has no interior rungs for the coherence pair");
  rep.min_gap = rep.pairs[0].cs_gap;
  for (std::size_t p = 1; p < rep.pairs.size(); ++p)
    if (rep.pairs[p].cs_gap < rep.min_gap) {
      rep.min_gap = rep.pairs[p].cs_gap;
      rep.witness = p;
    }
  rep.checks_passed = rep.zero_block_max <= kZeroBlockTol && rep.singular_value_deviation <= kSingularValueTol &&
                      rep.min_gap > 1e-8;
  rep.saturation_possible = !(rep.min_gap > 1e-8);
  return rep;
}

// ---------------------------------------------------------------------------
// Local search

struct SearchOptions {
  std::size_t budget = 10000;
  std::uint64_t seed = 1;
  std::size_t restarts = 4;
  double tol_G = kSearchTolG;
  /// Generators per Gauss-Newton restoration step.
  std::size_t generators = 24;
  /// Larger pool for the first restoration after the kicks; most generators
  /// have a vanishing Jacobian near the permutation start.
  std::size_t start_generators = 256;
};

struct SearchTracePoint {
  std::size_t iteration;
  double best_alpha;
  double gap;
};

struct SearchReport {
  /// "ok" or "infeasible" (no start point matched G within tol_G).
  std::string status = "ok";
  double best_alpha = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  /// max |G_measured - G_target| of the reported unitary.
  double g_deviation = 0.0;
  std::size_t iterations = 0;
  std::size_t accepted = 0;
  std::size_t restarts = 0;
  std::vector<SearchTracePoint> trace;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Givens {
  std::size_t block;
  Eigen::Index a;
  Eigen::Index b;
  double phase;
};

/// Search state: dense unitaries on the blocks reached by the interior rungs.
class SearchState {
 public:
  SearchState(const EnergyBlockLayout& lay, const BathSpec& bath, const RMatrix& target)
      : lay_(&lay), bath_(&bath), target_(target), rungs_(lay.common_interior_rungs()) {
    for (std::size_t k : rungs_) wk_ += bath.rung_weight(k);
    for (std::size_t k : rungs_)
      for (std::size_t i = 0; i < lay.n_levels; ++i) {
        const std::size_t t = lay.block_of(i, k);
        if (std::find(blocks_.begin(), blocks_.end(), t) == blocks_.end()) blocks_.push_back(t);
      }
    std::sort(blocks_.begin(), blocks_.end());
  }

  const std::vector<std::size_t>& blocks() const { return blocks_; }
  const std::vector<std::size_t>& rungs() const { return rungs_; }

  void load(const BlockUnitary& u) {
    mats_.clear();
    for (std::size_t t : blocks_) mats_.push_back(u.block(t));
  }
  BlockUnitary to_unitary() const {
    BlockUnitary u(*lay_);
    for (std::size_t p = 0; p < blocks_.size(); ++p) u.set_block(blocks_[p], mats_[p]);
    return u;
  }
  std::vector<CMatrix>& matrices() { return mats_; }

  /// Row index range [offset, offset + dim) of `level` in block position p.
  const Segment* seg(std::size_t p, std::size_t level) const {
    return lay_->blocks[blocks_[p]].segment_for(level);
  }

  RMatrix transitions() const {
    const std::size_t d = lay_->n_levels;
    RMatrix g = RMatrix::Zero(d, d);
    for (std::size_t k : rungs_)
      for (std::size_t i = 0; i < d; ++i) {
        const std::size_t p = position(lay_->block_of(i, k));
        const Segment* in = seg(p, i);
        for (std::size_t l = 0; l < d; ++l) {
          const Segment* o = seg(p, l);
          const double nrm = mats_[p]
                                 .block(static_cast<Eigen::Index>(o->offset), static_cast<Eigen::Index>(in->offset),
                                        static_cast<Eigen::Index>(o->dimension), static_cast<Eigen::Index>(in->dimension))
                                 .squaredNorm();
          g(i, l) += bath_->state_weight[k] * nrm;
        }
      }
    return g / wk_;
  }

  double deviation() const { return max_abs(RMatrix(transitions() - target_)); }

  CMatrix x_block(std::size_t k) const { return diag_block(lay_->block_of(0, k), 0); }
  CMatrix y_block(std::size_t k) const { return diag_block(lay_->block_of(1, k), 1); }

  /// Coherence factor reachable by aligning the singular vectors of each
  /// coherence pair with G-preserving local rotations.
  double aligned_alpha() const {
    double s = 0.0;
    for (std::size_t k : rungs_) s += bath_->state_weight[k] * vonneumann_trace_bound(x_block(k), y_block(k));
    return s / wk_;
  }

  void apply(const Givens& gv, double theta) {
    CMatrix& m = mats_[gv.block];
    const double c = std::cos(theta), s = std::sin(theta);
    const complex_t e = std::polar(1.0, gv.phase);
    Eigen::RowVectorXcd ra = m.row(gv.a), rb = m.row(gv.b);
    m.row(gv.a) = c * ra - s * std::conj(e) * rb;
    m.row(gv.b) = s * e * ra + c * rb;
  }

  /// d G(i -> l) / d theta at theta = 0 for the off-diagonal entries.
  Eigen::VectorXd jacobian_column(const Givens& gv) const {
    const std::size_t d = lay_->n_levels;
    Eigen::VectorXd col = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d * (d - 1)));
    const std::size_t t = blocks_[gv.block];
    const std::size_t la = level_of_row(gv.block, gv.a), lb = level_of_row(gv.block, gv.b);
    const CMatrix& m = mats_[gv.block];
    const complex_t e = std::polar(1.0, gv.phase);
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t n = lay_->level_index[i];
      if (t < n) continue;
      const std::size_t k = t - n;
      if (std::find(rungs_.begin(), rungs_.end(), k) == rungs_.end()) continue;
      const Segment* in = seg(gv.block, i);
      complex_t inner = 0.0;
      for (std::size_t c = in->offset; c < in->offset + in->dimension; ++c)
        inner += m(gv.a, static_cast<Eigen::Index>(c)) * std::conj(m(gv.b, static_cast<Eigen::Index>(c)));
      const double dv = 2.0 * (e * inner).real() * bath_->state_weight[k] / wk_;
      add_offdiag(col, i, la, -dv);
      add_offdiag(col, i, lb, dv);
    }
    return col;
  }

  Eigen::VectorXd offdiag_residual() const {
    const std::size_t d = lay_->n_levels;
    RMatrix g = transitions();
    Eigen::VectorXd r(static_cast<Eigen::Index>(d * (d - 1)));
    Eigen::Index p = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t l = 0; l < d; ++l)
        if (i != l) r(p++) = target_(i, l) - g(i, l);
    return r;
  }

  Givens random_generator(Rng& rng) const {
    std::uniform_int_distribution<std::size_t> pick_block(0, blocks_.size() - 1);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::acos(-1.0));
    for (;;) {
      const std::size_t p = pick_block(rng);
      const auto n = static_cast<Eigen::Index>(lay_->blocks[blocks_[p]].dimension);
      std::uniform_int_distribution<Eigen::Index> row(0, n - 1);
      const Eigen::Index a = row(rng), b = row(rng);
      if (level_of_row(p, a) == level_of_row(p, b)) continue;
      return {p, a, b, phase(rng)};
    }
  }

  /// Local Haar rotation of every output segment (leaves G and the aligned
  /// coherence factor unchanged).
  void randomize_locals(Rng& rng) {
    for (std::size_t p = 0; p < blocks_.size(); ++p)
      for (const auto& s : lay_->blocks[blocks_[p]].segments) {
        const auto o = static_cast<Eigen::Index>(s.offset), n = static_cast<Eigen::Index>(s.dimension);
        CMatrix w = haar_unitary(n, rng);
        mats_[p].middleRows(o, n) = w * mats_[p].middleRows(o, n);
      }
  }

  /// Rotates the level-1 segment of the Y block of every rung so that
  /// tr(X Y^dagger) equals the singular-value bound.
  void align() {
    for (std::size_t k : rungs_) {
      const CMatrix x = x_block(k), y = y_block(k);
      Eigen::JacobiSVD<CMatrix> sx(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::JacobiSVD<CMatrix> sy(y, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const CMatrix w = sx.matrixU() * sy.matrixU().adjoint();
      const CMatrix v = sy.matrixV() * sx.matrixV().adjoint();
      const std::size_t p = position(lay_->block_of(1, k));
      const Segment* s = seg(p, 1);
      const auto o = static_cast<Eigen::Index>(s->offset), n = static_cast<Eigen::Index>(s->dimension);
      mats_[p].middleRows(o, n) = w * mats_[p].middleRows(o, n);
      mats_[p].middleCols(o, n) = mats_[p].middleCols(o, n) * v;
    }
  }

  std::size_t position(std::size_t t) const {
    return static_cast<std::size_t>(std::find(blocks_.begin(), blocks_.end(), t) - blocks_.begin());
  }

 private:
  CMatrix diag_block(std::size_t t, std::size_t level) const {
    const Segment* s = seg(position(t), level);
    const auto o = static_cast<Eigen::Index>(s->offset), n = static_cast<Eigen::Index>(s->dimension);
    return mats_[position(t)].block(o, o, n, n);
  }

  std::size_t level_of_row(std::size_t p, Eigen::Index r) const {
    for (const auto& s : lay_->blocks[blocks_[p]].segments)
      if (static_cast<std::size_t>(r) >= s.offset && static_cast<std::size_t>(r) < s.offset + s.dimension)
        return s.level;
    return 0;
  }

  void add_offdiag(Eigen::VectorXd& col, std::size_t i, std::size_t l, double v) const {
    if (i == l) return;
    const std::size_t d = lay_->n_levels;
    col(static_cast<Eigen::Index>(i * (d - 1) + (l < i ? l : l - 1))) += v;
  }

  const EnergyBlockLayout* lay_;
  const BathSpec* bath_;
  RMatrix target_;
  std::vector<std::size_t> rungs_;
  double wk_ = 0.0;
  std::vector<std::size_t> blocks_;
  std::vector<CMatrix> mats_;
};

/// Gauss-Newton restoration of G with random Givens generators.
inline bool restore(SearchState& st, Rng& rng, std::size_t generators, double tol) {
  double res = st.offdiag_residual().cwiseAbs().maxCoeff();
  for (int round = 0; round < 40; ++round) {
    if (res <= tol) return true;
    const Eigen::VectorXd r = st.offdiag_residual();
    std::vector<Givens> gens;
    Eigen::MatrixXd jac(r.size(), static_cast<Eigen::Index>(generators));
    for (std::size_t m = 0; m < generators; ++m) {
      gens.push_back(st.random_generator(rng));
      jac.col(static_cast<Eigen::Index>(m)) = st.jacobian_column(gens.back());
    }
    Eigen::VectorXd theta = jac.completeOrthogonalDecomposition().solve(r);
    if (!theta.allFinite()) return false;
    // Backtracking: halve the step until the residual drops.
    double lambda = 1.0;
    for (int tries = 0; tries < 8; ++tries, lambda *= 0.5) {
      SearchState trial = st;
      for (std::size_t m = 0; m < generators; ++m)
        trial.apply(gens[m], lambda * theta(static_cast<Eigen::Index>(m)));
      const double nr = trial.offdiag_residual().cwiseAbs().maxCoeff();
      if (nr < res) {
        st = std::move(trial);
        res = nr;
        break;
      }
    }
  }
  return res <= tol;
}

}  // namespace detail

/// Hill climbing over block unitaries reproducing the (perturbed) quasi-cycle
/// on the interior view, maximizing |alpha_01|. The result is numerical
/// evidence under the given budget only.
inline SearchReport conjecture_search(const QuasiCycleSpec& spec, const EnergyBlockLayout& lay, const BathSpec& bath,
                                      const SearchOptions& opt = {}) {
  if (lay.n_levels != 3) throw DimensionError("search needs the three-level layout");
  if (lay.total_dimension() > kMaxFullDimension) throw DomainError("layout exceeds the dimension cap");
  const RMatrix target = perturbed_probs(spec).matrix();
  SearchReport rep;
  rep.bound = std::sqrt(target(0, 0) * target(1, 1));
  if (lay.common_interior_rungs().empty()) throw PreconditionError("bath has no interior rungs");

  // Well inside tol_G so that the reported unitary is safely admissible.
  const double restore_tol = std::min(opt.tol_G, 1e-10);
  const BlockUnitary brute = brute_quasicycle_unitary(lay);
  const std::size_t restarts = std::max<std::size_t>(1, opt.restarts);
  const std::size_t per = std::max<std::size_t>(1, opt.budget / restarts);
  detail::SearchState best(lay, bath, target);
  double best_alpha = -1.0;
  std::size_t iter = 0;

  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(detail::splitmix64(opt.seed * 1000003ULL + r));
    detail::SearchState st(lay, bath, target);
    bool feasible = false;
    for (int attempt = 0; attempt < 20 && !feasible; ++attempt) {
      st.load(brute);
      // Perturbations of size sqrt(eps) across segments, then local
      // rotations to spread the resulting overlaps over whole segments.
      if (spec.epsilon > 0.0) {
        std::normal_distribution<double> kick(0.0, std::sqrt(spec.epsilon));
        for (int m = 0; m < 48; ++m) st.apply(st.random_generator(rng), kick(rng));
      }
      st.randomize_locals(rng);
      feasible = detail::restore(st, rng, opt.start_generators, restore_tol);
    }
    const std::size_t budget_r = (r + 1 == restarts) ? opt.budget - per * (restarts - 1) : per;
    if (!feasible) {
      for (std::size_t s = 0; s < budget_r; ++s, ++iter)
        if (best_alpha >= 0.0) rep.trace.push_back({iter, best_alpha, rep.bound - best_alpha});
      continue;
    }
    double cur = st.aligned_alpha();
    if (cur > best_alpha) {
      best_alpha = cur;
      best = st;
    }
    double step = 0.2;
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> nmoves(1, 3);
    for (std::size_t s = 0; s < budget_r; ++s, ++iter) {
      detail::SearchState trial = st;
      const int moves = nmoves(rng);
      for (int m = 0; m < moves; ++m) trial.apply(trial.random_generator(rng), step * normal(rng));
      bool ok = detail::restore(trial, rng, opt.generators, restore_tol);
      double val = ok ? trial.aligned_alpha() : -1.0;
      if (ok && val >= cur) {
        st = std::move(trial);
        cur = val;
        ++rep.accepted;
        step = std::min(1.0, step * 1.2);
        if (cur > best_alpha) {
          best_alpha = cur;
          best = st;
        }
      } else {
        step = std::max(1e-4, step * 0.9);
      }
      rep.trace.push_back({iter, best_alpha, rep.bound - best_alpha});
    }
  }
  rep.iterations = iter;
  rep.restarts = restarts;
  if (best_alpha < 0.0) {
    rep.status = "infeasible";
    rep.gap = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  best.align();
  const BlockUnitary u = best.to_unitary();
  InducedChannel ic = induced_channel(u, lay, bath, spec.hamiltonian());
  rep.best_alpha = std::abs(ic.alpha_interior(0, 1));
  rep.g_deviation = max_abs(RMatrix(ic.G_interior - target));
  rep.gap = rep.bound - rep.best_alpha;
  if (rep.g_deviation > opt.tol_G) rep.status = "infeasible";
  return rep;
}

}  // namespace qthermo
