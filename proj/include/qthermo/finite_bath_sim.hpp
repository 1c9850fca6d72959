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

// Thermal operations with an explicit finite bath. The bath is a ladder of
// rungs k = 0..N at energy k*eps with integer degeneracies g_k; the system
// levels are integer multiples n_i*eps. Total-energy block t collects the
// pairs (level i, rung t - n_i). Energy-conserving unitaries are direct sums
// of per-block unitaries and the induced channel is obtained by tracing out
// the bath from U (tau_R x rho) U^dagger.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <vector>

#include "qthermo/coherence_bounds.hpp"
#include "qthermo/core.hpp"
#include "qthermo/eto_channels.hpp"

namespace qthermo {

/// Largest system-times-bath dimension accepted by the simulator.
inline constexpr std::size_t kMaxFullDimension = std::size_t{1} << 14;
inline constexpr double kUnitaryTol = 1e-10;

enum class BathMode { exact_geometric, multinomial };

inline const char* to_string(BathMode m) {
  return m == BathMode::exact_geometric ? "exact_geometric" : "multinomial";
}

struct BathOptions {
  BathMode mode = BathMode::exact_geometric;
  /// Multiplies every degeneracy in exact_geometric mode (g_k = scale r^k).
  std::uint64_t scale = 1;
  /// Energy quantum; 0 derives it from the system gaps.
  double quantum = 0.0;
  /// Half-width (in rungs) of the multinomial window around the mean; 0 picks
  /// ceil(sqrt(n)).
  std::size_t window_half_width = 0;
};

struct BathSpec {
  BathMode mode = BathMode::exact_geometric;
  double quantum = 1.0;
  double beta = 0.0;
  std::vector<std::uint64_t> degeneracies;
  /// Gibbs weight of a single bath state on rung k; sum_k g_k w_k = 1.
  std::vector<double> state_weight;
  /// System levels as multiples of the quantum.
  std::vector<std::size_t> level_index;
  /// exact_geometric: integer e^{beta eps}. Zero in multinomial mode.
  std::uint64_t ratio = 0;
  std::uint64_t scale = 1;
  /// max over the window of |g_k e^{-beta eps} / g_{k-1} - 1|.
  double delta = 0.0;
  /// min_k ln(g_k) / (k eps), k >= 1.
  double growth_rate = 0.0;
  /// multinomial: number of two-level copies, window and its tail mass.
  std::size_t copies = 0;
  std::size_t window_lo = 0;
  std::size_t window_hi = 0;
  double truncated_mass = 0.0;
  double hoeffding_bound = 0.0;

  std::size_t n_rungs() const { return degeneracies.size(); }
  std::uint64_t degeneracy(std::size_t k) const { return degeneracies.at(k); }
  double rung_weight(std::size_t k) const { return static_cast<double>(degeneracies.at(k)) * state_weight.at(k); }
  std::size_t bath_dimension() const {
    std::size_t s = 0;
    for (auto g : degeneracies) s += static_cast<std::size_t>(g);
    return s;
  }
};

namespace detail {

/// eps such that every level is an integer multiple of it.
inline double energy_quantum(const Hamiltonian& h) {
  double smallest = 0.0;
  for (double e : h.levels())
    if (e > kBohrGap && (smallest == 0.0 || e < smallest)) smallest = e;
  if (smallest == 0.0) return 1.0;
  for (int m = 1; m <= 64; ++m) {
    const double eps = smallest / m;
    bool ok = true;
    for (double e : h.levels()) {
      const double n = e / eps;
      if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
        ok = false;
        break;
      }
    }
    if (ok) return eps;
  }
  throw DomainError("system gaps are incommensurate; no common energy quantum");
}

inline std::vector<std::size_t> level_indices(const Hamiltonian& h, double eps) {
  std::vector<std::size_t> n;
  for (double e : h.levels()) {
    const double x = e / eps;
    if (std::abs(x - std::round(x)) > 1e-9 * std::max(1.0, x)) {
      std::ostringstream os;
      os << "level " << e << " is not a multiple of the energy quantum " << eps;
      throw DomainError(os.str());
    }
    n.push_back(static_cast<std::size_t>(std::llround(x)));
  }
  return n;
}

inline std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t c = 1;
  for (std::size_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace detail

/// Builds the bath ladder for system `h` at inverse temperature `beta`.
inline BathSpec build_bath(const Hamiltonian& h, InverseTemperature beta, std::size_t n_rungs,
                           const BathOptions& opt = {}) {
  if (n_rungs == 0) throw DomainError("bath needs at least one rung");
  BathSpec b;
  b.mode = opt.mode;
  b.beta = beta.value();
  b.quantum = opt.quantum > 0.0 ? opt.quantum : detail::energy_quantum(h);
  b.level_index = detail::level_indices(h, b.quantum);
  const double boltz = std::exp(-beta.value() * b.quantum);

  if (opt.mode == BathMode::exact_geometric) {
    if (opt.scale == 0) throw DomainError("degeneracy scale must be positive");
    const double r = std::exp(beta.value() * b.quantum);
    const double ri = std::round(r);
    if (ri < 1.0 || std::abs(r - ri) > 1e-9 * r) {
      std::ostringstream os;
      os << "e^{beta eps} = " << r << " is not a positive integer";
      throw DomainError(os.str());
    }
    b.ratio = static_cast<std::uint64_t>(ri);
    b.scale = opt.scale;
    std::uint64_t g = opt.scale;
    for (std::size_t k = 0; k < n_rungs; ++k) {
      b.degeneracies.push_back(g);
      if (k + 1 < n_rungs) {
        if (g > (std::uint64_t{1} << 40) / b.ratio) throw DomainError("bath degeneracies overflow");
        g *= b.ratio;
      }
    }
    // Per-state weights r^{-k}, uniform over rungs.
    for (std::size_t k = 0; k < n_rungs; ++k)
      b.state_weight.push_back(std::pow(static_cast<double>(b.ratio), -static_cast<double>(k)));
    b.window_lo = 0;
    b.window_hi = n_rungs - 1;
  } else {
    b.copies = n_rungs - 1;
    for (std::size_t k = 0; k < n_rungs; ++k) b.degeneracies.push_back(detail::binomial(b.copies, k));
    for (std::size_t k = 0; k < n_rungs; ++k) b.state_weight.push_back(std::pow(boltz, static_cast<double>(k)));
    const double mean = static_cast<double>(b.copies) * boltz / (1.0 + boltz);
    const std::size_t half =
        opt.window_half_width > 0
            ? opt.window_half_width
            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(std::max<std::size_t>(b.copies, 1)))));
    const double lo = std::max(0.0, std::floor(mean - static_cast<double>(half)));
    b.window_lo = static_cast<std::size_t>(lo);
    b.window_hi = std::min(b.copies, static_cast<std::size_t>(std::ceil(mean + static_cast<double>(half))));
    b.hoeffding_bound =
        b.copies == 0 ? 0.0
                      : std::min(1.0, 2.0 * std::exp(-2.0 * static_cast<double>(half * half) /
                                                     static_cast<double>(b.copies)));
  }

  double z = 0.0;
  for (std::size_t k = 0; k < n_rungs; ++k) z += static_cast<double>(b.degeneracies[k]) * b.state_weight[k];
  for (double& w : b.state_weight) w /= z;

  b.delta = 0.0;
  for (std::size_t k = std::max<std::size_t>(b.window_lo, 1); k <= b.window_hi && k < n_rungs; ++k) {
    const double ratio = static_cast<double>(b.degeneracies[k]) / static_cast<double>(b.degeneracies[k - 1]);
    const double dev =
        b.mode == BathMode::exact_geometric ? std::abs(ratio / static_cast<double>(b.ratio) - 1.0)
                                            : std::abs(ratio * boltz - 1.0);
    b.delta = std::max(b.delta, dev);
  }
  b.truncated_mass = 0.0;
  for (std::size_t k = 0; k < n_rungs; ++k)
    if (k < b.window_lo || k > b.window_hi) b.truncated_mass += b.rung_weight(k);
  b.growth_rate = 0.0;
  bool first = true;
  for (std::size_t k = 1; k < n_rungs; ++k) {
    const double c = std::log(static_cast<double>(b.degeneracies[k])) / (static_cast<double>(k) * b.quantum);
    if (first || c < b.growth_rate) b.growth_rate = c;
    first = false;
  }

  if (h.dimension() * b.bath_dimension() > kMaxFullDimension) {
    std::ostringstream os;
    os << "system x bath dimension " << h.dimension() * b.bath_dimension() << " exceeds the cap "
       << kMaxFullDimension;
    throw DomainError(os.str());
  }
  return b;
}

// ---------------------------------------------------------------------------
// Block layout

struct Segment {
  std::size_t level;
  std::size_t rung;
  std::size_t dimension;
  std::size_t offset;
};

struct EnergyBlock {
  std::size_t index;
  double energy;
  std::vector<Segment> segments;
  std::size_t dimension = 0;
  /// Every system level is represented.
  bool interior = false;

  const Segment* segment_for(std::size_t level) const {
    for (const auto& s : segments)
      if (s.level == level) return &s;
    return nullptr;
  }
};

struct EnergyBlockLayout {
  std::vector<EnergyBlock> blocks;
  std::vector<std::size_t> level_index;
  std::size_t n_rungs = 0;
  std::size_t n_levels = 0;
  double quantum = 1.0;

  std::size_t total_dimension() const {
    std::size_t s = 0;
    for (const auto& b : blocks) s += b.dimension;
    return s;
  }
  /// Block holding (level i, rung k).
  std::size_t block_of(std::size_t level, std::size_t rung) const { return level_index.at(level) + rung; }
  std::size_t max_level_index() const {
    std::size_t m = 0;
    for (auto n : level_index) m = std::max(m, n);
    return m;
  }
  /// Rungs k for which every block (i, k) is interior.
  std::vector<std::size_t> common_interior_rungs() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < n_rungs; ++k) {
      bool ok = true;
      for (std::size_t i = 0; i < n_levels; ++i) ok = ok && blocks.at(block_of(i, k)).interior;
      if (ok) out.push_back(k);
    }
    return out;
  }
};

inline EnergyBlockLayout enumerate_blocks(const Hamiltonian& h, const BathSpec& bath) {
  if (bath.level_index.size() != h.dimension()) throw DimensionError("bath was built for a different system");
  EnergyBlockLayout lay;
  lay.level_index = bath.level_index;
  lay.n_rungs = bath.n_rungs();
  lay.n_levels = h.dimension();
  lay.quantum = bath.quantum;
  const std::size_t tmax = lay.max_level_index() + bath.n_rungs() - 1;
  for (std::size_t t = 0; t <= tmax; ++t) {
    EnergyBlock blk;
    blk.index = t;
    blk.energy = static_cast<double>(t) * bath.quantum;
    for (std::size_t i = 0; i < h.dimension(); ++i) {
      const std::size_t n = bath.level_index[i];
      if (t < n || t - n >= bath.n_rungs()) continue;
      const std::size_t k = t - n;
      const auto g = static_cast<std::size_t>(bath.degeneracy(k));
      blk.segments.push_back({i, k, g, blk.dimension});
      blk.dimension += g;
    }
    blk.interior = blk.segments.size() == h.dimension();
    lay.blocks.push_back(std::move(blk));
  }
  return lay;
}

// ---------------------------------------------------------------------------
// Block unitaries

/// Direct sum of per-block unitaries. Blocks flagged identity carry no matrix.
class BlockUnitary {
 public:
  BlockUnitary() = default;
  explicit BlockUnitary(const EnergyBlockLayout& lay)
      : blocks_(lay.blocks.size()), identity_(lay.blocks.size(), true), dims_(lay.blocks.size()) {
    for (std::size_t t = 0; t < lay.blocks.size(); ++t) dims_[t] = lay.blocks[t].dimension;
  }

  std::size_t size() const { return blocks_.size(); }
  bool is_identity(std::size_t t) const { return identity_.at(t); }
  std::size_t block_dimension(std::size_t t) const { return dims_.at(t); }

  void set_block(std::size_t t, CMatrix u) {
    if (u.rows() != static_cast<Eigen::Index>(dims_.at(t)) || u.cols() != u.rows())
      throw DimensionError("block unitary has the wrong dimension");
    blocks_[t] = std::move(u);
    identity_[t] = false;
  }
  void set_identity(std::size_t t) {
    blocks_.at(t) = CMatrix();
    identity_[t] = true;
  }

  /// Dense copy of block t.
  CMatrix block(std::size_t t) const {
    if (identity_.at(t)) {
      const auto n = static_cast<Eigen::Index>(dims_[t]);
      return CMatrix::Identity(n, n);
    }
    return blocks_[t];
  }
  const CMatrix& stored(std::size_t t) const { return blocks_.at(t); }
  CMatrix& mutable_block(std::size_t t) {
    if (identity_.at(t)) {
      const auto n = static_cast<Eigen::Index>(dims_[t]);
      blocks_[t] = CMatrix::Identity(n, n);
      identity_[t] = false;
    }
    return blocks_[t];
  }

  /// Sub-block u^t(i -> l): rows of output level l, columns of input level i.
  CMatrix sub(const EnergyBlockLayout& lay, std::size_t t, std::size_t out_level, std::size_t in_level) const {
    const EnergyBlock& blk = lay.blocks.at(t);
    const Segment* so = blk.segment_for(out_level);
    const Segment* si = blk.segment_for(in_level);
    if (!so || !si) return CMatrix();
    const auto ro = static_cast<Eigen::Index>(so->offset), no = static_cast<Eigen::Index>(so->dimension);
    const auto ci = static_cast<Eigen::Index>(si->offset), ni = static_cast<Eigen::Index>(si->dimension);
    if (identity_[t]) {
      if (out_level == in_level) return CMatrix::Identity(no, ni);
      return CMatrix::Zero(no, ni);
    }
    return blocks_[t].block(ro, ci, no, ni);
  }

 private:
  std::vector<CMatrix> blocks_;
  std::vector<bool> identity_;
  std::vector<std::size_t> dims_;
};

inline BlockUnitary identity_unitary(const EnergyBlockLayout& lay) { return BlockUnitary(lay); }

/// max |U^dagger U - 1|; large blocks are probed with random vectors.
inline double unitarity_defect(const CMatrix& u, std::uint64_t probe_seed = 7) {
  const Eigen::Index n = u.rows();
  if (n <= 256) return max_abs(CMatrix(u.adjoint() * u - CMatrix::Identity(n, n)));
  Rng rng(probe_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double err = 0.0;
  for (int p = 0; p < 4; ++p) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_t(normal(rng), normal(rng));
    v.normalize();
    CVector w = u.adjoint() * (u * v);
    err = std::max(err, (w - v).cwiseAbs().maxCoeff());
  }
  return err;
}

/// Normalized discrete Fourier transform on every interior block.
inline BlockUnitary fourier_unitary(const EnergyBlockLayout& lay) {
  BlockUnitary u(lay);
  for (const auto& blk : lay.blocks) {
    if (!blk.interior) continue;
    const auto n = static_cast<Eigen::Index>(blk.dimension);
    CMatrix f(n, n);
    const double two_pi = 2.0 * std::acos(-1.0);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index c = 0; c < n; ++c)
        f(a, c) = std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                             two_pi * static_cast<double>((a * c) % n) / static_cast<double>(n));
    u.set_block(blk.index, std::move(f));
  }
  return u;
}

/// Haar-random block unitary, deterministic in `seed`.
inline BlockUnitary random_block_unitary(const EnergyBlockLayout& lay, std::uint64_t seed,
                                         bool include_boundary = true) {
  Rng rng(seed);
  BlockUnitary u(lay);
  for (const auto& blk : lay.blocks) {
    if (!blk.interior && !include_boundary) continue;
    u.set_block(blk.index, haar_unitary(static_cast<Eigen::Index>(blk.dimension), rng));
  }
  return u;
}

// ---------------------------------------------------------------------------
// Energy conservation

inline std::size_t full_index(const BathSpec& bath, std::size_t level, std::size_t rung, std::size_t m) {
  std::size_t off = 0;
  for (std::size_t k = 0; k < rung; ++k) off += static_cast<std::size_t>(bath.degeneracy(k));
  return level * bath.bath_dimension() + off + m;
}

/// Dense operator on system x bath (index level * dim_R + bath state).
inline CMatrix embed(const BlockUnitary& u, const EnergyBlockLayout& lay, const BathSpec& bath) {
  const auto n = static_cast<Eigen::Index>(lay.n_levels * bath.bath_dimension());
  CMatrix full = CMatrix::Zero(n, n);
  for (const auto& blk : lay.blocks) {
    CMatrix b = u.block(blk.index);
    std::vector<std::size_t> map;
    for (const auto& s : blk.segments)
      for (std::size_t m = 0; m < s.dimension; ++m) map.push_back(full_index(bath, s.level, s.rung, m));
    for (std::size_t r = 0; r < map.size(); ++r)
      for (std::size_t c = 0; c < map.size(); ++c)
        full(static_cast<Eigen::Index>(map[r]), static_cast<Eigen::Index>(map[c])) =
            b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return full;
}

/// Total energy (units of the quantum) of every full-space basis state.
inline std::vector<double> total_energies(const EnergyBlockLayout& lay, const BathSpec& bath) {
  std::vector<double> e;
  for (std::size_t i = 0; i < lay.n_levels; ++i)
    for (std::size_t k = 0; k < bath.n_rungs(); ++k)
      for (std::uint64_t m = 0; m < bath.degeneracy(k); ++m)
        e.push_back(static_cast<double>(lay.level_index[i] + k));
  return e;
}

/// max |[U, H_S + H_R]| for a dense full-space operator, in units of the quantum.
inline double energy_commutator(const CMatrix& full, const EnergyBlockLayout& lay, const BathSpec& bath) {
  std::vector<double> e = total_energies(lay, bath);
  if (full.rows() != static_cast<Eigen::Index>(e.size()) || full.cols() != full.rows())
    throw DimensionError("operator does not act on system x bath");
  double err = 0.0;
  for (Eigen::Index r = 0; r < full.rows(); ++r)
    for (Eigen::Index c = 0; c < full.cols(); ++c)
      err = std::max(err, std::abs(full(r, c)) * std::abs(e[static_cast<std::size_t>(r)] - e[static_cast<std::size_t>(c)]));
  return err;
}

inline bool verify_energy_conservation(const CMatrix& full, const EnergyBlockLayout& lay, const BathSpec& bath,
                                       double tol = 1e-10) {
  return energy_commutator(full, lay, bath) <= tol;
}

/// Structural check (block sizes, unitarity); additionally embeds and checks
/// the commutator when the full space is at most 2048-dimensional.
inline bool verify_energy_conservation(const BlockUnitary& u, const EnergyBlockLayout& lay, const BathSpec& bath,
                                       double tol = 1e-10) {
  if (u.size() != lay.blocks.size()) return false;
  for (const auto& blk : lay.blocks) {
    if (u.block_dimension(blk.index) != blk.dimension) return false;
    if (!u.is_identity(blk.index) && unitarity_defect(u.stored(blk.index)) > kUnitaryTol) return false;
  }
  if (lay.total_dimension() <= 2048) return verify_energy_conservation(embed(u, lay, bath), lay, bath, tol);
  return true;
}

// ---------------------------------------------------------------------------
// Induced channel

enum class ChannelView {
  /// Full bath Gibbs state; an exact thermal operation.
  full,
  /// Bath conditioned on the rungs whose blocks are interior for every level.
  interior,
};

struct InducedChannel {
  /// d^2 x d^2 Choi matrices of the two views.
  CMatrix choi_full;
  CMatrix choi_interior;
  RMatrix G_full;
  RMatrix G_interior;
  /// Row i conditioned on the interior blocks reached by level i.
  RMatrix G_interior_blocks;
  CMatrix alpha_full;
  CMatrix alpha_interior;
  /// Bath weight outside the common interior rungs.
  double boundary_mass = 0.0;
  std::vector<std::size_t> interior_rungs;
  /// Largest Choi entry outside the covariant support (full view).
  double off_support = 0.0;
  double trace_defect = 0.0;

  const RMatrix& G(ChannelView v) const { return v == ChannelView::full ? G_full : G_interior; }
  const CMatrix& alpha(ChannelView v) const { return v == ChannelView::full ? alpha_full : alpha_interior; }
  const CMatrix& choi(ChannelView v) const { return v == ChannelView::full ? choi_full : choi_interior; }
  TransitionMatrix transitions(ChannelView v) const { return TransitionMatrix(G(v), 1e-9); }
  DampingFactors damping(ChannelView v) const { return DampingFactors(alpha(v)); }
};

inline InducedChannel induced_channel(const BlockUnitary& u, const EnergyBlockLayout& lay, const BathSpec& bath,
                                      const Hamiltonian& h) {
  if (h.dimension() != lay.n_levels || u.size() != lay.blocks.size())
    throw DimensionError("unitary, layout and Hamiltonian do not match");
  for (const auto& blk : lay.blocks) {
    if (u.block_dimension(blk.index) != blk.dimension) throw DimensionError("block unitary does not fit layout");
    if (!u.is_identity(blk.index)) {
      const double def = unitarity_defect(u.stored(blk.index));
      if (def > kUnitaryTol) {
        std::ostringstream os;
        os << "block " << blk.index << " is not unitary (defect " << def << ")";
        throw DomainError(os.str());
      }
    }
  }
  const std::size_t d = lay.n_levels;
  const auto di = static_cast<Eigen::Index>(d);
  const std::vector<std::size_t>& n = lay.level_index;

  InducedChannel out;
  out.interior_rungs = lay.common_interior_rungs();
  std::vector<bool> in_k(lay.n_rungs, false);
  double wk = 0.0;
  for (auto k : out.interior_rungs) {
    in_k[k] = true;
    wk += bath.rung_weight(k);
  }
  out.boundary_mass = 1.0 - wk;
  out.choi_full = CMatrix::Zero(di * di, di * di);
  out.choi_interior = CMatrix::Zero(di * di, di * di);
  out.G_interior_blocks = RMatrix::Zero(di, di);
  std::vector<double> level_norm(d, 0.0);

  for (std::size_t k = 0; k < lay.n_rungs; ++k) {
    const double q = bath.state_weight[k];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const std::size_t t = n[i] + k, tp = n[j] + k;
        for (std::size_t l = 0; l < d; ++l)
          for (std::size_t lp = 0; lp < d; ++lp) {
            // Output bath rungs must coincide for the partial trace.
            if (n[i] + n[lp] != n[j] + n[l]) continue;
            if (t < n[l] || t - n[l] >= lay.n_rungs) continue;
            CMatrix a = u.sub(lay, t, l, i);
            CMatrix b = u.sub(lay, tp, lp, j);
            if (a.size() == 0 || b.size() == 0) continue;
            const complex_t val = q * frobenius_inner(a, b);
            const auto r = static_cast<Eigen::Index>(i * d + l), c = static_cast<Eigen::Index>(j * d + lp);
            out.choi_full(r, c) += val;
            if (in_k[k]) out.choi_interior(r, c) += val;
            if (i == j && l == lp && lay.blocks[t].interior) out.G_interior_blocks(i, l) += val.real();
          }
        if (i == j && lay.blocks[t].interior) level_norm[i] += bath.rung_weight(k);
      }
  }
  if (wk > 0.0) out.choi_interior /= wk;
  for (std::size_t i = 0; i < d; ++i)
    if (level_norm[i] > 0.0) out.G_interior_blocks.row(static_cast<Eigen::Index>(i)) /= level_norm[i];

  out.G_full = RMatrix::Zero(di, di);
  out.G_interior = RMatrix::Zero(di, di);
  out.alpha_full = CMatrix::Zero(di, di);
  out.alpha_interior = CMatrix::Zero(di, di);
  for (Eigen::Index i = 0; i < di; ++i)
    for (Eigen::Index j = 0; j < di; ++j) {
      out.G_full(i, j) = out.choi_full(i * di + j, i * di + j).real();
      out.G_interior(i, j) = out.choi_interior(i * di + j, i * di + j).real();
      if (i != j) {
        out.alpha_full(i, j) = out.choi_full(i * di + i, j * di + j);
        out.alpha_interior(i, j) = out.choi_interior(i * di + i, j * di + j);
      }
    }
  // Entries outside the covariant support.
  for (Eigen::Index i = 0; i < di; ++i)
    for (Eigen::Index j = 0; j < di; ++j)
      for (Eigen::Index l = 0; l < di; ++l)
        for (Eigen::Index lp = 0; lp < di; ++lp) {
          const bool support = (i == j) ? (l == lp) : (l == i && lp == j);
          if (!support) out.off_support = std::max(out.off_support, std::abs(out.choi_full(i * di + l, j * di + lp)));
        }
  out.trace_defect = trace_preservation_defect(out.choi_full);
  if (supports_coherence_analysis(h) && out.off_support > 1e-10) {
    std::ostringstream os;
    os << "induced channel mixes coherence modes (" << out.off_support << ")";
    throw Error(os.str());
  }
  return out;
}

/// Induced channel of a seeded Haar-random block unitary.
inline InducedChannel random_to_channel(const EnergyBlockLayout& lay, const BathSpec& bath, const Hamiltonian& h,
                                        std::uint64_t seed) {
  return induced_channel(random_block_unitary(lay, seed), lay, bath, h);
}

// ---------------------------------------------------------------------------
// Optimal qubit construction

enum class StaircaseStart {
  /// round(g_0 p(1->1)) unit entries, the rest zero.
  staircase,
  /// Every entry sqrt(p(1->1)).
  uniform,
};

struct OptimalQubitUnitary {
  BlockUnitary unitary;
  /// |count / g_0 - p(1->1)| from integer rounding of the first block.
  double diagonal_error = 0.0;
  double gamma = 1.0;
};

/// Rotations pairing each level-1 state of block t with a level-0 state,
/// with cosines x^{(t+1)} = gamma (x^{(t)}, 1, ..., 1), gamma =
/// sqrt(p(1->1)/p(0->0)). Consecutive blocks then have parallel diagonals and
/// the interior coherence factor equals sqrt(p(0->0) p(1->1)).
inline OptimalQubitUnitary optimal_qubit_unitary(const TransitionMatrix& target, const EnergyBlockLayout& lay,
                                                 const BathSpec& bath,
                                                 StaircaseStart start = StaircaseStart::staircase) {
  if (lay.n_levels != 2 || target.dimension() != 2) throw DimensionError("optimal construction is for qubits");
  if (bath.mode != BathMode::exact_geometric) throw DomainError("optimal construction needs an exact geometric bath");
  if (lay.level_index[0] != 0 || lay.level_index[1] != 1)
    throw DomainError("qubit gap must equal the bath quantum");
  const double p00 = target(0, 0), p11 = target(1, 1);
  const double p01 = target(0, 1), p10 = target(1, 0);
  OptimalQubitUnitary res{BlockUnitary(lay), 0.0, 1.0};
  if (std::abs(p00 - 1.0) <= 1e-12 && std::abs(p11 - 1.0) <= 1e-12) return res;
  if (std::abs(p10 - static_cast<double>(bath.ratio) * p01) > 1e-10)
    throw DomainError("target is not Gibbs-stochastic for this bath");
  if (p11 >= p00) throw DomainError("construction requires p(1->1) < p(0->0)");
  res.gamma = std::sqrt(p11 / p00);

  const auto g0 = static_cast<std::size_t>(bath.degeneracy(0));
  std::vector<double> x(g0, 0.0);
  if (start == StaircaseStart::staircase) {
    const auto ones = static_cast<std::size_t>(std::llround(static_cast<double>(g0) * p11));
    for (std::size_t i = 0; i < std::min(ones, g0); ++i) x[i] = 1.0;
    res.diagonal_error = std::abs(static_cast<double>(ones) / static_cast<double>(g0) - p11);
  } else {
    std::fill(x.begin(), x.end(), std::sqrt(p11));
  }

  for (std::size_t t = 1; t < lay.n_rungs; ++t) {
    const EnergyBlock& blk = lay.blocks[t];
    const Segment* s0 = blk.segment_for(0);
    const Segment* s1 = blk.segment_for(1);
    const auto n = static_cast<Eigen::Index>(blk.dimension);
    CMatrix u = CMatrix::Identity(n, n);
    for (std::size_t i = 0; i < s1->dimension; ++i) {
      const double c = std::clamp(x[i], 0.0, 1.0);
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      const auto a = static_cast<Eigen::Index>(s1->offset + i);
      const auto b = static_cast<Eigen::Index>(s0->offset + i);
      u(a, a) = c;
      u(b, a) = s;
      u(a, b) = -s;
      u(b, b) = c;
    }
    res.unitary.set_block(t, std::move(u));
    // Next cosines: gamma times the level-0 diagonal of this block.
    std::vector<double> next(s0->dimension, res.gamma);
    for (std::size_t i = 0; i < s1->dimension; ++i) next[i] = res.gamma * x[i];
    x = std::move(next);
  }
  return res;
}

}  // namespace qthermo
