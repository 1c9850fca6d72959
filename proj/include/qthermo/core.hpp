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

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qthermo/error.hpp"
#include "qthermo/linalg.hpp"

namespace qthermo {

/// Numerical tolerances for state validation.
struct Tolerances {
  double hermiticity = 1e-10;
  double trace = 1e-10;
  /// Eigenvalue floor: eigenvalues >= -psd count as non-negative.
  double psd = 1e-9;
};

/// Absolute gap below which two Bohr frequencies are considered equal.
inline constexpr double kBohrGap = 1e-9;

/// Inverse temperature 1/kT. Zero is infinite temperature.
class InverseTemperature {
 public:
  explicit InverseTemperature(double beta) : beta_(beta) {
    if (!std::isfinite(beta) || beta < 0.0)
      throw DomainError("inverse temperature must be finite and non-negative");
  }
  double value() const { return beta_; }
  bool infinite_temperature() const { return beta_ == 0.0; }

 private:
  double beta_;
};

/// Diagonal system Hamiltonian. Levels must be given in ascending order; they
/// are shifted so the ground level sits at zero and the shift is kept.
class Hamiltonian {
 public:
  explicit Hamiltonian(std::vector<double> levels) {
    if (levels.empty()) throw DomainError("Hamiltonian needs at least one level");
    for (double e : levels)
      if (!std::isfinite(e)) throw DomainError("Hamiltonian levels must be finite");
    if (!std::is_sorted(levels.begin(), levels.end()))
      throw DomainError("Hamiltonian levels must be sorted ascending");
    offset_ = levels.front();
    for (double& e : levels) e -= offset_;
    levels_ = std::move(levels);
  }

  std::size_t dimension() const { return levels_.size(); }
  const std::vector<double>& levels() const { return levels_; }
  double level(std::size_t i) const { return levels_.at(i); }
  /// Ground energy before the shift.
  double offset() const { return offset_; }
  /// Levels as originally supplied.
  std::vector<double> original_levels() const {
    std::vector<double> out = levels_;
    for (double& e : out) e += offset_;
    return out;
  }
  bool has_degenerate_levels() const {
    for (std::size_t i = 1; i < levels_.size(); ++i)
      if (levels_[i] - levels_[i - 1] <= kBohrGap) return true;
    return false;
  }

  friend bool operator==(const Hamiltonian& a, const Hamiltonian& b) {
    if (a.levels_.size() != b.levels_.size()) return false;
    for (std::size_t i = 0; i < a.levels_.size(); ++i)
      if (std::abs(a.levels_[i] - b.levels_[i]) > 1e-12 * (1.0 + std::abs(a.levels_[i])))
        return false;
    return true;
  }

 private:
  std::vector<double> levels_;
  double offset_ = 0.0;
};

/// Pairwise level differences E_i - E_j (i != j) and whether the nonzero ones
/// are all distinct.
struct BohrSpectrum {
  std::vector<double> frequencies;
  bool nondegenerate = true;
};

inline BohrSpectrum bohr_spectrum(std::span<const double> energies) {
  BohrSpectrum out;
  const std::size_t d = energies.size();
  std::vector<double> nonzero;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j) continue;
      double w = energies[i] - energies[j];
      out.frequencies.push_back(w);
      if (std::abs(w) > kBohrGap) nonzero.push_back(w);
    }
  std::sort(nonzero.begin(), nonzero.end());
  for (std::size_t k = 1; k < nonzero.size(); ++k)
    if (nonzero[k] - nonzero[k - 1] <= kBohrGap) out.nondegenerate = false;
  return out;
}

inline BohrSpectrum bohr_spectrum(const Hamiltonian& h) {
  return bohr_spectrum(std::span<const double>(h.levels()));
}

/// True when coherences between energy levels are decoupled: distinct levels
/// and a nondegenerate Bohr spectrum.
inline bool supports_coherence_analysis(const Hamiltonian& h) {
  return !h.has_degenerate_levels() && bohr_spectrum(h).nondegenerate;
}

enum class StateViolation { not_square, hermiticity, trace, positivity };

inline const char* to_string(StateViolation v) {
  switch (v) {
    case StateViolation::not_square: return "not_square";
    case StateViolation::hermiticity: return "hermiticity";
    case StateViolation::trace: return "trace";
    case StateViolation::positivity: return "positivity";
  }
  return "unknown";
}

/// Thrown by assert_state; `magnitude` is the size of the violation (max
/// Hermiticity defect, |tr - 1|, or the negative eigenvalue).
class StateError : public Error {
 public:
  StateError(StateViolation v, double magnitude, const std::string& what)
      : Error(what), violation_(v), magnitude_(magnitude) {}
  StateViolation violation() const { return violation_; }
  double magnitude() const { return magnitude_; }

 private:
  StateViolation violation_;
  double magnitude_;
};

class DensityMatrix;
inline DensityMatrix assert_state(const CMatrix& m, const Tolerances& tol = {});
inline DensityMatrix gibbs_state(const Hamiltonian& h, InverseTemperature beta);

/// Hermitian, unit-trace, positive semidefinite matrix in the energy
/// eigenbasis. Only obtainable through validation (assert_state) or
/// gibbs_state.
class DensityMatrix {
 public:
  const CMatrix& matrix() const { return m_; }
  std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
  complex_t operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  std::vector<double> diagonal() const {
    std::vector<double> p(dimension());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = m_(i, i).real();
    return p;
  }

 private:
  explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {}
  friend DensityMatrix assert_state(const CMatrix& m, const Tolerances& tol);
  friend DensityMatrix gibbs_state(const Hamiltonian& h, InverseTemperature beta);

  CMatrix m_;
};

/// First violated invariant of a would-be density matrix, if any.
inline std::optional<StateError> validate_state(const CMatrix& m, const Tolerances& tol = {}) {
  if (m.rows() != m.cols() || m.rows() == 0)
    return StateError(StateViolation::not_square, 0.0, "state matrix must be square and non-empty");
  double herm = hermiticity_defect(m);
  if (herm > tol.hermiticity) {
    std::ostringstream os;
    os << "hermiticity violated: max |rho - rho^dagger| = " << herm;
    return StateError(StateViolation::hermiticity, herm, os.str());
  }
  double tr_err = std::abs(m.trace().real() - 1.0);
  if (tr_err > tol.trace) {
    std::ostringstream os;
    os << "trace violated: |tr rho - 1| = " << tr_err;
    return StateError(StateViolation::trace, tr_err, os.str());
  }
  CMatrix h = 0.5 * (m + m.adjoint());
  double min_eig = hermitian_eigenvalues(h)(0);
  if (min_eig < -tol.psd) {
    std::ostringstream os;
    os << "positivity violated: smallest eigenvalue = " << min_eig;
    return StateError(StateViolation::positivity, min_eig, os.str());
  }
  return std::nullopt;
}

/// Validates `m` and returns it as a DensityMatrix (Hermitian part kept).
/// Throws StateError naming the violated invariant.
inline DensityMatrix assert_state(const CMatrix& m, const Tolerances& tol) {
  if (auto err = validate_state(m, tol)) throw *err;
  return DensityMatrix(0.5 * (m + m.adjoint()));
}

/// Unnormalized Gibbs weights e^{-beta E_i}.
inline std::vector<double> gibbs_weights(const Hamiltonian& h, InverseTemperature beta) {
  std::vector<double> w(h.dimension());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(-beta.value() * h.level(i));
  return w;
}

/// Gibbs probabilities e^{-beta E_i} / Z.
inline std::vector<double> gibbs_probabilities(const Hamiltonian& h, InverseTemperature beta) {
  std::vector<double> w = gibbs_weights(h, beta);
  double z = 0.0;
  for (double x : w) z += x;
  for (double& x : w) x /= z;
  return w;
}

inline double partition_function(const Hamiltonian& h, InverseTemperature beta) {
  double z = 0.0;
  for (double x : gibbs_weights(h, beta)) z += x;
  return z;
}

inline DensityMatrix gibbs_state(const Hamiltonian& h, InverseTemperature beta) {
  std::vector<double> g = gibbs_probabilities(h, beta);
  CMatrix m = CMatrix::Zero(g.size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i) m(i, i) = g[i];
  return DensityMatrix(std::move(m));
}

/// Von Neumann entropy in nats, with 0 log 0 = 0.
inline double von_neumann_entropy(const CMatrix& rho) {
  RVector ev = hermitian_eigenvalues(0.5 * (rho + rho.adjoint()));
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > 0.0) s -= ev(i) * std::log(ev(i));
  return s;
}

inline double von_neumann_entropy(const DensityMatrix& rho) {
  return von_neumann_entropy(rho.matrix());
}

inline double mean_energy(const DensityMatrix& rho, const Hamiltonian& h) {
  if (rho.dimension() != h.dimension()) throw DimensionError("state and Hamiltonian dimensions differ");
  double e = 0.0;
  for (std::size_t i = 0; i < h.dimension(); ++i) e += h.level(i) * rho(i, i).real();
  return e;
}

/// F = tr(H rho) - S(rho) / beta, energies measured from the shifted ground.
inline double free_energy(const DensityMatrix& rho, const Hamiltonian& h, InverseTemperature beta) {
  if (beta.infinite_temperature())
    throw DomainError("free energy needs finite temperature (beta > 0)");
  return mean_energy(rho, h) - von_neumann_entropy(rho) / beta.value();
}

}  // namespace qthermo
