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

// Damping matrix positivity: for a covariant, Gibbs-preserving channel with
// stay probabilities p(i->i) and coherence damping factors alpha_ij, the
// matrix with p(i->i) on the diagonal and alpha_ij off it must be PSD. For a
// qubit the bound is tight and has a closed form (kappa) in terms of the
// input and output ground populations.

#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "qthermo/core.hpp"
#include "qthermo/thermo_majorization.hpp"

namespace qthermo {

/// Tolerance for the removable 0/0 of the qubit formulas at the Gibbs diagonal.
inline constexpr double kSingularTol = 1e-9;
/// Boundary tolerance for |chi| <= |alpha| kappa.
inline constexpr double kCoherenceTol = 1e-9;
/// Row-sum and Gibbs-stochasticity tolerance.
inline constexpr double kStochasticTol = 1e-10;

/// Row-stochastic matrix of transition probabilities, G(i, j) = p(i -> j).
class TransitionMatrix {
 public:
  explicit TransitionMatrix(RMatrix g, double tol = kStochasticTol) : g_(std::move(g)) {
    if (g_.rows() != g_.cols() || g_.rows() == 0) throw DimensionError("transition matrix must be square");
    for (Eigen::Index i = 0; i < g_.rows(); ++i) {
      for (Eigen::Index j = 0; j < g_.cols(); ++j) {
        double v = g_(i, j);
        if (!std::isfinite(v) || v < -tol || v > 1.0 + tol) {
          std::ostringstream os;
          os << "transition probability p(" << i << "->" << j << ") = " << v << " outside [0,1]";
          throw DomainError(os.str());
        }
        g_(i, j) = std::clamp(v, 0.0, 1.0);
      }
      double s = g_.row(i).sum();
      if (std::abs(s - 1.0) > tol) {
        std::ostringstream os;
        os << "row " << i << " of transition matrix sums to " << s;
        throw DomainError(os.str());
      }
    }
  }

  static TransitionMatrix identity(std::size_t d) { return TransitionMatrix(RMatrix::Identity(d, d)); }

  /// Every row equal to the Gibbs distribution.
  static TransitionMatrix thermalizer(std::span<const double> gibbs) {
    RMatrix g(gibbs.size(), gibbs.size());
    for (std::size_t i = 0; i < gibbs.size(); ++i)
      for (std::size_t j = 0; j < gibbs.size(); ++j) g(i, j) = gibbs[j];
    return TransitionMatrix(std::move(g));
  }

  std::size_t dimension() const { return static_cast<std::size_t>(g_.rows()); }
  const RMatrix& matrix() const { return g_; }
  double operator()(std::size_t i, std::size_t j) const {
    return g_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  /// Output populations for input populations p (q_j = sum_i p_i G(i,j)).
  std::vector<double> apply(std::span<const double> p) const {
    if (p.size() != dimension()) throw DimensionError("population vector size mismatch");
    std::vector<double> q(dimension(), 0.0);
    for (std::size_t i = 0; i < dimension(); ++i)
      for (std::size_t j = 0; j < dimension(); ++j) q[j] += p[i] * (*this)(i, j);
    return q;
  }

  /// max_j |sum_i g_i G(i,j) - g_j| for a probability vector g.
  double gibbs_defect(std::span<const double> gibbs) const {
    std::vector<double> out = apply(gibbs);
    double err = 0.0;
    for (std::size_t j = 0; j < out.size(); ++j) err = std::max(err, std::abs(out[j] - gibbs[j]));
    return err;
  }

  bool is_gibbs_stochastic(const Hamiltonian& h, InverseTemperature beta, double tol = kStochasticTol) const {
    if (h.dimension() != dimension()) throw DimensionError("transition matrix and Hamiltonian differ in size");
    return gibbs_defect(gibbs_probabilities(h, beta)) <= tol;
  }

  /// Same matrix with level order reversed (d-1, ..., 0), as used when
  /// highest levels are written first.
  RMatrix reversed_levels() const { return g_.reverse(); }

 private:
  RMatrix g_;
};

/// Complex damping factors alpha_ij (i != j); the diagonal is ignored.
class DampingFactors {
 public:
  explicit DampingFactors(CMatrix alpha) : a_(std::move(alpha)) {
    if (a_.rows() != a_.cols()) throw DimensionError("damping factors must form a square matrix");
    for (Eigen::Index i = 0; i < a_.rows(); ++i) a_(i, i) = 0.0;
  }
  /// alpha_ij = value for all i != j.
  static DampingFactors constant(std::size_t d, complex_t value) {
    CMatrix a = CMatrix::Constant(d, d, value);
    return DampingFactors(std::move(a));
  }
  std::size_t dimension() const { return static_cast<std::size_t>(a_.rows()); }
  const CMatrix& matrix() const { return a_; }
  complex_t operator()(std::size_t i, std::size_t j) const {
    return a_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  /// max |alpha_ji - conj(alpha_ij)|
  double hermiticity_defect() const { return qthermo::hermiticity_defect(a_); }

 private:
  CMatrix a_;
};

/// M_ii = p(i -> i), M_ij = alpha_ij.
struct DampingMatrix {
  CMatrix m;
};

inline DampingMatrix damping_matrix(const TransitionMatrix& g, const DampingFactors& a) {
  if (g.dimension() != a.dimension()) throw DimensionError("transition matrix and damping factors differ in size");
  CMatrix m = a.matrix();
  for (std::size_t i = 0; i < g.dimension(); ++i) m(i, i) = g(i, i);
  return {std::move(m)};
}

struct DmpVerdict {
  bool satisfied = true;
  double min_eigenvalue = 0.0;
  /// Eigenvector of the smallest eigenvalue (the violation direction when
  /// not satisfied).
  CVector witness;
};

inline DmpVerdict dmp_check(const DampingMatrix& dm, double tol_psd = 1e-9) {
  if (hermiticity_defect(dm.m) > 1e-10) throw DomainError("damping matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (dm.m + dm.m.adjoint()));
  DmpVerdict v;
  v.min_eigenvalue = es.eigenvalues()(0);
  v.witness = es.eigenvectors().col(0);
  v.satisfied = v.min_eigenvalue >= -tol_psd;
  return v;
}

/// b_ij = sqrt(p(i->i) p(j->j)), the 2x2-minor bound on |alpha_ij|.
inline RMatrix minor_bound(const TransitionMatrix& g) {
  const auto d = static_cast<Eigen::Index>(g.dimension());
  RMatrix b(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) b(i, j) = std::sqrt(g.matrix()(i, i) * g.matrix()(j, j));
  return b;
}

// ---------------------------------------------------------------------------
// Qubit closed forms. p, q are ground-level populations of input and output;
// ratio = e^{beta dE} with dE = E_1 - E_0.

struct KappaResult {
  double value = 1.0;
  /// Input diagonal equals the Gibbs diagonal; populations do not determine
  /// the channel and the identity (kappa = 1) is optimal.
  bool gibbs_diagonal = false;
};

namespace detail {

inline void check_population(double f, const char* name) {
  if (!(f >= 0.0 && f <= 1.0)) {
    std::ostringstream os;
    os << name << " = " << f << " is not a population in [0,1]";
    throw DomainError(os.str());
  }
}

inline bool gibbs_singular(double p, double ratio) {
  return std::abs(p - (1.0 - p) * ratio) < kSingularTol;
}

}  // namespace detail

inline RMatrix qubit_transition_probs_ratio(double p, double q, double ratio) {
  detail::check_population(p, "p");
  detail::check_population(q, "q");
  if (detail::gibbs_singular(p, ratio))
    throw SingularInputError("input diagonal is the Gibbs diagonal; transition probabilities are not determined");
  const double pt = 1.0 - p, qt = 1.0 - q;
  double p00 = (q - pt * ratio) / (p - pt * ratio);
  double p11 = (qt - p / ratio) / (pt - p / ratio);
  constexpr double slack = 1e-12;
  if (p00 < -slack || p00 > 1.0 + slack || p11 < -slack || p11 > 1.0 + slack) {
    std::ostringstream os;
    os << "diagonal transition " << p << " -> " << q << " violates thermo-majorization (p(0->0) = " << p00
       << ", p(1->1) = " << p11 << ")";
    throw InfeasibleError(os.str());
  }
  p00 = std::clamp(p00, 0.0, 1.0);
  p11 = std::clamp(p11, 0.0, 1.0);
  RMatrix g(2, 2);
  g << p00, 1.0 - p00, 1.0 - p11, p11;
  return g;
}

/// Unique Gibbs-stochastic qubit channel taking ground population p to q.
inline TransitionMatrix qubit_transition_probs(double p, double q, InverseTemperature beta, double dE) {
  return TransitionMatrix(qubit_transition_probs_ratio(p, q, std::exp(beta.value() * dE)));
}

inline KappaResult qubit_kappa_ratio(double p, double q, double ratio) {
  detail::check_population(p, "p");
  detail::check_population(q, "q");
  if (p == q) return {1.0, detail::gibbs_singular(p, ratio)};
  if (detail::gibbs_singular(p, ratio)) {
    if (std::abs(p - q) <= kSingularTol) return {1.0, true};
    throw InfeasibleError("Gibbs-diagonal input can only be mapped to the Gibbs diagonal");
  }
  // Feasibility via the transition probabilities; throws when infeasible.
  (void)qubit_transition_probs_ratio(p, q, ratio);
  const double pt = 1.0 - p, qt = 1.0 - q;
  const double num = (q - pt * ratio) * (p - qt * ratio);
  const double den = std::abs(p - pt * ratio);
  return {std::sqrt(std::max(num, 0.0)) / den, false};
}

/// Optimal coherence damping factor for the qubit transition p -> q.
inline KappaResult qubit_kappa(double p, double q, InverseTemperature beta, double dE) {
  return qubit_kappa_ratio(p, q, std::exp(beta.value() * dE));
}

struct QubitVerdict {
  bool feasible = false;
  QubitDiagonalVerdict diagonal{QubitCase::a, false};
  /// Empty when the diagonal transition is infeasible.
  std::optional<KappaResult> kappa;
  double input_coherence = 0.0;
  double output_coherence = 0.0;
};

/// Exact feasibility of rho -> sigma for a qubit: thermo-majorization on the
/// diagonal and |chi| <= |alpha| kappa on the coherence (phases ignored).
inline QubitVerdict qubit_full_feasible(const DensityMatrix& rho, const DensityMatrix& sigma, const Hamiltonian& h,
                                        InverseTemperature beta, double tol_coh = kCoherenceTol) {
  if (h.dimension() != 2 || rho.dimension() != 2 || sigma.dimension() != 2)
    throw DimensionError("qubit_full_feasible needs two-level states and Hamiltonian");
  if (!supports_coherence_analysis(h)) throw DomainError("qubit levels must be distinct");
  QubitVerdict v;
  const double p = std::clamp(rho(0, 0).real(), 0.0, 1.0);
  const double q = std::clamp(sigma(0, 0).real(), 0.0, 1.0);
  v.input_coherence = std::abs(rho(0, 1));
  v.output_coherence = std::abs(sigma(0, 1));
  v.diagonal = qubit_diagonal_feasible(p, q, h, beta);
  if (!v.diagonal.feasible) return v;
  const double ratio = std::exp(beta.value() * (h.level(1) - h.level(0)));
  try {
    v.kappa = qubit_kappa_ratio(p, q, ratio);
  } catch (const InfeasibleError&) {
    // Boundary case accepted by the curve tolerance but not by the closed
    // form; treat as infeasible rather than guessing a kappa.
    v.diagonal.feasible = false;
    return v;
  }
  v.feasible = v.output_coherence <= v.input_coherence * v.kappa->value + tol_coh;
  return v;
}

// ---------------------------------------------------------------------------
// Relaxation-time form. Populations relax to the Gibbs state with factor
// e^{-t/T2}: p(0->1) = p1 (1 - e), p(1->0) = p0 (1 - e).

inline void check_relaxation_domain(double p0, double t, double T2) {
  detail::check_population(p0, "p0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and non-negative");
  if (!(T2 > 0.0) || !std::isfinite(T2)) throw DomainError("relaxation time must be positive");
}

/// kappa = sqrt(p(0->0) p(1->1)) for the exponential relaxation above,
/// p0 the Gibbs ground population.
inline double t2_kappa(double p0, double t, double T2) {
  check_relaxation_domain(p0, t, T2);
  const double decay = 1.0 - std::exp(-t / T2);
  const double p00 = 1.0 - decay * (1.0 - p0);
  const double p11 = 1.0 - decay * p0;
  return std::sqrt(p00 * p11);
}

/// The expanded polynomial sqrt(p0 - p0^2 + (1 - 2p0 + 2p0^2) e + (p0 - p0^2) e^2),
/// e = e^{-t/T2}; algebraically identical to t2_kappa.
inline double t2_kappa_polynomial(double p0, double t, double T2) {
  check_relaxation_domain(p0, t, T2);
  const double e = std::exp(-t / T2);
  const double v = p0 - p0 * p0;
  return std::sqrt(v + (1.0 - 2.0 * p0 + 2.0 * p0 * p0) * e + v * e * e);
}

/// Term-wise upper bound on t2_kappa.
inline double t2_kappa_upper_bound(double p0, double t, double T2) {
  check_relaxation_domain(p0, t, T2);
  const double v = p0 - p0 * p0;
  return std::sqrt(v) + std::sqrt(1.0 - 2.0 * p0 + 2.0 * p0 * p0) * std::exp(-t / (2.0 * T2)) +
         std::sqrt(v) * std::exp(-t / T2);
}

}  // namespace qthermo
