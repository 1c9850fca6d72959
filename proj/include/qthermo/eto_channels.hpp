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

// Covariant, Gibbs-preserving CPTP maps parametrized by transition
// probabilities G and coherence damping factors A, for Hamiltonians with a
// nondegenerate Bohr spectrum. Choi matrices are unnormalized (trace d) and
// indexed (i d + k, j d + l) for the entry <k| L(|i><j|) |l>.

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "qthermo/coherence_bounds.hpp"
#include "qthermo/core.hpp"

namespace qthermo {

inline constexpr double kChoiTol = 1e-9;
inline constexpr double kGibbsFixedTol = 1e-10;
inline constexpr double kCovarianceTol = 1e-9;

// ---------------------------------------------------------------------------
// General linear maps given by their Choi matrix

/// L(X) = sum_ij X_ij L(|i><j|).
inline CMatrix apply_choi(const CMatrix& choi, const CMatrix& x) {
  const Eigen::Index d = x.rows();
  if (x.cols() != d || choi.rows() != d * d || choi.cols() != d * d)
    throw DimensionError("operator and Choi matrix sizes do not match");
  CMatrix y = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      if (x(i, j) == complex_t(0.0)) continue;
      y += x(i, j) * choi.block(i * d, j * d, d, d);
    }
  return y;
}

/// Choi matrix of an arbitrary linear map on d x d matrices.
template <class Map>
CMatrix choi_of(const Map& f, Eigen::Index d) {
  CMatrix c(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      CMatrix e = CMatrix::Zero(d, d);
      e(i, j) = 1.0;
      CMatrix out = f(e);
      if (out.rows() != d || out.cols() != d) throw DimensionError("map changed the operator dimension");
      c.block(i * d, j * d, d, d) = out;
    }
  return c;
}

/// max_ij |sum_k C(i d + k, j d + k) - delta_ij|
inline double trace_preservation_defect(const CMatrix& choi) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(choi.rows()))));
  double err = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      complex_t s = choi.block(i * d, j * d, d, d).trace();
      err = std::max(err, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  return err;
}

inline double choi_min_eigenvalue(const CMatrix& choi) {
  return hermitian_eigenvalues(0.5 * (choi + choi.adjoint()))(0);
}

/// Kraus operators from the Choi eigendecomposition; eigenvalues below
/// `cutoff` times the largest are dropped.
inline std::vector<CMatrix> kraus_from_choi(const CMatrix& choi, double cutoff = 1e-12) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(choi.rows()))));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (choi + choi.adjoint()));
  const RVector& ev = es.eigenvalues();
  const double top = std::max(ev.maxCoeff(), 0.0);
  std::vector<CMatrix> out;
  for (Eigen::Index m = ev.size() - 1; m >= 0; --m) {
    if (ev(m) <= cutoff * top || ev(m) <= 0.0) continue;
    const double s = std::sqrt(ev(m));
    CMatrix k(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index r = 0; r < d; ++r) k(r, i) = s * es.eigenvectors()(i * d + r, m);
    out.push_back(std::move(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Covariant channels

/// Separate positivity verdicts: the damping-matrix test and the full Choi
/// spectrum. They coincide for maps of this class; both are kept so either
/// can be inspected.
struct PositivityReport {
  DmpVerdict dmp;
  double choi_min_eigenvalue = 0.0;
  bool choi_psd = true;
};

/// build_eto rejected the (G, A) pair as not completely positive.
class NotCompletelyPositiveError : public InfeasibleError {
 public:
  NotCompletelyPositiveError(PositivityReport r, const std::string& what)
      : InfeasibleError(what), report_(std::move(r)) {}
  const PositivityReport& report() const { return report_; }

 private:
  PositivityReport report_;
};

/// Choi matrix of the covariant map with transitions G and damping A.
inline CMatrix covariant_choi(const TransitionMatrix& g, const DampingFactors& a) {
  const auto d = static_cast<Eigen::Index>(g.dimension());
  if (a.dimension() != g.dimension()) throw DimensionError("transition matrix and damping factors differ in size");
  CMatrix c = CMatrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) {
        for (Eigen::Index k = 0; k < d; ++k) c(i * d + k, i * d + k) = g.matrix()(i, k);
      } else {
        c(i * d + i, j * d + j) = a.matrix()(i, j);
      }
    }
  return c;
}

inline PositivityReport check_positivity(const TransitionMatrix& g, const DampingFactors& a,
                                         double tol_psd = kChoiTol) {
  PositivityReport r;
  r.dmp = dmp_check(damping_matrix(g, a), tol_psd);
  r.choi_min_eigenvalue = choi_min_eigenvalue(covariant_choi(g, a));
  r.choi_psd = r.choi_min_eigenvalue >= -tol_psd;
  return r;
}

class ETOChannel;
inline ETOChannel build_eto(const TransitionMatrix& g, const DampingFactors& a, const Hamiltonian& h,
                            InverseTemperature beta);

/// Immutable validated channel. Obtain through build_eto.
class ETOChannel {
 public:
  const TransitionMatrix& transitions() const { return g_; }
  const DampingFactors& damping() const { return a_; }
  const Hamiltonian& hamiltonian() const { return h_; }
  InverseTemperature beta() const { return beta_; }
  const CMatrix& choi() const { return choi_; }
  std::size_t dimension() const { return g_.dimension(); }

  /// Action on an arbitrary operator.
  CMatrix apply_matrix(const CMatrix& x) const {
    const auto d = static_cast<Eigen::Index>(dimension());
    if (x.rows() != d || x.cols() != d) throw DimensionError("operator dimension does not match channel");
    CMatrix y = CMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        if (i == j) {
          for (Eigen::Index k = 0; k < d; ++k) y(k, k) += g_.matrix()(i, k) * x(i, i);
        } else {
          y(i, j) = a_.matrix()(i, j) * x(i, j);
        }
      }
    return y;
  }

 private:
  ETOChannel(TransitionMatrix g, DampingFactors a, Hamiltonian h, InverseTemperature beta, CMatrix choi)
      : g_(std::move(g)), a_(std::move(a)), h_(std::move(h)), beta_(beta), choi_(std::move(choi)) {}
  friend ETOChannel build_eto(const TransitionMatrix& g, const DampingFactors& a, const Hamiltonian& h,
                              InverseTemperature beta);

  TransitionMatrix g_;
  DampingFactors a_;
  Hamiltonian h_;
  InverseTemperature beta_;
  CMatrix choi_;
};

/// Validates and assembles a channel. Throws DomainError for unsupported
/// spectra, non-Gibbs-stochastic G or non-Hermitian-compatible A, and
/// NotCompletelyPositiveError (with witness) when positivity fails.
inline ETOChannel build_eto(const TransitionMatrix& g, const DampingFactors& a, const Hamiltonian& h,
                            InverseTemperature beta) {
  if (g.dimension() != h.dimension() || a.dimension() != h.dimension())
    throw DimensionError("channel data and Hamiltonian differ in size");
  if (!supports_coherence_analysis(h))
    throw DomainError("covariant channels need distinct levels and a nondegenerate Bohr spectrum");
  const double defect = g.gibbs_defect(gibbs_probabilities(h, beta));
  if (defect > kStochasticTol) {
    std::ostringstream os;
    os << "transition matrix is not Gibbs-stochastic (defect " << defect << ")";
    throw DomainError(os.str());
  }
  if (a.hermiticity_defect() > 1e-10)
    throw DomainError("damping factors must satisfy alpha_ji = conj(alpha_ij)");
  PositivityReport r = check_positivity(g, a);
  if (!r.choi_psd || !r.dmp.satisfied) {
    std::ostringstream os;
    os << "channel is not completely positive: damping matrix min eigenvalue " << r.dmp.min_eigenvalue;
    throw NotCompletelyPositiveError(std::move(r), os.str());
  }
  return ETOChannel(g, a, h, beta, covariant_choi(g, a));
}

inline DensityMatrix apply(const ETOChannel& ch, const DensityMatrix& rho) {
  if (rho.dimension() != ch.dimension()) throw DimensionError("state dimension does not match channel");
  return assert_state(ch.apply_matrix(rho.matrix()));
}

/// compose(f, g) applies f first, then g.
inline ETOChannel compose(const ETOChannel& f, const ETOChannel& g) {
  if (!(f.hamiltonian() == g.hamiltonian()) || f.beta().value() != g.beta().value())
    throw DomainError("composed channels must share Hamiltonian and temperature");
  TransitionMatrix gm(f.transitions().matrix() * g.transitions().matrix(), 1e-9);
  DampingFactors am(f.damping().matrix().cwiseProduct(g.damping().matrix()));
  return build_eto(gm, am, f.hamiltonian(), f.beta());
}

inline std::vector<CMatrix> kraus_decomposition(const ETOChannel& ch) { return kraus_from_choi(ch.choi()); }

inline std::size_t choi_rank(const CMatrix& choi, double tol = 1e-10) {
  RVector ev = hermitian_eigenvalues(0.5 * (choi + choi.adjoint()));
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > tol) ++n;
  return n;
}

inline double gibbs_fixed_point_defect(const ETOChannel& ch) {
  DensityMatrix tau = gibbs_state(ch.hamiltonian(), ch.beta());
  return max_abs(CMatrix(ch.apply_matrix(tau.matrix()) - tau.matrix()));
}

// Common channels.

inline ETOChannel identity_channel(const Hamiltonian& h, InverseTemperature beta) {
  return build_eto(TransitionMatrix::identity(h.dimension()), DampingFactors::constant(h.dimension(), 1.0), h, beta);
}

/// Every state to the Gibbs state.
inline ETOChannel thermalizer_channel(const Hamiltonian& h, InverseTemperature beta) {
  std::vector<double> g = gibbs_probabilities(h, beta);
  return build_eto(TransitionMatrix::thermalizer(g), DampingFactors::constant(h.dimension(), 0.0), h, beta);
}

inline ETOChannel dephasing_channel(const Hamiltonian& h, InverseTemperature beta) {
  return build_eto(TransitionMatrix::identity(h.dimension()), DampingFactors::constant(h.dimension(), 0.0), h, beta);
}

/// Optimal qubit channel for p -> q with real damping kappa.
inline ETOChannel optimal_qubit_channel(double p, double q, const Hamiltonian& h, InverseTemperature beta) {
  const double dE = h.level(1) - h.level(0);
  KappaResult k = qubit_kappa(p, q, beta, dE);
  if (k.gibbs_diagonal) return identity_channel(h, beta);
  return build_eto(qubit_transition_probs(p, q, beta, dE), DampingFactors::constant(2, k.value), h, beta);
}

// ---------------------------------------------------------------------------
// Covariance

struct CovarianceReport {
  bool passed = true;
  double max_deviation = 0.0;
  /// Sample index of the largest deviation.
  std::size_t witness = 0;
  CMatrix witness_state;
  double witness_time = 0.0;
};

/// Checks f(U_t rho U_t^dagger) = U_t f(rho) U_t^dagger, U_t = e^{-iHt}, on
/// seeded random (rho, t).
template <class Map>
CovarianceReport verify_covariance_map(const Map& f, const Hamiltonian& h, std::size_t samples,
                                       std::uint64_t seed = 0, double tol = kCovarianceTol) {
  Rng rng(seed);
  std::uniform_real_distribution<double> tdist(0.0, 20.0);
  const auto d = static_cast<Eigen::Index>(h.dimension());
  CovarianceReport rep;
  for (std::size_t s = 0; s < samples; ++s) {
    CMatrix rho = random_density(d, rng);
    double t = tdist(rng);
    CVector phase(d);
    for (Eigen::Index k = 0; k < d; ++k) phase(k) = std::exp(complex_t(0.0, -h.level(k) * t));
    CMatrix u = phase.asDiagonal();
    CMatrix lhs = f(CMatrix(u * rho * u.adjoint()));
    CMatrix rhs = u * f(rho) * u.adjoint();
    double dev = max_abs(CMatrix(lhs - rhs));
    if (s == 0 || dev > rep.max_deviation) {
      rep.max_deviation = dev;
      rep.witness = s;
      rep.witness_state = rho;
      rep.witness_time = t;
    }
  }
  rep.passed = rep.max_deviation <= tol;
  return rep;
}

inline CovarianceReport verify_covariance(const ETOChannel& ch, std::size_t samples, std::uint64_t seed = 0,
                                          double tol = kCovarianceTol) {
  return verify_covariance_map([&](const CMatrix& x) { return ch.apply_matrix(x); }, ch.hamiltonian(), samples,
                               seed, tol);
}

// ---------------------------------------------------------------------------
// Fixed-time relaxation maps

enum class DaviesForm {
  /// Coherence factor e^{-t/T1}.
  exponential,
  /// Coherence factor sqrt(p(0->0) p(1->1)).
  optimal,
};

/// Qubit relaxation at time t: populations relax towards the Gibbs state
/// (ground population p0) with factor e^{-t/T2}. The exponential form damps
/// coherences with e^{-t/T1}; it is completely positive for every t and p0
/// exactly when T1 <= 2 T2, which is enforced.
inline ETOChannel davies_qubit_map(double p0, double t, double T1, double T2, DaviesForm form, const Hamiltonian& h,
                                   InverseTemperature beta) {
  check_relaxation_domain(p0, t, T2);
  if (!(T1 > 0.0) || !std::isfinite(T1)) throw DomainError("coherence time must be positive");
  if (h.dimension() != 2) throw DimensionError("relaxation map is defined for qubits");
  const double gp = gibbs_probabilities(h, beta)[0];
  if (std::abs(gp - p0) > 1e-9) throw DomainError("p0 must be the Gibbs ground population of (H, beta)");
  if (form == DaviesForm::exponential && T1 > 2.0 * T2)
    throw DomainError("exponential coherence decay needs T1 <= 2 T2 for complete positivity");
  const double decay = 1.0 - std::exp(-t / T2);
  const double p1 = 1.0 - p0;
  RMatrix g(2, 2);
  g << 1.0 - decay * p1, decay * p1, decay * p0, 1.0 - decay * p0;
  const double alpha = form == DaviesForm::exponential ? std::exp(-t / T1) : std::sqrt(g(0, 0) * g(1, 1));
  return build_eto(TransitionMatrix(g), DampingFactors::constant(2, alpha), h, beta);
}

}  // namespace qthermo
