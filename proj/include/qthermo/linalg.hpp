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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace qthermo {

using complex_t = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Deterministic engine used throughout; identical seeds give identical
/// streams on a given standard library.
using Rng = std::mt19937_64;

/// Largest entry modulus; zero for empty matrices.
template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// max |M - M^dagger|
inline double hermiticity_defect(const CMatrix& m) {
  return max_abs(m - m.adjoint());
}

/// Real eigenvalues of a Hermitian matrix, ascending. Only the lower triangle
/// is read, so pass a Hermitian input.
inline RVector hermitian_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Singular values sorted descending.
inline RVector singular_values(const CMatrix& m) {
  if (m.size() == 0) return RVector{};
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues();
}

/// Frobenius inner product tr(X Y^dagger).
inline complex_t frobenius_inner(const CMatrix& x, const CMatrix& y) {
  return (x.array() * y.array().conjugate()).sum();
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of R's diagonal absorbed into Q.
inline CMatrix haar_unitary(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = complex_t(normal(rng), normal(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    complex_t d = r(j, j);
    double a = std::abs(d);
    q.col(j) *= (a > 0.0 ? d / a : complex_t(1.0));
  }
  return q;
}

/// Random mixed state: W W^dagger / tr with W a d x rank Ginibre matrix.
inline CMatrix random_density(Eigen::Index d, Rng& rng, Eigen::Index rank = -1) {
  if (rank <= 0) rank = d;
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix w(d, rank);
  for (Eigen::Index j = 0; j < rank; ++j)
    for (Eigen::Index i = 0; i < d; ++i) w(i, j) = complex_t(normal(rng), normal(rng));
  CMatrix rho = w * w.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

/// Random complex correlation matrix (PSD, unit diagonal).
inline CMatrix random_correlation(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix v(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) v(i, j) = complex_t(normal(rng), normal(rng));
  for (Eigen::Index i = 0; i < d; ++i) v.row(i).normalize();
  CMatrix c = v * v.adjoint();
  for (Eigen::Index i = 0; i < d; ++i) c(i, i) = 1.0;
  return c;
}

}  // namespace qthermo
