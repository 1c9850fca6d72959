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


// Random generators and reference constructions shared by the tests and the
// acceptance binary.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qthermo/coherence_bounds.hpp"
#include "qthermo/eto_channels.hpp"

namespace qthermo::testing {

/// Random detailed-balance Gibbs-stochastic matrix. `fill` in (0, 1] scales
/// the off-diagonal mass relative to the largest admissible.
inline RMatrix random_gibbs_stochastic(const std::vector<double>& gibbs, Rng& rng, double fill = 1.0) {
  const auto d = static_cast<Eigen::Index>(gibbs.size());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RMatrix s = RMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) s(i, j) = s(j, i) = u(rng);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) off += s(i, j) * gibbs[j];
    worst = std::max(worst, off);
  }
  const double c = worst > 0.0 ? fill * u(rng) / worst : 0.0;
  RMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      g(i, j) = c * s(i, j) * gibbs[j];
      off += g(i, j);
    }
    g(i, i) = 1.0 - off;
  }
  return g;
}

/// alpha_ij = m sqrt(G_ii G_jj) C_ij for a random correlation matrix C. The
/// damping matrix is PSD for m <= 1 and may fail above.
inline CMatrix random_damping(const RMatrix& g, double m, Rng& rng) {
  const Eigen::Index d = g.rows();
  CMatrix c = random_correlation(d, rng);
  CMatrix a = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (i != j) a(i, j) = m * std::sqrt(g(i, i) * g(j, j)) * c(i, j);
  return a;
}

/// Choi matrix assembled from the action on matrix units.
inline CMatrix direct_choi(const RMatrix& g, const CMatrix& a) {
  const Eigen::Index d = g.rows();
  auto map = [&](const CMatrix& x) {
    CMatrix y = CMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        if (i == j)
          for (Eigen::Index k = 0; k < d; ++k) y(k, k) += g(i, k) * x(i, i);
        else
          y(i, j) += a(i, j) * x(i, j);
      }
    return y;
  };
  return choi_of(map, d);
}

inline double min_eig(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Independent 2x2 solve for the qubit Gibbs-stochastic matrix taking ground
/// population p to q: returns (p00, p11).
inline std::pair<double, double> solve_qubit(double p, double q, double g0) {
  // p x + (1-p)(1-y) = q ;  g0 x + (1-g0)(1-y) = g0
  Eigen::Matrix2d m;
  m << p, -(1.0 - p), g0, -(1.0 - g0);
  Eigen::Vector2d rhs(q - (1.0 - p), g0 - (1.0 - g0));
  Eigen::Vector2d xy = m.fullPivLu().solve(rhs);
  return {xy(0), xy(1)};
}

/// Quasi-cycle probabilities from the linear system: row sums, Gibbs columns
/// with weights (1, c, b) in level order (0, 1, 2), and the four forbidden
/// transitions set to zero. Returns the matrix and the residual.
inline std::pair<RMatrix, double> solve_quasicycle(double a, double b) {
  const double c = b / a;
  const double w[3] = {1.0, c, b};
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(10, 9);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(10);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, 3 * i + j) = 1.0;
    rhs(i) = 1.0;
  }
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) m(3 + j, 3 * i + j) = w[i];
    rhs(3 + j) = w[j];
  }
  const int zeros[4][2] = {{2, 2}, {2, 1}, {1, 0}, {0, 2}};
  for (int z = 0; z < 4; ++z) m(6 + z, 3 * zeros[z][0] + zeros[z][1]) = 1.0;
  Eigen::VectorXd x = m.colPivHouseholderQr().solve(rhs);
  RMatrix g(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = x(3 * i + j);
  return {g, (m * x - rhs).cwiseAbs().maxCoeff()};
}

/// Alternating polar ascent on |tr(W X V Y)| over unitaries W, V.
inline double polar_ascent(const CMatrix& x, const CMatrix& y, Rng& rng, int sweeps = 200) {
  const Eigen::Index n = x.rows();
  CMatrix w = haar_unitary(n, rng), v = haar_unitary(n, rng);
  auto polar = [](const CMatrix& m) {
    // argmax_U Re tr(U M) = V_m U_m^dagger for M = U_m S V_m^dagger
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return CMatrix(svd.matrixV() * svd.matrixU().adjoint());
  };
  double best = 0.0;
  for (int s = 0; s < sweeps; ++s) {
    w = polar(CMatrix(x * v * y));
    v = polar(CMatrix(y * w * x));
    best = std::max(best, std::abs((w * x * v * y).trace()));
  }
  return best;
}

}  // namespace qthermo::testing
