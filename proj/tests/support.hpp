// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#pragma once

#include <cmath>
#include <random>

#include <Eigen/QR>

#include "hpdwave/manifold.hpp"

namespace hpdwave::testing {

inline Matrix random_complex(Index rows, Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline HermitianMatrix random_hermitian(Index d, std::mt19937_64& rng, double scale = 1.0) {
  Matrix a = random_complex(d, d, rng, scale);
  return HermitianMatrix(a + a.adjoint());
}

/// exp of a random Hermitian matrix, so the log-spread is controlled by `scale`.
inline HpdMatrix random_hpd(Index d, std::mt19937_64& rng, double scale = 0.5) {
  return HpdMatrix(exp(random_hermitian(d, rng, scale)));
}

/// Haar-distributed unitary from the QR factorisation of a Ginibre matrix.
inline Matrix random_unitary(Index d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_complex(d, d, rng));
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR();
  for (Index i = 0; i < d; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

/// Invertible matrix with singular values in [0.5, 2].
inline Matrix random_invertible(Index d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> s(0.5, 2.0);
  Eigen::VectorXd sv(d);
  for (Index i = 0; i < d; ++i) sv(i) = s(rng);
  return random_unitary(d, rng) * sv.cast<Complex>().asDiagonal() * random_unitary(d, rng);
}

/// Curve of i.i.d. random HPD matrices.
inline HpdCurve random_curve(std::size_t n, Index d, std::mt19937_64& rng, double scale = 0.5) {
  HpdCurve c;
  c.reserve(n);
  for (std::size_t i = 0; i < n; ++i) c.push_back(random_hpd(d, rng, scale));
  return c;
}

/// Smooth curve exp(H(x)) with H(x) = sum_m sin(m pi x + phase_m) H_m / m.
inline HpdCurve smooth_curve(std::size_t n, Index d, std::mt19937_64& rng) {
  HermitianMatrix hs[3] = {random_hermitian(d, rng, 0.3), random_hermitian(d, rng, 0.3),
                           random_hermitian(d, rng, 0.3)};
  std::uniform_real_distribution<double> ph(0.0, 6.0);
  const double phase[3] = {ph(rng), ph(rng), ph(rng)};
  HpdCurve c;
  for (std::size_t l = 1; l <= n; ++l) {
    const double x = static_cast<double>(l) / static_cast<double>(n);
    Matrix h = Matrix::Zero(d, d);
    for (int m = 0; m < 3; ++m)
      h += std::sin((m + 1) * 3.14159265358979 * x + phase[m]) / (m + 1) * hs[m].matrix();
    c.push_back(HpdMatrix(exp(HermitianMatrix(h))));
  }
  return c;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline double max_curve_dist(const HpdCurve& a, const HpdCurve& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, dist(MetricKind::Riemannian, a[i], b[i]));
  return worst;
}

inline HpdCurve congruence_curve(const Matrix& a, const HpdCurve& c) {
  HpdCurve out;
  out.reserve(c.size());
  for (const auto& p : c) out.push_back(HpdMatrix(congruence(a, p.matrix())));
  return out;
}

}  // namespace hpdwave::testing
