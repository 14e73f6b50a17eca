// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#pragma once

#include <span>

#include "hpdwave/manifold.hpp"

namespace hpdwave::detail {

/// Point and tangent arithmetic in a metric's chart. The wavelet machinery is
/// written once against this interface; the Riemannian chart is curved, the
/// other three are flat (plain linear algebra on chart coordinates).
class Geometry {
 public:
  virtual ~Geometry() = default;

  virtual Matrix geodesic(const Matrix& a, const Matrix& b, double t) const = 0;
  virtual Matrix log(const Matrix& base, const Matrix& q) const = 0;
  virtual Matrix exp(const Matrix& base, const Matrix& v) const = 0;
  /// The point b with midpoint(a, b) == mid.
  virtual Matrix reflect(const Matrix& mid, const Matrix& a) const = 0;
  virtual Matrix mean(std::span<const Matrix> points, std::span<const double> weights,
                      const KarcherOptions& options) const = 0;
  /// Transport of a tangent vector at `base` to the identity tangent space.
  virtual Matrix whiten(const Matrix& base, const Matrix& v) const = 0;

  Matrix midpoint(const Matrix& a, const Matrix& b) const { return geodesic(a, b, 0.5); }
};

const Geometry& geometry_for(MetricKind metric);

// Riemannian kernels on raw Hermitian matrices.
Matrix riemannian_geodesic(const Matrix& a, const Matrix& b, double t);
Matrix riemannian_log(const Matrix& p, const Matrix& q);
Matrix riemannian_exp(const Matrix& p, const Matrix& v);
Matrix riemannian_mean(std::span<const Matrix> points, std::span<const double> weights,
                       const KarcherOptions& options);
double riemannian_dist(const Matrix& p1, const Matrix& p2);

}  // namespace hpdwave::detail
