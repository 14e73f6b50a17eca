// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "hpdwave/linalg.hpp"

namespace hpdwave {

enum class MetricKind { Riemannian, LogEuclidean, Cholesky, Euclidean };

std::string_view to_string(MetricKind metric);
/// Accepts "riemannian", "logeuclidean" (or "log-euclidean"), "cholesky",
/// "euclidean"; case-insensitive.
MetricKind parse_metric(std::string_view name);

/// Curve sampled on the equispaced grid x_l = l/n, l = 1..n.
using HpdCurve = std::vector<HpdMatrix>;

bool is_dyadic(std::size_t n) noexcept;
/// log2(n) for dyadic n, throws NotDyadic otherwise.
int dyadic_levels(std::size_t n);

struct TangentVector {
  HpdMatrix base;
  HermitianMatrix vector;
};

/// Affine-invariant inner product <h1, h2>_p.
double inner_product(const HpdMatrix& p, const HermitianMatrix& h1, const HermitianMatrix& h2);
double riemannian_norm(const HpdMatrix& p, const HermitianMatrix& h);

double dist(MetricKind metric, const HpdMatrix& p1, const HpdMatrix& p2);

/// Geodesic through p1 (t = 0) and p2 (t = 1). For the flat metrics this is
/// linear interpolation in the metric's chart (matrix log, Cholesky factor or
/// raw entries). Euclidean extrapolation that leaves the cone throws NotPD.
HpdMatrix geodesic(MetricKind metric, const HpdMatrix& p1, const HpdMatrix& p2, double t);

HpdMatrix exp_map(const HpdMatrix& p, const HermitianMatrix& h);
HermitianMatrix log_map(const HpdMatrix& p, const HpdMatrix& q);

/// p^{-1/2} * w: transports w from T_p to the tangent space at the identity.
HermitianMatrix whitening_transport(const HpdMatrix& p, const HermitianMatrix& w);

/// Parallel transport of w along the geodesic leaving p with velocity v,
/// evaluated at Exp_p(v).
HermitianMatrix geodesic_parallel_transport(const HpdMatrix& p, const HermitianMatrix& v,
                                            const HermitianMatrix& w);

struct KarcherOptions {
  double tol = 1e-10;
  int max_iter = 100;
};

/// Weighted intrinsic mean. Weights are normalized by their sum, which must be
/// nonzero; negative weights are allowed.
HpdMatrix karcher_mean(std::span<const HpdMatrix> points, std::span<const double> weights,
                       MetricKind metric = MetricKind::Riemannian, KarcherOptions options = {});

/// Map between HPD matrices and the chart in which a metric is flat. The
/// Riemannian chart is the identity.
Matrix to_chart(MetricKind metric, const Matrix& p);
Matrix from_chart(MetricKind metric, const Matrix& c);

}  // namespace hpdwave
