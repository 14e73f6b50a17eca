// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#pragma once

#include <array>
#include <span>
#include <vector>

#include "hpdwave/manifold.hpp"

namespace hpdwave {

/// Midpoints M_{j,k}, j = 0..J, with 2^j midpoints at scale j. Scale J is the
/// input curve; every coarser midpoint is the geodesic midpoint of its two
/// children.
struct MidpointPyramid {
  MetricKind metric = MetricKind::Riemannian;
  std::vector<std::vector<HpdMatrix>> scales;

  int levels() const noexcept { return static_cast<int>(scales.size()) - 1; }
};

MidpointPyramid build_pyramid(const HpdCurve& curve, MetricKind metric);

/// Intrinsic Neville interpolation: evaluates at x the intrinsic polynomial
/// through (xs[i], points[i]).
HpdMatrix neville(std::span<const HpdMatrix> points, std::span<const double> xs, double x,
                  MetricKind metric = MetricKind::Riemannian);

/// Which formula turns the interpolated cumulative mean into a predicted
/// fine-scale midpoint. `Appendix` reproduces intrinsic polynomials; `MainText`
/// swaps the geodesic endpoints and is kept only for comparison studies.
enum class PredictionForm { Appendix, MainText };

/// `Fast` predicts by weighted intrinsic means with the average-interpolation
/// weights of the stencil (the printed tables at interior locations). Where
/// such a mean has no solution it lowers the order locally, down to 1.
/// `Neville` runs the intrinsic Neville tableau everywhere.
enum class PredictionMethod { Neville, Fast };

/// Predicted children of a coarse midpoint, in chart coordinates.
struct MidpointPrediction {
  Matrix even;  ///< M~_{j,2k}
  Matrix odd;   ///< M~_{j,2k+1}
};

/// Refinement weights C_N (length 2N) for interior locations, N in {1,3,5,7}.
std::span<const double> refinement_weights(int order);

/// Euclidean average-interpolation weights for the right half of cell `offset`
/// in a stencil of `order` unit cells. The left half uses 2 - w elementwise at
/// `offset` and -w elsewhere. Interior offsets reproduce refinement_weights.
std::vector<double> average_interpolation_weights(int order, std::size_t offset);

/// Neville-path prediction of the two children of coarse[k]. Coarse midpoints
/// and results are chart coordinates (see to_chart); for the Riemannian metric
/// these are the HPD matrices themselves.
MidpointPrediction predict_midpoints(std::span<const Matrix> coarse, std::size_t k, int order,
                                     MetricKind metric,
                                     PredictionForm form = PredictionForm::Appendix);

/// Weighted-mean prediction with the interior weights. Throws UnsupportedOrder
/// for orders outside {1,3,5,7} and BoundaryLocation near the ends.
MidpointPrediction predict_midpoints_fast(std::span<const Matrix> coarse, std::size_t k, int order,
                                          MetricKind metric);

struct TransformOptions {
  int order = 5;
  MetricKind metric = MetricKind::Riemannian;
  PredictionMethod method = PredictionMethod::Fast;
  PredictionForm form = PredictionForm::Appendix;
};

struct WaveletCoefficient {
  Matrix coeff;  ///< D_{j,k}, tangent at `base`
  Matrix base;   ///< predicted midpoint M~_{j,2k+1}
};

/// Coarsest midpoint plus coefficients D_{j,k} for j = 1..J,
/// k = 0..2^{j-1}-1. Coefficient scale j is the finer scale it reconstructs.
/// All matrices are chart coordinates of `options.metric`.
struct WaveletDecomposition {
  TransformOptions options;
  Matrix coarsest;
  std::vector<std::vector<WaveletCoefficient>> scales;  ///< scales[j-1]

  int levels() const noexcept { return static_cast<int>(scales.size()); }
  Index dim() const noexcept { return coarsest.rows(); }
  std::size_t coefficient_count() const noexcept;
  const WaveletCoefficient& at(int j, std::size_t k) const { return scales.at(j - 1).at(k); }
  WaveletCoefficient& at(int j, std::size_t k) { return scales.at(j - 1).at(k); }
};

/// Refinement order actually used when predicting from `available` coarse
/// midpoints: min(order, available).
int effective_order(int order, std::size_t available) noexcept;

WaveletDecomposition forward(const HpdCurve& curve, const TransformOptions& options = {});
HpdCurve inverse(const WaveletDecomposition& decomp);
/// Inverse without leaving chart coordinates; never fails the PD check.
std::vector<Matrix> inverse_chart(const WaveletDecomposition& decomp);

/// Whitened coefficients, indexed like `decomp.scales`.
std::vector<std::vector<Matrix>> whiten(const WaveletDecomposition& decomp);

}  // namespace hpdwave
