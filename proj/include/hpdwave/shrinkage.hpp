// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hpdwave/wavelet.hpp"

namespace hpdwave {

/// Values on the dyadic coefficient tree: scales[j-1] holds 2^{j-1} entries.
/// Node (j, k) has children (j+1, 2k) and (j+1, 2k+1); (1, 0) is the root.
template <class T>
struct DyadicPyramid {
  std::vector<std::vector<T>> scales;

  static DyadicPyramid filled(int levels, T value) {
    DyadicPyramid out;
    out.scales.resize(static_cast<std::size_t>(levels));
    for (std::size_t j = 0; j < out.scales.size(); ++j) out.scales[j].assign(std::size_t{1} << j, value);
    return out;
  }

  int levels() const noexcept { return static_cast<int>(scales.size()); }
  std::size_t size() const noexcept {
    std::size_t total = 0;
    for (const auto& s : scales) total += s.size();
    return total;
  }
  const T& at(int j, std::size_t k) const { return scales.at(static_cast<std::size_t>(j) - 1).at(k); }
  T& at(int j, std::size_t k) { return scales.at(static_cast<std::size_t>(j) - 1).at(k); }
};

using TracePyramid = DyadicPyramid<double>;
using LabelTree = DyadicPyramid<std::uint8_t>;

/// d_{j,k} = Re Tr(whitened D_{j,k}).
TracePyramid trace_pyramid(const WaveletDecomposition& decomp);

/// Wishart noise model of a bias-corrected multitaper periodogram.
struct NoiseModel {
  Index d = 1;
  int B = 1;        ///< degrees of freedom, B >= d
  int levels = 1;   ///< J, the curve has 2^J points
  int order = 5;    ///< refinement order N
};

/// Closed-form variance of an interior trace coefficient of i.i.d. Wishart
/// noise: 2^{-J} * sum_i (C_{N,i}/2)^2 * sum_{i=1}^{d} trigamma(B - d + i).
double noise_variance(const NoiseModel& model);

/// sigma * sqrt(2 ln n).
double universal_threshold(double sigma, std::size_t n_coeffs);

/// Robust noise level from the finest-scale traces: MAD / 0.6745.
double mad_sigma(const TracePyramid& traces);

/// Keep-or-kill labels minimising sum_{killed} d^2 + lambda^2 * #kept over
/// rooted subtrees. Ties resolve to kill.
LabelTree cpress_prune(const TracePyramid& traces, double lambda);

double cpress_objective(const TracePyramid& traces, const LabelTree& labels, double lambda);

/// True iff every kept node's parent is kept.
bool is_rooted_tree(const LabelTree& labels);

/// Zeroes the coefficients labelled 0. Base points are left alone.
WaveletDecomposition apply_labels(const WaveletDecomposition& decomp, const LabelTree& labels);

/// Forward transform, CPRESS at lambda, inverse transform.
HpdCurve cpress_denoise(const HpdCurve& curve, const TransformOptions& options, double lambda);

struct CvResult {
  double lambda = 0.0;
  std::vector<double> scores;  ///< aligned with the grid
};

/// Two-fold cross-validation of the CPRESS threshold. Each half (even and odd
/// samples) is denoised and scored against the other half by squared
/// Riemannian distance to geodesic midpoints of the estimate. The returned
/// lambda is on the scale of the half-length curves. A threshold whose
/// reconstruction fails scores +infinity.
CvResult cv_select_lambda(const HpdCurve& curve, const TransformOptions& options,
                          std::span<const double> grid);

}  // namespace hpdwave
