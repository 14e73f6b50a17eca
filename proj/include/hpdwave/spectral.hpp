// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hpdwave/shrinkage.hpp"

namespace hpdwave {

/// d channels by T samples, unit sampling interval.
struct TimeSeries {
  Eigen::MatrixXd data;

  Index dim() const noexcept { return data.rows(); }
  Index length() const noexcept { return data.cols(); }
};

/// Orthonormal data tapers, one per column (T x B).
struct TaperSet {
  Eigen::MatrixXd tapers;
  /// Eigenvalues of the generating operator, descending (empty for sine tapers).
  Eigen::VectorXd eigenvalues;

  Index length() const noexcept { return tapers.rows(); }
  int count() const noexcept { return static_cast<int>(tapers.cols()); }
};

/// Discrete prolate spheroidal sequences: the B leading eigenvectors of the
/// tridiagonal matrix commuting with the time-frequency concentration operator,
/// W the half bandwidth in cycles per sample. First nonzero entry positive.
TaperSet dpss_tapers(Index T, double W, int B);

/// h_b(t) = sqrt(2/(T+1)) sin(pi b (t+1)/(T+1)), b = 1..B.
TaperSet sine_tapers(Index T, int B);

/// omega_l = 2 pi l / T for l = 1..T/2.
std::vector<double> fourier_frequencies(Index T);

/// I(omega_l) = (1/(2 pi B)) sum_b J_b J_b^*, J_b(omega) = sum_t h_b(t) X_t e^{-i omega t},
/// at l = 1..T/2.
HpdCurve multitaper_periodogram(const TimeSeries& ts, const TaperSet& tapers);

/// c(d, B) = -log B + (1/d) sum_{i=1}^{d} digamma(B - d + i).
double bias_constant(Index d, int B);

/// Scales every matrix by exp(-c(d, B)). Defined for the Riemannian and
/// log-Euclidean metrics only.
HpdCurve bias_correct(const HpdCurve& curve, Index d, int B, MetricKind metric);

enum class PolicyKind { Universal, Cpress, CrossValidation };

struct ThresholdPolicy {
  PolicyKind kind = PolicyKind::Universal;
  double lambda = 0.0;         ///< Cpress only
  std::vector<double> grid;    ///< CrossValidation; empty selects a default grid

  static ThresholdPolicy universal() { return {}; }
  static ThresholdPolicy cpress(double lambda) { return {PolicyKind::Cpress, lambda, {}}; }
  static ThresholdPolicy cross_validation(std::vector<double> grid = {}) {
    return {PolicyKind::CrossValidation, 0.0, std::move(grid)};
  }
};

/// "universal", "cpress:<lambda>", "cv" or "cv:<l1>,<l2>,...".
ThresholdPolicy parse_policy(std::string_view text);
std::string to_string(const ThresholdPolicy& policy);

enum class TaperKind { Dpss, Sine };

struct EstimateOptions {
  int B = 0;                 ///< tapers; 0 means B = d
  int order = 5;
  MetricKind metric = MetricKind::Riemannian;
  ThresholdPolicy policy;
  double nw = 0.0;           ///< time-bandwidth product; 0 means B/2 + 1
  TaperKind taper = TaperKind::Dpss;
  bool bias_correction = true;
  /// Estimate the trace noise level by MAD even where the closed form applies.
  bool mad_noise = false;
};

struct DenoiseResult {
  HpdCurve estimate;
  TracePyramid traces;
  LabelTree labels;
  double lambda = 0.0;
  double sigma = 0.0;  ///< trace noise level used by the universal policy
};

/// Wavelet thresholding of an HPD curve with Wishart(B) noise of dimension d.
DenoiseResult denoise_curve(const HpdCurve& curve, const EstimateOptions& options, int B);

struct SpectralEstimate {
  HpdCurve curve;
  std::vector<double> frequencies;
  Index d = 0;
  int B = 0;
  int order = 0;
  MetricKind metric = MetricKind::Riemannian;
  ThresholdPolicy policy;
  HpdCurve periodogram;  ///< bias-corrected input to the wavelet stage
  TracePyramid traces;
  LabelTree labels;
  double lambda = 0.0;
};

/// Effective taper count for a d-channel series.
int resolve_tapers(const EstimateOptions& options, Index d);
TaperSet make_tapers(const EstimateOptions& options, Index T, int B);

/// Periodogram, bias correction (if enabled) and wavelet denoising.
SpectralEstimate estimate_spectrum(const TimeSeries& ts, const EstimateOptions& options);

}  // namespace hpdwave
