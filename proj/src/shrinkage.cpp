// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#include "hpdwave/shrinkage.hpp"

#include <algorithm>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "hpdwave/parallel.hpp"

namespace hpdwave {

TracePyramid trace_pyramid(const WaveletDecomposition& decomp) {
  const auto whitened = whiten(decomp);
  TracePyramid out;
  out.scales.resize(whitened.size());
  for (std::size_t j = 0; j < whitened.size(); ++j) {
    out.scales[j].reserve(whitened[j].size());
    for (const auto& w : whitened[j]) out.scales[j].push_back(w.trace().real());
  }
  return out;
}

double noise_variance(const NoiseModel& model) {
  if (model.d < 1 || model.levels < 0) {
    throw Error(ErrorKind::InvalidArgument, "noise model needs d >= 1 and J >= 0");
  }
  if (model.B < model.d) {
    throw Error(ErrorKind::RankDeficient, "noise model needs B >= d, got B = " +
                                              std::to_string(model.B) + ", d = " +
                                              std::to_string(model.d));
  }
  double weight_energy = 0.0;
  for (double c : refinement_weights(model.order)) weight_energy += 0.25 * c * c;
  double wishart = 0.0;
  for (Index i = 1; i <= model.d; ++i) {
    wishart += boost::math::trigamma(static_cast<double>(model.B - model.d + i));
  }
  return std::ldexp(weight_energy, -model.levels) * wishart;
}

double universal_threshold(double sigma, std::size_t n_coeffs) {
  if (!(sigma >= 0.0) || n_coeffs == 0) {
    throw Error(ErrorKind::InvalidArgument, "universal threshold needs sigma >= 0 and n >= 1");
  }
  return sigma * std::sqrt(2.0 * std::log(static_cast<double>(n_coeffs)));
}

double mad_sigma(const TracePyramid& traces) {
  if (traces.levels() == 0) throw Error(ErrorKind::EmptyInput, "no traces");
  std::vector<double> v = traces.scales.back();
  const auto median = [](std::vector<double>& x) {
    const std::size_t h = x.size() / 2;
    std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(h), x.end());
    double m = x[h];
    if (x.size() % 2 == 0) {
      m = 0.5 * (m + *std::max_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(h)));
    }
    return m;
  };
  const double centre = median(v);
  for (double& x : v) x = std::abs(x - centre);
  return median(v) / 0.6745;
}

LabelTree cpress_prune(const TracePyramid& traces, double lambda) {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be nonnegative");
  const int levels = traces.levels();
  const double penalty = lambda * lambda;
  // value(j,k): best achievable sum of (d^2 - lambda^2) over rooted subtrees
  // of the node's subtree, given the node is kept.
  TracePyramid value = TracePyramid::filled(levels, 0.0);
  for (int j = levels; j >= 1; --j) {
    for (std::size_t k = 0; k < traces.scales[static_cast<std::size_t>(j) - 1].size(); ++k) {
      const double d = traces.at(j, k);
      double v = d * d - penalty;
      if (j < levels) v += std::max(0.0, value.at(j + 1, 2 * k)) + std::max(0.0, value.at(j + 1, 2 * k + 1));
      value.at(j, k) = v;
    }
  }
  LabelTree labels = LabelTree::filled(levels, 0);
  for (int j = 1; j <= levels; ++j) {
    for (std::size_t k = 0; k < labels.scales[static_cast<std::size_t>(j) - 1].size(); ++k) {
      const bool parent = j == 1 || labels.at(j - 1, k / 2) != 0;
      labels.at(j, k) = parent && value.at(j, k) > 0.0 ? 1 : 0;
    }
  }
  return labels;
}

double cpress_objective(const TracePyramid& traces, const LabelTree& labels, double lambda) {
  if (traces.levels() != labels.levels()) throw Error(ErrorKind::ShapeMismatch, "label tree shape");
  double total = 0.0;
  for (int j = 1; j <= traces.levels(); ++j) {
    const auto& t = traces.scales[static_cast<std::size_t>(j) - 1];
    const auto& l = labels.scales[static_cast<std::size_t>(j) - 1];
    if (t.size() != l.size()) throw Error(ErrorKind::ShapeMismatch, "label tree shape");
    for (std::size_t k = 0; k < t.size(); ++k) total += l[k] != 0 ? lambda * lambda : t[k] * t[k];
  }
  return total;
}

bool is_rooted_tree(const LabelTree& labels) {
  for (int j = 2; j <= labels.levels(); ++j) {
    const auto& l = labels.scales[static_cast<std::size_t>(j) - 1];
    for (std::size_t k = 0; k < l.size(); ++k) {
      if (l[k] != 0 && labels.at(j - 1, k / 2) == 0) return false;
    }
  }
  return true;
}

WaveletDecomposition apply_labels(const WaveletDecomposition& decomp, const LabelTree& labels) {
  if (labels.levels() != decomp.levels()) {
    throw Error(ErrorKind::ShapeMismatch, "label tree has " + std::to_string(labels.levels()) +
                                              " scales, decomposition has " +
                                              std::to_string(decomp.levels()));
  }
  WaveletDecomposition out = decomp;
  for (std::size_t j = 0; j < out.scales.size(); ++j) {
    if (labels.scales[j].size() != out.scales[j].size()) {
      throw Error(ErrorKind::ShapeMismatch, "label tree scale size mismatch");
    }
    for (std::size_t k = 0; k < out.scales[j].size(); ++k) {
      if (labels.scales[j][k] == 0) out.scales[j][k].coeff.setZero();
    }
  }
  return out;
}

HpdCurve cpress_denoise(const HpdCurve& curve, const TransformOptions& options, double lambda) {
  const auto decomp = forward(curve, options);
  return inverse(apply_labels(decomp, cpress_prune(trace_pyramid(decomp), lambda)));
}

namespace {

// Squared Riemannian error of a half-curve estimate against the other half,
// interpolating the estimate by geodesic midpoints.
double holdout_error(const HpdCurve& estimate, const HpdCurve& held_out, bool estimate_is_even,
                     MetricKind metric) {
  const std::size_t m = estimate.size();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    // Held-out sample i sits between estimate samples (i-1, i) when the
    // estimate is the odd half, and (i, i+1) when it is the even half.
    const HpdMatrix* left = nullptr;
    const HpdMatrix* right = nullptr;
    if (estimate_is_even) {
      left = &estimate[i];
      right = i + 1 < m ? &estimate[i + 1] : nullptr;
    } else {
      left = i > 0 ? &estimate[i - 1] : nullptr;
      right = &estimate[i];
    }
    HpdMatrix guess = left && right ? geodesic(metric, *left, *right, 0.5) : (left ? *left : *right);
    const double e = dist(MetricKind::Riemannian, guess, held_out[i]);
    total += e * e;
  }
  return total;
}

}  // namespace

CvResult cv_select_lambda(const HpdCurve& curve, const TransformOptions& options,
                          std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty lambda grid");
  dyadic_levels(curve.size());
  if (curve.size() < 8) throw Error(ErrorKind::InvalidArgument, "cross-validation needs n >= 8");
  HpdCurve even;
  HpdCurve odd;
  for (std::size_t i = 0; i < curve.size(); ++i) (i % 2 == 0 ? even : odd).push_back(curve[i]);

  const auto even_decomp = forward(even, options);
  const auto odd_decomp = forward(odd, options);
  const auto even_traces = trace_pyramid(even_decomp);
  const auto odd_traces = trace_pyramid(odd_decomp);

  CvResult result;
  result.scores.assign(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t g) {
    const double lambda = grid[g];
    try {
      const auto even_hat = inverse(apply_labels(even_decomp, cpress_prune(even_traces, lambda)));
      const auto odd_hat = inverse(apply_labels(odd_decomp, cpress_prune(odd_traces, lambda)));
      result.scores[g] = holdout_error(even_hat, odd, true, options.metric) +
                         holdout_error(odd_hat, even, false, options.metric);
    } catch (const Error&) {
      // the reconstruction left the representable HPD matrices
      result.scores[g] = std::numeric_limits<double>::infinity();
    }
  });
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const bool better = result.scores[g] < result.scores[best] ||
                        (result.scores[g] == result.scores[best] && grid[g] < grid[best]);
    if (better) best = g;
  }
  if (!std::isfinite(result.scores[best])) {
    throw Error(ErrorKind::DomainError, "no threshold in the grid gives a representable estimate");
  }
  result.lambda = grid[best];
  return result;
}

}  // namespace hpdwave
