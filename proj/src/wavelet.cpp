// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#include "hpdwave/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "geometry.hpp"
#include "hpdwave/parallel.hpp"

namespace hpdwave {

namespace {

using detail::Geometry;

constexpr std::array<double, 2> kWeights1{1.0, 1.0};
constexpr std::array<double, 6> kWeights3{1.0 / 8, -1.0 / 8, 8.0 / 8, 8.0 / 8, -1.0 / 8, 1.0 / 8};
constexpr std::array<double, 10> kWeights5{-3.0 / 128,  3.0 / 128,   22.0 / 128, -22.0 / 128,
                                           128.0 / 128, 128.0 / 128, -22.0 / 128, 22.0 / 128,
                                           3.0 / 128,   -3.0 / 128};
constexpr std::array<double, 14> kWeights7{
    5.0 / 1024,    -5.0 / 1024,    -44.0 / 1024, 44.0 / 1024, 201.0 / 1024,
    -201.0 / 1024, 1024.0 / 1024,  1024.0 / 1024, -201.0 / 1024, 201.0 / 1024,
    44.0 / 1024,   -44.0 / 1024,   -5.0 / 1024,  5.0 / 1024};

// Locations with at least this many coarse midpoints are predicted in parallel.
constexpr std::size_t kParallelGrain = 64;

Matrix neville_chart(const Geometry& g, std::span<const Matrix> points, std::span<const double> xs,
                     double x) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "Neville interpolation without points");
  if (points.size() != xs.size()) {
    throw Error(ErrorKind::ShapeMismatch, "Neville points and abscissae differ in length");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw Error(ErrorKind::DegenerateGrid, "Neville abscissae must be strictly ascending");
    }
  }
  // Aitken ordering: nodes nearest to x enter first and every intermediate
  // interpolant contains them. In a flat chart this equals the classical
  // tableau; in curved geometry it avoids geodesic extrapolation from node
  // subsets far from x.
  const std::size_t n = points.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(xs[a] - x) < std::abs(xs[b] - x);
  });
  std::vector<Matrix> p;
  std::vector<double> u;
  p.reserve(n);
  u.reserve(n);
  for (std::size_t i : order) {
    p.push_back(points[i]);
    u.push_back(xs[i]);
  }
  // After stage s, p[i] (i >= s) interpolates nodes 0..s-1 and i.
  for (std::size_t s = 1; s < n; ++s) {
    for (std::size_t i = s; i < n; ++i) {
      const double t = (x - u[s - 1]) / (u[i] - u[s - 1]);
      p[i] = g.geodesic(p[s - 1], p[i], t);
    }
  }
  return p[n - 1];
}

// Left child of window[m]: interpolate the cumulative means at the middle of
// cell m, then extrapolate back over the m full cells to its left.
Matrix left_child(const Geometry& g, std::span<const Matrix> window, std::size_t m,
                  PredictionForm form) {
  std::vector<Matrix> cumulative;
  std::vector<double> xs;
  cumulative.reserve(window.size());
  for (std::size_t l = 0; l < window.size(); ++l) {
    if (l == 0) {
      cumulative.push_back(window[0]);
    } else if (l == 1) {
      cumulative.push_back(g.midpoint(window[0], window[1]));
    } else {
      const std::vector<double> uniform(l + 1, 1.0);
      cumulative.push_back(g.mean(window.subspan(0, l + 1), uniform, KarcherOptions{}));
    }
    xs.push_back(static_cast<double>(l + 1));
  }
  const Matrix at_half = neville_chart(g, cumulative, xs, static_cast<double>(m) + 0.5);
  const double t = -2.0 * static_cast<double>(m);
  if (form == PredictionForm::Appendix) {
    return m == 0 ? at_half : g.geodesic(at_half, cumulative[m - 1], t);
  }
  return g.geodesic(cumulative[m], at_half, t);
}

MidpointPrediction predict_neville(const Geometry& g, std::span<const Matrix> coarse,
                                   std::size_t k, int order, PredictionForm form) {
  const std::size_t c = coarse.size();
  if (order < 1) throw Error(ErrorKind::InvalidArgument, "refinement order must be positive");
  if (k >= c) throw Error(ErrorKind::InvalidArgument, "prediction location out of range");
  if (static_cast<std::size_t>(order) > c) {
    throw Error(ErrorKind::OrderTooLarge, "order " + std::to_string(order) + " needs " +
                                              std::to_string(order) + " midpoints, have " +
                                              std::to_string(c));
  }
  if (order == 1) return {coarse[k], coarse[k]};

  const auto n = static_cast<std::ptrdiff_t>(order);
  const auto start = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(k) - (n - 1) / 2, 0,
                                                static_cast<std::ptrdiff_t>(c) - n);
  const auto s = static_cast<std::size_t>(start);
  const auto window = coarse.subspan(s, static_cast<std::size_t>(order));
  const std::size_t m = k - s;

  Matrix even = left_child(g, window, m, form);
  Matrix odd = g.reflect(coarse[k], even);
  return {std::move(even), std::move(odd)};
}

MidpointPrediction predict_fast(const Geometry& g, std::span<const Matrix> coarse, std::size_t k,
                                int order) {
  const auto weights = refinement_weights(order);
  const std::size_t half = static_cast<std::size_t>(order - 1) / 2;
  if (k < half || k + half >= coarse.size()) {
    throw Error(ErrorKind::BoundaryLocation, "fast prediction needs a full symmetric stencil");
  }
  if (order == 1) return {coarse[k], coarse[k]};
  std::vector<double> odd_weights(static_cast<std::size_t>(order));
  for (std::size_t i = 0; i < odd_weights.size(); ++i) odd_weights[i] = weights[2 * i + 1];
  Matrix odd = g.mean(coarse.subspan(k - half, static_cast<std::size_t>(order)), odd_weights,
                      KarcherOptions{});
  Matrix even = g.reflect(coarse[k], odd);
  return {std::move(even), std::move(odd)};
}

// Weighted-mean prediction on the stencil used by the Neville path. Interior
// locations with a printed table use it verbatim.
MidpointPrediction predict_weighted(const Geometry& g, std::span<const Matrix> coarse,
                                    std::size_t k, int order) {
  if (order == 1) return {coarse[k], coarse[k]};
  const auto n = static_cast<std::ptrdiff_t>(order);
  const auto s = static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(k) - (n - 1) / 2, 0,
                                 static_cast<std::ptrdiff_t>(coarse.size()) - n));
  const std::size_t m = k - s;
  if (order % 2 == 1 && order <= 7 && 2 * m + 1 == static_cast<std::size_t>(order)) {
    return predict_fast(g, coarse, k, order);
  }
  const auto weights = average_interpolation_weights(order, m);
  Matrix odd = g.mean(coarse.subspan(s, static_cast<std::size_t>(order)), weights,
                      KarcherOptions{});
  Matrix even = g.reflect(coarse[k], odd);
  return {std::move(even), std::move(odd)};
}

MidpointPrediction predict_at(const Geometry& g, std::span<const Matrix> coarse, std::size_t k,
                              const TransformOptions& options) {
  const int order = effective_order(options.order, coarse.size());
  if (options.method == PredictionMethod::Fast && options.form == PredictionForm::Appendix) {
    // Where the weighted mean has no solution (signed weights over badly
    // conditioned midpoints), lower the order locally; order 1 always exists.
    for (int local = order; local >= 1; local -= 2) {
      try {
        return predict_weighted(g, coarse, k, local);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonConvergence && e.kind() != ErrorKind::DomainError) throw;
      }
    }
  }
  return predict_neville(g, coarse, k, order, options.form);
}

void check_options(const TransformOptions& options) {
  if (options.order < 1 || options.order % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "refinement order must be odd and positive");
  }
}

std::vector<Matrix> chart_of(const HpdCurve& curve, MetricKind metric) {
  if (curve.empty()) throw Error(ErrorKind::EmptyInput, "empty curve");
  std::vector<Matrix> out;
  out.reserve(curve.size());
  for (const auto& p : curve) {
    if (p.dim() != curve.front().dim()) {
      throw Error(ErrorKind::DimMismatch, "curve mixes matrix dimensions");
    }
    out.push_back(to_chart(metric, p.matrix()));
  }
  return out;
}

std::vector<std::vector<Matrix>> chart_pyramid(const Geometry& g, std::vector<Matrix> finest,
                                               int levels) {
  std::vector<std::vector<Matrix>> out(static_cast<std::size_t>(levels) + 1);
  out.back() = std::move(finest);
  for (int j = levels; j > 0; --j) {
    const auto& fine = out[static_cast<std::size_t>(j)];
    auto& coarse = out[static_cast<std::size_t>(j) - 1];
    coarse.resize(fine.size() / 2);
    parallel_for(
        coarse.size(), [&](std::size_t k) { coarse[k] = g.midpoint(fine[2 * k], fine[2 * k + 1]); },
        kParallelGrain);
  }
  return out;
}

HpdMatrix hpd_from_chart(MetricKind metric, const Matrix& c) {
  if (metric == MetricKind::Riemannian || metric == MetricKind::LogEuclidean) {
    return HpdMatrix::trusted(from_chart(metric, c));
  }
  return HpdMatrix(from_chart(metric, c));
}

}  // namespace

std::span<const double> refinement_weights(int order) {
  switch (order) {
    case 1: return kWeights1;
    case 3: return kWeights3;
    case 5: return kWeights5;
    case 7: return kWeights7;
    default:
      throw Error(ErrorKind::UnsupportedOrder,
                  "no closed-form weights for order " + std::to_string(order));
  }
}

std::vector<double> average_interpolation_weights(int order, std::size_t offset) {
  if (order < 1) throw Error(ErrorKind::InvalidArgument, "refinement order must be positive");
  if (offset >= static_cast<std::size_t>(order)) {
    throw Error(ErrorKind::InvalidArgument, "stencil offset outside the stencil");
  }
  // Cell i contributes the step function S_i(x) = [x > i] to the cumulative
  // sum; its interpolant through the nodes 0..order is the sum of the Lagrange
  // basis polynomials l_q, q > i. The weight is the interpolant's increment
  // over the right half of cell `offset`, divided by the half-cell length.
  const auto lagrange = [order](int q, double x) {
    double v = 1.0;
    for (int r = 0; r <= order; ++r) {
      if (r != q) v *= (x - r) / static_cast<double>(q - r);
    }
    return v;
  };
  const double lo = static_cast<double>(offset) + 0.5;
  const double hi = static_cast<double>(offset) + 1.0;
  std::vector<double> weights(static_cast<std::size_t>(order), 0.0);
  for (int i = 0; i < order; ++i) {
    double w = 0.0;
    for (int q = i + 1; q <= order; ++q) w += lagrange(q, hi) - lagrange(q, lo);
    weights[static_cast<std::size_t>(i)] = 2.0 * w;
  }
  return weights;
}

int effective_order(int order, std::size_t available) noexcept {
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(order), available));
}

MidpointPyramid build_pyramid(const HpdCurve& curve, MetricKind metric) {
  const int levels = dyadic_levels(curve.size());
  const auto& g = detail::geometry_for(metric);
  const auto chart = chart_pyramid(g, chart_of(curve, metric), levels);
  MidpointPyramid out;
  out.metric = metric;
  out.scales.resize(chart.size());
  for (std::size_t j = 0; j < chart.size(); ++j) {
    if (j + 1 == chart.size()) {
      out.scales[j] = curve;
      continue;
    }
    out.scales[j].reserve(chart[j].size());
    for (const auto& c : chart[j]) out.scales[j].push_back(hpd_from_chart(metric, c));
  }
  return out;
}

HpdMatrix neville(std::span<const HpdMatrix> points, std::span<const double> xs, double x,
                  MetricKind metric) {
  std::vector<Matrix> chart;
  chart.reserve(points.size());
  for (const auto& p : points) chart.push_back(to_chart(metric, p.matrix()));
  return hpd_from_chart(metric, neville_chart(detail::geometry_for(metric), chart, xs, x));
}

MidpointPrediction predict_midpoints(std::span<const Matrix> coarse, std::size_t k, int order,
                                     MetricKind metric, PredictionForm form) {
  if (order < 1 || order % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "refinement order must be odd and positive");
  }
  return predict_neville(detail::geometry_for(metric), coarse, k, order, form);
}

MidpointPrediction predict_midpoints_fast(std::span<const Matrix> coarse, std::size_t k, int order,
                                          MetricKind metric) {
  return predict_fast(detail::geometry_for(metric), coarse, k, order);
}

std::size_t WaveletDecomposition::coefficient_count() const noexcept {
  std::size_t total = 0;
  for (const auto& s : scales) total += s.size();
  return total;
}

WaveletDecomposition forward(const HpdCurve& curve, const TransformOptions& options) {
  check_options(options);
  const int levels = dyadic_levels(curve.size());
  const auto& g = detail::geometry_for(options.metric);
  const auto pyramid = chart_pyramid(g, chart_of(curve, options.metric), levels);

  WaveletDecomposition out;
  out.options = options;
  out.coarsest = pyramid[0][0];
  out.scales.resize(static_cast<std::size_t>(levels));
  for (int j = 1; j <= levels; ++j) {
    const auto& coarse = pyramid[static_cast<std::size_t>(j) - 1];
    const auto& fine = pyramid[static_cast<std::size_t>(j)];
    auto& coeffs = out.scales[static_cast<std::size_t>(j) - 1];
    coeffs.resize(coarse.size());
    const double scale = std::pow(2.0, -0.5 * j);
    parallel_for(
        coarse.size(),
        [&](std::size_t k) {
          auto pred = predict_at(g, coarse, k, options);
          coeffs[k].coeff = scale * g.log(pred.odd, fine[2 * k + 1]);
          coeffs[k].base = std::move(pred.odd);
        },
        kParallelGrain);
  }
  return out;
}

std::vector<Matrix> inverse_chart(const WaveletDecomposition& decomp) {
  check_options(decomp.options);
  const auto& g = detail::geometry_for(decomp.options.metric);
  std::vector<Matrix> current{decomp.coarsest};
  for (int j = 1; j <= decomp.levels(); ++j) {
    const auto& coeffs = decomp.scales[static_cast<std::size_t>(j) - 1];
    if (coeffs.size() != current.size()) {
      throw Error(ErrorKind::ShapeMismatch, "scale " + std::to_string(j) + " has " +
                                                std::to_string(coeffs.size()) + " coefficients");
    }
    std::vector<Matrix> next(2 * current.size());
    const double scale = std::pow(2.0, 0.5 * j);
    parallel_for(
        current.size(),
        [&](std::size_t k) {
          const auto pred = predict_at(g, current, k, decomp.options);
          Matrix odd = g.exp(pred.odd, scale * coeffs[k].coeff);
          next[2 * k] = g.reflect(current[k], odd);
          next[2 * k + 1] = std::move(odd);
        },
        kParallelGrain);
    current = std::move(next);
  }
  return current;
}

HpdCurve inverse(const WaveletDecomposition& decomp) {
  const auto chart = inverse_chart(decomp);
  HpdCurve out;
  out.reserve(chart.size());
  for (const auto& c : chart) out.push_back(hpd_from_chart(decomp.options.metric, c));
  return out;
}

std::vector<std::vector<Matrix>> whiten(const WaveletDecomposition& decomp) {
  const auto& g = detail::geometry_for(decomp.options.metric);
  std::vector<std::vector<Matrix>> out(decomp.scales.size());
  for (std::size_t j = 0; j < decomp.scales.size(); ++j) {
    out[j].reserve(decomp.scales[j].size());
    for (const auto& c : decomp.scales[j]) out[j].push_back(g.whiten(c.base, c.coeff));
  }
  return out;
}

}  // namespace hpdwave
