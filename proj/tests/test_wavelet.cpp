// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#include <doctest.h>

#include <array>
#include <cmath>
#include <numeric>

#include "hpdwave/error.hpp"
#include "hpdwave/wavelet.hpp"
#include "support.hpp"

using namespace hpdwave;
using testing::max_abs;

namespace {

constexpr std::array kMetrics = {MetricKind::Riemannian, MetricKind::LogEuclidean,
                                 MetricKind::Cholesky, MetricKind::Euclidean};

HpdMatrix scalar(double x) { return HpdMatrix::scalar(x); }

Matrix scalar_matrix(double x) { return Matrix::Constant(1, 1, x); }

double max_coefficient(const WaveletDecomposition& w, int from_scale = 1) {
  double worst = 0.0;
  const auto white = whiten(w);
  for (std::size_t j = static_cast<std::size_t>(from_scale); j <= white.size(); ++j)
    for (const auto& c : white[j - 1]) worst = std::max(worst, c.norm());
  return worst;
}

HpdCurve geodesic_curve(std::size_t n, const HpdMatrix& a, const HpdMatrix& b) {
  HpdCurve c;
  for (std::size_t l = 1; l <= n; ++l)
    c.push_back(geodesic(MetricKind::Riemannian, a, b, static_cast<double>(l) / n));
  return c;
}

}  // namespace

TEST_CASE("pyramid of a constant curve is constant") {
  std::mt19937_64 rng(41);
  const HpdMatrix p = testing::random_hpd(3, rng);
  for (auto m : kMetrics) {
    const auto pyr = build_pyramid(HpdCurve(16, p), m);
    CHECK(pyr.levels() == 4);
    for (const auto& scale : pyr.scales)
      for (const auto& q : scale) CHECK(max_abs(q.matrix() - p.matrix()) < 1e-12);
  }
}

TEST_CASE("pyramid of two scalars is their geometric mean") {
  const auto pyr = build_pyramid({scalar(1), scalar(4)}, MetricKind::Riemannian);
  CHECK(pyr.scales[0][0].matrix()(0, 0).real() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("pyramid satisfies the midpoint relation") {
  std::mt19937_64 rng(42);
  for (auto m : kMetrics) {
    const HpdCurve curve = testing::random_curve(4, 3, rng);
    const auto pyr = build_pyramid(curve, m);
    for (std::size_t i = 0; i < 4; ++i) CHECK(max_abs(pyr.scales[2][i].matrix() - curve[i].matrix()) == 0.0);
    for (int j = 1; j <= 2; ++j) {
      for (std::size_t k = 0; k < pyr.scales[j - 1].size(); ++k) {
        const auto mid = geodesic(m, pyr.scales[j][2 * k], pyr.scales[j][2 * k + 1], 0.5);
        CHECK(max_abs(mid.matrix() - pyr.scales[j - 1][k].matrix()) < 1e-10);
      }
    }
  }
  CHECK_THROWS_AS(build_pyramid(testing::random_curve(6, 2, rng), MetricKind::Riemannian), Error);
}

TEST_CASE("Neville interpolation examples") {
  std::mt19937_64 rng(43);
  const HpdMatrix a = testing::random_hpd(3, rng);
  const HpdMatrix b = testing::random_hpd(3, rng);
  const std::vector<HpdMatrix> one = {a};
  const std::vector<double> x1 = {0.3};
  CHECK(max_abs(neville(one, x1, 2.0).matrix() - a.matrix()) == 0.0);

  const std::vector<HpdMatrix> two = {a, b};
  const std::vector<double> x2 = {1.0, 3.0};
  CHECK(max_abs(neville(two, x2, 2.5).matrix() -
                geodesic(MetricKind::Riemannian, a, b, 0.75).matrix()) < 1e-12);

  const std::vector<double> x3 = {0.0, 0.5, 2.0};
  std::vector<HpdMatrix> three;
  for (double t : x3) three.push_back(geodesic(MetricKind::Riemannian, a, b, t / 2.0));
  for (double x : {-0.5, 0.25, 1.0, 3.0})
    CHECK(dist(MetricKind::Riemannian, neville(three, x3, x),
               geodesic(MetricKind::Riemannian, a, b, x / 2.0)) < 1e-8);

  const std::vector<double> bad = {0.0, 0.0, 1.0};
  CHECK_THROWS_AS(neville(three, bad, 0.5), Error);
}

TEST_CASE("Neville interpolation passes through its nodes") {
  std::mt19937_64 rng(44);
  for (auto m : kMetrics) {
    const HpdCurve pts = testing::random_curve(5, 2, rng, 0.3);
    const std::vector<double> xs = {0.0, 1.0, 2.0, 3.5, 4.0};
    for (std::size_t i = 0; i < pts.size(); ++i)
      CHECK(max_abs(neville(pts, xs, xs[i], m).matrix() - pts[i].matrix()) < 1e-10);
  }
}

TEST_CASE("Neville in a flat chart matches Lagrange interpolation") {
  // Scalars under the log-Euclidean metric: log of the result is the
  // Lagrange polynomial through the logs.
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> logs = {0.3, -0.2, 0.5, 0.1, -0.4};
  HpdCurve pts;
  for (double l : logs) pts.push_back(HpdMatrix::scalar(std::exp(l)));
  for (double x : {0.5, 2.5, 4.75, 6.0}) {
    double lagrange = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double w = 1.0;
      for (std::size_t j = 0; j < xs.size(); ++j)
        if (j != i) w *= (x - xs[j]) / (xs[i] - xs[j]);
      lagrange += w * logs[i];
    }
    CHECK(std::log(neville(pts, xs, x, MetricKind::LogEuclidean).matrix()(0, 0).real()) ==
          doctest::Approx(lagrange).epsilon(1e-12));
    CHECK(std::log(neville(pts, xs, x, MetricKind::Riemannian).matrix()(0, 0).real()) ==
          doctest::Approx(lagrange).epsilon(1e-12));
  }
}

TEST_CASE("order 9 Neville prediction at one-sided stencils stays finite") {
  std::mt19937_64 rng(47);
  std::vector<Matrix> coarse;
  for (int i = 0; i < 16; ++i) coarse.push_back(testing::random_hpd(2, rng, 0.1).matrix());
  for (std::size_t k : {std::size_t{0}, std::size_t{15}}) {
    const auto p = predict_midpoints(coarse, k, 9, MetricKind::Riemannian);
    CHECK(is_hpd(HermitianMatrix(p.odd), 1e-12));
    CHECK(is_hpd(HermitianMatrix(p.even), 1e-12));
  }
}

TEST_CASE("Haar prediction copies the coarse midpoint") {
  std::mt19937_64 rng(45);
  std::vector<Matrix> coarse;
  for (int i = 0; i < 4; ++i) coarse.push_back(testing::random_hpd(2, rng).matrix());
  for (std::size_t k = 0; k < 4; ++k) {
    const auto p = predict_midpoints(coarse, k, 1, MetricKind::Riemannian);
    CHECK(max_abs(p.even - coarse[k]) == 0.0);
    CHECK(max_abs(p.odd - coarse[k]) == 0.0);
    const auto f = predict_midpoints_fast(coarse, k, 1, MetricKind::Riemannian);
    CHECK(max_abs(f.odd - coarse[k]) == 0.0);
  }
}

TEST_CASE("constant coarse midpoints predict themselves") {
  std::mt19937_64 rng(46);
  const Matrix c = testing::random_hpd(3, rng).matrix();
  const std::vector<Matrix> coarse(8, c);
  for (int order : {1, 3, 5, 7}) {
    for (std::size_t k = 0; k < 8; ++k) {
      const auto p = predict_midpoints(coarse, k, order, MetricKind::Riemannian);
      CHECK(max_abs(p.even - c) < 1e-10);
      CHECK(max_abs(p.odd - c) < 1e-10);
    }
  }
}

TEST_CASE("order 3 prediction on log-linear scalars") {
  // Cell averages 1, 2, 3 of a linear function: the middle cell's halves average 1.75 and 2.25.
  const std::vector<Matrix> coarse = {scalar_matrix(std::exp(1.0)), scalar_matrix(std::exp(2.0)),
                                      scalar_matrix(std::exp(3.0))};
  const auto p = predict_midpoints(coarse, 1, 3, MetricKind::Riemannian);
  CHECK(std::log(p.even(0, 0).real()) == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(std::log(p.odd(0, 0).real()) == doctest::Approx(2.25).epsilon(1e-12));
  const auto f = predict_midpoints_fast(coarse, 1, 3, MetricKind::Riemannian);
  CHECK(std::log(f.odd(0, 0).real()) == doctest::Approx(2.25).epsilon(1e-12));
}

TEST_CASE("prediction preserves the midpoint relation") {
  std::mt19937_64 rng(47);
  std::vector<Matrix> coarse;
  for (int i = 0; i < 8; ++i) coarse.push_back(testing::random_hpd(2, rng, 0.3).matrix());
  for (int order : {3, 5, 7}) {
    for (std::size_t k = 0; k < 8; ++k) {
      const auto p = predict_midpoints(coarse, k, order, MetricKind::Riemannian);
      const auto mid = geodesic(MetricKind::Riemannian, HpdMatrix(p.even), HpdMatrix(p.odd), 0.5);
      CHECK(max_abs(mid.matrix() - coarse[k]) < 1e-10);
    }
  }
}

TEST_CASE("prediction order limits") {
  std::mt19937_64 rng(48);
  std::vector<Matrix> coarse;
  for (int i = 0; i < 3; ++i) coarse.push_back(testing::random_hpd(2, rng).matrix());
  CHECK_THROWS_AS(predict_midpoints(coarse, 1, 5, MetricKind::Riemannian), Error);
  CHECK_THROWS_AS(predict_midpoints(coarse, 1, 2, MetricKind::Riemannian), Error);
  CHECK_THROWS_AS(predict_midpoints_fast(coarse, 0, 3, MetricKind::Riemannian), Error);
  CHECK_THROWS_AS(predict_midpoints_fast(coarse, 1, 9, MetricKind::Riemannian), Error);
  CHECK(effective_order(5, 2) == 2);
  CHECK(effective_order(5, 64) == 5);
}

TEST_CASE("refinement weight tables") {
  for (int order : {1, 3, 5, 7}) {
    const auto w = refinement_weights(order);
    CHECK(w.size() == static_cast<std::size_t>(2 * order));
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == 2.0);
    double odd = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      // Mirror symmetry between the even and odd children.
      CHECK(w[i] == w[w.size() - 1 - i]);
      if (i % 2 == 1) odd += w[i];
    }
    CHECK(odd == 1.0);
    // Interior average-interpolation weights reproduce the printed table.
    const auto ai = average_interpolation_weights(order, static_cast<std::size_t>(order - 1) / 2);
    for (int i = 0; i < order; ++i) CHECK(ai[i] == doctest::Approx(w[2 * i + 1]).epsilon(1e-14));
  }
  const auto c5 = refinement_weights(5);
  CHECK(c5[0] * 128 == -3.0);
  CHECK(c5[2] * 128 == 22.0);
  CHECK(c5[4] * 128 == 128.0);
  CHECK_THROWS_AS(refinement_weights(9), Error);
}

TEST_CASE("boundary average-interpolation weights reproduce polynomials") {
  for (int order : {2, 3, 5, 7, 9}) {
    for (std::size_t offset = 0; offset < static_cast<std::size_t>(order); ++offset) {
      const auto w = average_interpolation_weights(order, offset);
      CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
      // Cell averages of x^2 on [i, i+1] are i^2 + i + 1/3.
      if (order < 3) continue;
      double pred = 0.0;
      for (int i = 0; i < order; ++i) pred += w[i] * (i * i + i + 1.0 / 3.0);
      const double lo = offset + 0.5;
      const double hi = offset + 1.0;
      const double exact = (hi * hi * hi - lo * lo * lo) / 3.0 / (hi - lo);
      CHECK(pred == doctest::Approx(exact).epsilon(1e-10));
    }
  }
}

TEST_CASE("two-point forward transform by hand") {
  const HpdCurve curve = {scalar(1), scalar(4)};
  const auto w = forward(curve, {.order = 1});
  CHECK(w.levels() == 1);
  CHECK(w.coarsest(0, 0).real() == doctest::Approx(2.0).epsilon(1e-14));
  // D = 2^{-1/2} Log_2(4) = sqrt(2) ln 2; whitened by 2^{-1}: ln 2 / sqrt(2).
  CHECK(w.at(1, 0).coeff(0, 0).real() == doctest::Approx(std::sqrt(2.0) * std::log(2.0)).epsilon(1e-14));
  CHECK(whiten(w)[0][0](0, 0).real() == doctest::Approx(std::log(2.0) / std::sqrt(2.0)).epsilon(1e-14));
  const auto back = inverse(w);
  CHECK(back[0].matrix()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(back[1].matrix()(0, 0).real() == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("forward transform shape") {
  std::mt19937_64 rng(49);
  const auto w = forward(testing::random_curve(32, 2, rng), {.order = 3});
  CHECK(w.levels() == 5);
  CHECK(w.coefficient_count() == 31);
  for (int j = 1; j <= 5; ++j) CHECK(w.scales[j - 1].size() == (std::size_t{1} << (j - 1)));
  CHECK_THROWS_AS(forward(testing::random_curve(8, 2, rng), {.order = 4}), Error);
  CHECK_THROWS_AS(forward(HpdCurve{}, {}), Error);
}

TEST_CASE("constant and geodesic curves give vanishing coefficients") {
  std::mt19937_64 rng(50);
  const HpdMatrix a = testing::random_hpd(3, rng);
  const HpdMatrix b = testing::random_hpd(3, rng);
  for (int order : {1, 3, 5, 7}) {
    CHECK(max_coefficient(forward(HpdCurve(64, a), {.order = order})) < 1e-10);
    // Scale 1 predicts from the single coarsest midpoint, so only order 1 is
    // available there and a geodesic leaves a nonzero coefficient.
    if (order >= 3) {
      const auto w = forward(geodesic_curve(64, a, b), {.order = order});
      CHECK(max_coefficient(w, 2) < 1e-7);
      CHECK(max_coefficient(w) > 0.1);
    }
  }
}

TEST_CASE("round trip on random curves for every metric and method") {
  std::mt19937_64 rng(51);
  for (auto m : kMetrics) {
    for (int order : {1, 3, 5, 7, 9}) {
      for (auto method : {PredictionMethod::Fast, PredictionMethod::Neville}) {
        // High-order Neville extrapolation on i.i.d. input produces badly
        // conditioned predictions, so those cases get smooth input.
        const bool smooth = method == PredictionMethod::Neville && order >= 7;
        const HpdCurve curve = smooth ? testing::smooth_curve(32, 2, rng) : testing::random_curve(32, 2, rng);
        const auto w = forward(curve, {.order = order, .metric = m, .method = method});
        CHECK(testing::max_curve_dist(inverse(w), curve) < 1e-8);
      }
    }
  }
  const HpdCurve curve = testing::random_curve(64, 3, rng);
  CHECK(testing::max_curve_dist(inverse(forward(curve, {.order = 5})), curve) < 1e-8);
}

TEST_CASE("main-text prediction form round trips too") {
  std::mt19937_64 rng(52);
  const HpdCurve curve = testing::random_curve(32, 2, rng);
  const auto w = forward(curve, {.order = 5, .method = PredictionMethod::Neville,
                                 .form = PredictionForm::MainText});
  CHECK(testing::max_curve_dist(inverse(w), curve) < 1e-8);
}

TEST_CASE("zero coefficients reconstruct by prediction alone") {
  std::mt19937_64 rng(53);
  auto w = forward(testing::random_curve(16, 2, rng), {.order = 3});
  for (auto& s : w.scales)
    for (auto& c : s) c.coeff.setZero();
  const auto back = inverse(w);
  // The result is its own prediction: a second pass finds zero detail.
  CHECK(max_coefficient(forward(back, {.order = 3})) < 1e-8);
  CHECK(max_abs(build_pyramid(back, MetricKind::Riemannian).scales[0][0].matrix() - w.coarsest) < 1e-10);
}

TEST_CASE("whitening preserves the coefficient norm") {
  std::mt19937_64 rng(54);
  const auto w = forward(testing::random_curve(16, 3, rng), {.order = 3});
  const auto wh = whiten(w);
  for (int j = 1; j <= w.levels(); ++j) {
    for (std::size_t k = 0; k < w.scales[j - 1].size(); ++k) {
      const auto& c = w.at(j, k);
      const double metric_norm = riemannian_norm(HpdMatrix(c.base), HermitianMatrix(c.coeff));
      CHECK(wh[j - 1][k].norm() == doctest::Approx(metric_norm).epsilon(1e-10));
    }
  }
  // Identity base point leaves the coefficient unchanged.
  WaveletDecomposition id;
  id.coarsest = Matrix::Identity(2, 2);
  id.scales = {{{testing::random_hermitian(2, rng).matrix(), Matrix::Identity(2, 2)}}};
  CHECK(max_abs(whiten(id)[0][0] - id.scales[0][0].coeff) < 1e-14);
}

TEST_CASE("coefficients transform by congruence") {
  std::mt19937_64 rng(55);
  const HpdCurve curve = testing::random_curve(32, 2, rng);
  const Matrix a = testing::random_invertible(2, rng);
  const auto w = forward(curve, {.order = 5});
  const auto wa = forward(testing::congruence_curve(a, curve), {.order = 5});
  for (int j = 1; j <= w.levels(); ++j) {
    for (std::size_t k = 0; k < w.scales[j - 1].size(); ++k) {
      CHECK(max_abs(wa.at(j, k).coeff - congruence(a, w.at(j, k).coeff)) < 1e-8);
    }
  }
}
