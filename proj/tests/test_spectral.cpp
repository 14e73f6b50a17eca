// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#include <doctest.h>

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hpdwave/error.hpp"
#include "hpdwave/simulate.hpp"
#include "hpdwave/spectral.hpp"
#include "support.hpp"

using namespace hpdwave;
using testing::max_abs;

namespace {

TimeSeries white_noise(Index d, Index T, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  TimeSeries ts;
  ts.data.resize(d, T);
  for (Index i = 0; i < d; ++i)
    for (Index t = 0; t < T; ++t) ts.data(i, t) = g(rng);
  return ts;
}

Eigen::MatrixXd permutation(Index d, std::mt19937_64& rng) {
  std::vector<Index> p(static_cast<std::size_t>(d));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (Index i = 0; i < d; ++i) out(i, p[static_cast<std::size_t>(i)]) = 1.0;
  return out;
}

}  // namespace

TEST_CASE("DPSS tapers are orthonormal with decreasing concentration") {
  const auto tapers = dpss_tapers(256, 4.0 / 256, 3);
  CHECK(tapers.count() == 3);
  CHECK(tapers.length() == 256);
  const Eigen::MatrixXd gram = tapers.tapers.transpose() * tapers.tapers;
  CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
  for (Index i = 1; i < 3; ++i) CHECK(tapers.eigenvalues(i) < tapers.eigenvalues(i - 1));
  for (int b = 0; b < 3; ++b) CHECK(tapers.tapers(0, b) > 0.0);
  // Leading concentration of a well-resolved taper is close to one.
  CHECK(tapers.eigenvalues(0) > 0.999);
}

TEST_CASE("the first DPSS taper is positive and unimodal") {
  for (auto [T, W] : {std::pair<Index, double>{64, 0.05}, {257, 0.01}, {1024, 3.0 / 1024}}) {
    const auto h = dpss_tapers(T, W, 1).tapers.col(0);
    const Index peak = (T - 1) / 2;
    for (Index t = 0; t < T; ++t) CHECK(h(t) > 0.0);
    for (Index t = 1; t <= peak; ++t) CHECK(h(t) >= h(t - 1));
    for (Index t = peak + 1; t < T; ++t) CHECK(h(t) <= h(t - 1) + 1e-15);
    CHECK(h(peak) == doctest::Approx(h(T - 1 - peak)).epsilon(1e-10));
  }
}

TEST_CASE("DPSS argument checks") {
  CHECK_THROWS_AS(dpss_tapers(64, 1.0 / 64, 3), Error);
  CHECK_THROWS_AS(dpss_tapers(64, 0.6, 1), Error);
  CHECK_THROWS_AS(dpss_tapers(64, 0.1, 0), Error);
}

TEST_CASE("sine tapers are orthonormal") {
  const auto tapers = sine_tapers(100, 5);
  const Eigen::MatrixXd gram = tapers.tapers.transpose() * tapers.tapers;
  CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(tapers.eigenvalues.size() == 0);
}

TEST_CASE("Fourier frequencies") {
  const auto w = fourier_frequencies(16);
  REQUIRE(w.size() == 8);
  CHECK(w.front() == doctest::Approx(2 * std::numbers::pi / 16));
  CHECK(w.back() == doctest::Approx(std::numbers::pi));
}

TEST_CASE("white noise periodogram level is 1/(2 pi)") {
  std::mt19937_64 rng(81);
  const auto ts = white_noise(1, 4096, rng);
  const auto I = multitaper_periodogram(ts, dpss_tapers(4096, 4.0 / 4096, 5));
  double mean = 0.0;
  for (const auto& p : I) mean += p.matrix()(0, 0).real();
  mean /= static_cast<double>(I.size());
  CHECK(mean == doctest::Approx(1.0 / (2 * std::numbers::pi)).epsilon(0.1));
}

TEST_CASE("periodogram commutes with channel permutations exactly") {
  std::mt19937_64 rng(82);
  const auto ts = white_noise(3, 128, rng);
  const auto tapers = dpss_tapers(128, 2.5 / 128, 4);
  const Eigen::MatrixXd P = permutation(3, rng);
  TimeSeries moved{P * ts.data};
  const auto I = multitaper_periodogram(ts, tapers);
  const auto Ip = multitaper_periodogram(moved, tapers);
  const Matrix Pc = P.cast<Complex>();
  for (std::size_t l = 0; l < I.size(); ++l) CHECK(max_abs(Ip[l].matrix() - Pc * I[l].matrix() * Pc.transpose()) == 0.0);
}

TEST_CASE("periodogram errors") {
  std::mt19937_64 rng(83);
  const auto tapers = dpss_tapers(64, 2.0 / 64, 2);
  TimeSeries zero{Eigen::MatrixXd::Zero(2, 64)};
  CHECK_THROWS_AS(multitaper_periodogram(zero, tapers), Error);
  CHECK_THROWS_AS(multitaper_periodogram(white_noise(3, 64, rng), tapers), Error);
  CHECK_THROWS_AS(multitaper_periodogram(white_noise(2, 32, rng), tapers), Error);
  const auto t48 = dpss_tapers(48, 2.0 / 48, 2);
  CHECK_THROWS_AS(multitaper_periodogram(white_noise(2, 48, rng), t48), Error);
}

TEST_CASE("bias constants") {
  const double gamma = 0.57721566490153286;
  CHECK(std::exp(-bias_constant(1, 1)) == doctest::Approx(1.7810724180).epsilon(1e-10));
  CHECK(bias_constant(1, 1) == doctest::Approx(-gamma).epsilon(1e-14));
  // Digamma series: psi(1) = -gamma, psi(2) = 1 - gamma.
  CHECK(bias_constant(2, 2) == doctest::Approx(-std::log(2.0) + (0.5 - gamma)).epsilon(1e-14));
  CHECK(bias_constant(2, 2) == doctest::Approx(-0.770363).epsilon(1e-6));
  CHECK(std::abs(bias_constant(1, 1000000)) < 1e-5);
  CHECK(bias_constant(3, 3) == doctest::Approx(-std::log(3.0) + (boost::math::digamma(1.0) + boost::math::digamma(2.0) +
                                                                  boost::math::digamma(3.0)) / 3.0));
}

TEST_CASE("bias correction is a positive scalar multiple") {
  std::mt19937_64 rng(84);
  const HpdCurve curve = testing::random_curve(8, 3, rng);
  const auto out = bias_correct(curve, 3, 4, MetricKind::Riemannian);
  const double s = std::exp(-bias_constant(3, 4));
  CHECK(s > 1.0);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(max_abs(out[i].matrix() - s * curve[i].matrix()) < 1e-13);
    const auto e0 = eig_hermitian(curve[i].matrix());
    const auto e1 = eig_hermitian(out[i].matrix());
    for (Index c = 0; c < 3; ++c)
      CHECK(std::abs(e0.vectors.col(c).dot(e1.vectors.col(c))) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK_NOTHROW(bias_correct(curve, 3, 4, MetricKind::LogEuclidean));
  CHECK_THROWS_AS(bias_correct(curve, 3, 4, MetricKind::Cholesky), Error);
  CHECK_THROWS_AS(bias_correct(curve, 3, 4, MetricKind::Euclidean), Error);
}

TEST_CASE("threshold policies parse and print") {
  CHECK(parse_policy("universal").kind == PolicyKind::Universal);
  const auto c = parse_policy("cpress:0.25");
  CHECK(c.kind == PolicyKind::Cpress);
  CHECK(c.lambda == 0.25);
  const auto cv = parse_policy("cv:0,0.5,1");
  CHECK(cv.kind == PolicyKind::CrossValidation);
  CHECK(cv.grid == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(parse_policy("cv").grid.empty());
  for (const char* s : {"universal", "cpress:0.25", "cv", "cv:0,0.5,1"}) CHECK(parse_policy(to_string(parse_policy(s))).kind == parse_policy(s).kind);
  CHECK_THROWS_AS(parse_policy("soft"), Error);
  CHECK_THROWS_AS(parse_policy("cpress:-1"), Error);
  CHECK_THROWS_AS(parse_policy("cpress:abc"), Error);
}

TEST_CASE("noiseless curve through the denoiser at zero threshold is unchanged") {
  std::mt19937_64 rng(85);
  const HpdCurve curve = testing::smooth_curve(64, 3, rng);
  EstimateOptions opts;
  opts.policy = ThresholdPolicy::cpress(0.0);
  const auto out = denoise_curve(curve, opts, 3);
  CHECK(testing::max_curve_dist(out.estimate, curve) < 1e-8);
}

TEST_CASE("denoiser is unitary and general-linear equivariant") {
  std::mt19937_64 rng(86);
  const HpdCurve truth = testing::smooth_curve(64, 2, rng);
  HpdCurve noisy;
  for (const auto& f : truth) noisy.push_back(HpdMatrix(sample_wishart(2, 2, f, rng)));
  EstimateOptions opts;
  const auto base = denoise_curve(noisy, opts, 2);
  for (int rep = 0; rep < 3; ++rep) {
    for (const Matrix& a : {testing::random_unitary(2, rng), testing::random_invertible(2, rng)}) {
      const auto moved = denoise_curve(testing::congruence_curve(a, noisy), opts, 2);
      CHECK(moved.labels.scales == base.labels.scales);
      for (std::size_t i = 0; i < truth.size(); ++i)
        CHECK(max_abs(moved.estimate[i].matrix() - congruence(a, base.estimate[i].matrix())) < 1e-8);
    }
  }
}

TEST_CASE("estimate_spectrum commutes with orthogonal channel mixing") {
  auto r = make_rng(87);
  const HpdCurve f = make_test_spectrum(preset_spectrum(SpectrumShape::Smooth, 64, 2));
  const TimeSeries ts = cramer_timeseries(f, 128, r);
  const double angle = 0.7;
  Eigen::MatrixXd Q(2, 2);
  Q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  EstimateOptions opts;
  opts.B = 3;
  const auto base = estimate_spectrum(ts, opts);
  const auto moved = estimate_spectrum(TimeSeries{Q * ts.data}, opts);
  const Matrix A = Q.transpose().cast<Complex>();
  CHECK(base.curve.size() == 64);
  CHECK(base.frequencies.size() == 64);
  for (std::size_t i = 0; i < base.curve.size(); ++i)
    CHECK(max_abs(moved.curve[i].matrix() - congruence(A, base.curve[i].matrix())) < 1e-8);
}

TEST_CASE("estimate_spectrum outputs are positive definite") {
  for (int rep = 0; rep < 8; ++rep) {
    auto rng = make_rng(88, rep);
    const auto shape = rep % 2 ? SpectrumShape::Bumps : SpectrumShape::PeaksAndTroughs;
    const HpdCurve f = make_test_spectrum(preset_spectrum(shape, 64, 2));
    EstimateOptions opts;
    opts.order = rep % 3 == 0 ? 3 : 5;
    opts.policy = rep % 4 == 3 ? ThresholdPolicy::cross_validation() : ThresholdPolicy::universal();
    const auto est = estimate_spectrum(cramer_timeseries(f, 128, rng), opts);
    for (const auto& p : est.curve) CHECK(eig_hermitian(p.matrix()).values(0) > 0.0);
  }
}

TEST_CASE("estimate_spectrum argument checks") {
  std::mt19937_64 rng(89);
  const auto ts = white_noise(3, 128, rng);
  EstimateOptions opts;
  opts.B = 2;
  CHECK_THROWS_AS(estimate_spectrum(ts, opts), Error);
  opts.B = 3;
  opts.metric = MetricKind::Cholesky;
  CHECK_THROWS_AS(estimate_spectrum(ts, opts), Error);
  opts.bias_correction = false;
  CHECK_NOTHROW(estimate_spectrum(ts, opts));
  CHECK(resolve_tapers(EstimateOptions{}, 4) == 4);
}
