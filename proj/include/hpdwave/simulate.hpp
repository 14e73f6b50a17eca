// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hpdwave/spectral.hpp"

namespace hpdwave {

/// Per-replicate generator: mt19937_64 seeded from (seed, stream) through
/// std::seed_seq, so stream k is independent of which thread draws it.
using Rng = std::mt19937_64;
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

enum class SpectrumShape { Bumps, PeaksAndTroughs, Smooth };

/// "bumps", "peaks" (or "peaks_and_troughs"), "smooth".
SpectrumShape parse_spectrum_shape(std::string_view name);
std::string_view to_string(SpectrumShape shape);

enum class ProfileKind { Gaussian, Kink };

/// Scalar profile on x in (0, 1]. Gaussian: height * exp(-(x-center)^2 / (2 width^2)).
/// Kink: height * max(0, 1 - (|x-center| / width)^alpha), a cusp for alpha < 1.
struct Bump {
  ProfileKind profile = ProfileKind::Gaussian;
  double center = 0.5;
  double width = 0.1;
  double height = 1.0;  ///< negative heights carve troughs
  double alpha = 0.5;
  int direction = 0;    ///< selects the rank-one direction E_m
};

/// f(x) = exp(tau(x)) U(x)^* (sum_m g_m(x) E_m + base_level Id) U(x) at
/// x_l = l/n, l = 1..n, with tau(x) = tilt cos(pi x), U(x) = exp(i x rotation K)
/// for a fixed unit-norm Hermitian K, and E_m = v v^* for fixed unit vectors v.
struct TestSpectrumSpec {
  SpectrumShape shape = SpectrumShape::Bumps;
  std::size_t n = 512;
  Index d = 2;
  std::vector<Bump> bumps;
  double base_level = 1.0;
  double tilt = 0.5;
  double rotation = 2.0;
};

/// Preset construction parameters for a shape.
TestSpectrumSpec preset_spectrum(SpectrumShape shape, std::size_t n, Index d);

/// Smallest eigenvalue allowed anywhere on a test spectrum.
inline constexpr double kSpectrumFloor = 0.1;

/// Throws InvalidSpec if n or d is invalid or the floor is violated.
HpdCurve make_test_spectrum(const TestSpectrumSpec& spec);

/// Standard complex normal vector: (g1 + i g2)/sqrt(2) entrywise.
Eigen::VectorXcd complex_normal(Index d, Rng& rng);

/// f^{1/2} ((1/B) sum_b z_b z_b^*) f^{1/2}. HPD almost surely when B >= d; for
/// B < d the result is singular and callers validate with is_hpd.
HermitianMatrix sample_wishart(Index d, int B, const HpdMatrix& f, Rng& rng);

/// Real series of length T = 2n whose spectrum on omega_l = pi l / n is
/// `spectrum[l-1]`, through the Cramer representation with complex normal
/// amplitudes. The frequency-zero term reuses Re f(omega_1).
TimeSeries cramer_timeseries(const HpdCurve& spectrum, Index T, Rng& rng);

/// (1/n) sum_l dist_R(estimate_l, truth_l)^2.
double isre(const HpdCurve& estimate, const HpdCurve& truth);

/// Intrinsic k-nearest-neighbour smoother; windows shrink symmetrically at the
/// ends.
HpdCurve nn_regression(const HpdCurve& curve, int k, MetricKind metric = MetricKind::Riemannian);

struct BenchmarkConfig {
  TestSpectrumSpec spectrum;  ///< n is taken from T/2
  Index T = 1024;
  int replicates = 10;
  std::uint64_t seed = 1;
  int B = 0;  ///< 0 means d
  int order = 5;
  MetricKind metric = MetricKind::Riemannian;
  double nw = 0.0;
  TaperKind taper = TaperKind::Dpss;
  /// Any of "raw", "wavelet-universal", "wavelet-cv", "wavelet-cpress", "nn".
  std::vector<std::string> estimators = {"raw", "wavelet-universal", "nn"};
  std::vector<int> nn_k = {5, 9, 17};
  double cpress_lambda = 1.0;
};

struct BenchmarkRow {
  int replicate = 0;
  std::string estimator;
  std::string params;
  double isre = 0.0;  ///< NaN if the replicate failed for this estimator
};

struct BenchmarkSummary {
  std::string estimator;
  std::string params;
  int runs = 0;
  int failures = 0;
  double mean = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

/// Rows ordered by replicate, then estimator in configuration order.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config);

/// One summary per (estimator, params), in first-appearance order. Failed runs
/// are counted and excluded from the statistics.
std::vector<BenchmarkSummary> summarize(const std::vector<BenchmarkRow>& rows);

/// "replicate,estimator,params,ISRE" with RFC 4180 quoting and shortest
/// round-trip decimals.
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);

}  // namespace hpdwave
