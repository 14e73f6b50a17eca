// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#include "hpdwave/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <unsupported/Eigen/FFT>

#include "hpdwave/parallel.hpp"

namespace hpdwave {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

SpectrumShape parse_spectrum_shape(std::string_view name) {
  if (name == "bumps") return SpectrumShape::Bumps;
  if (name == "peaks" || name == "peaks_and_troughs") return SpectrumShape::PeaksAndTroughs;
  if (name == "smooth") return SpectrumShape::Smooth;
  throw Error(ErrorKind::InvalidSpec,
              "unknown spectrum '" + std::string(name) + "' (bumps, peaks, smooth)");
}

std::string_view to_string(SpectrumShape shape) {
  switch (shape) {
    case SpectrumShape::Bumps: return "bumps";
    case SpectrumShape::PeaksAndTroughs: return "peaks_and_troughs";
    case SpectrumShape::Smooth: return "smooth";
  }
  return "unknown";
}

TestSpectrumSpec preset_spectrum(SpectrumShape shape, std::size_t n, Index d) {
  TestSpectrumSpec spec;
  spec.shape = shape;
  spec.n = n;
  spec.d = d;
  using P = ProfileKind;
  switch (shape) {
    case SpectrumShape::Bumps:
      spec.base_level = 1.0;
      spec.tilt = 0.5;
      spec.rotation = 2.0;
      spec.bumps = {
          {P::Gaussian, 0.12, 0.025, 8.0, 0.0, 0},
          {P::Kink, 0.33, 0.08, 6.0, 0.5, 1},
          {P::Gaussian, 0.52, 0.012, 10.0, 0.0, 2},
          {P::Kink, 0.71, 0.05, 7.0, 0.3, 0},
          {P::Gaussian, 0.88, 0.08, 3.0, 0.0, 1},
      };
      break;
    case SpectrumShape::PeaksAndTroughs:
      spec.base_level = 2.0;
      spec.tilt = 0.3;
      spec.rotation = 1.5;
      spec.bumps = {
          {P::Gaussian, 0.15, 0.03, 6.0, 0.0, 0},
          {P::Kink, 0.3, 0.06, -1.6, 0.6, 1},
          {P::Gaussian, 0.5, 0.02, 8.0, 0.0, 2},
          {P::Gaussian, 0.65, 0.04, -1.5, 0.0, 0},
          {P::Kink, 0.85, 0.05, 5.0, 0.4, 1},
      };
      break;
    case SpectrumShape::Smooth:
      spec.base_level = 1.0;
      spec.tilt = 0.4;
      spec.rotation = 1.0;
      spec.bumps = {{P::Gaussian, 0.4, 0.25, 2.0, 0.0, 0}};
      break;
  }
  return spec;
}

namespace {

double profile_value(const Bump& b, double x) {
  const double u = std::abs(x - b.center) / b.width;
  if (b.profile == ProfileKind::Gaussian) return b.height * std::exp(-0.5 * u * u);
  return u >= 1.0 ? 0.0 : b.height * (1.0 - std::pow(u, b.alpha));
}

Eigen::VectorXcd bump_direction(Index d, int m) {
  Eigen::VectorXcd v(d);
  for (Index k = 0; k < d; ++k) {
    const double mag = 1.0 + 0.6 * std::cos(1.3 * (m + 1) * static_cast<double>(k + 1));
    v(k) = std::polar(mag, 0.9 * (m + 1) * static_cast<double>(k));
  }
  return v.normalized();
}

Matrix rotation_generator(Index d) {
  Matrix k(d, d);
  for (Index r = 0; r < d; ++r) {
    k(r, r) = std::cos(0.9 * static_cast<double>(r + 1));
    for (Index c = r + 1; c < d; ++c) {
      k(r, c) = Complex(std::cos(1.1 * static_cast<double>((r + 1) * (c + 2))),
                        std::sin(0.7 * static_cast<double>((r + 2) * (c + 1))));
      k(c, r) = std::conj(k(r, c));
    }
  }
  return k / k.norm();
}

}  // namespace

HpdCurve make_test_spectrum(const TestSpectrumSpec& spec) {
  if (spec.n < 1 || spec.d < 1) throw Error(ErrorKind::InvalidSpec, "test spectrum needs n >= 1 and d >= 1");
  if (!(spec.base_level > 0.0) || !std::isfinite(spec.tilt) || !std::isfinite(spec.rotation)) {
    throw Error(ErrorKind::InvalidSpec, "base level must be positive and parameters finite");
  }
  for (const auto& b : spec.bumps) {
    if (!(b.width > 0.0) || !std::isfinite(b.height) || !std::isfinite(b.center) ||
        (b.profile == ProfileKind::Kink && !(b.alpha > 0.0)) || b.direction < 0) {
      throw Error(ErrorKind::InvalidSpec, "bump needs positive width and alpha, finite height");
    }
  }
  const Index d = spec.d;
  std::vector<Matrix> directions;
  for (const auto& b : spec.bumps) {
    const auto v = bump_direction(d, b.direction);
    directions.push_back(v * v.adjoint());
  }
  const auto gen = eig_hermitian(rotation_generator(d));

  HpdCurve out;
  out.reserve(spec.n);
  for (std::size_t l = 1; l <= spec.n; ++l) {
    const double x = static_cast<double>(l) / static_cast<double>(spec.n);
    Matrix core = spec.base_level * Matrix::Identity(d, d);
    for (std::size_t m = 0; m < spec.bumps.size(); ++m) core += profile_value(spec.bumps[m], x) * directions[m];
    Eigen::VectorXcd phases(d);
    for (Index i = 0; i < d; ++i) phases(i) = std::polar(1.0, x * spec.rotation * gen.values(i));
    const Matrix u = gen.vectors * phases.asDiagonal() * gen.vectors.adjoint();
    const Matrix f = std::exp(spec.tilt * std::cos(std::numbers::pi * x)) * congruence(u, core);
    const double lowest = eig_hermitian(f).values(0);
    if (!(lowest >= kSpectrumFloor)) {
      throw Error(ErrorKind::InvalidSpec, "test spectrum has eigenvalue " + std::to_string(lowest) +
                                              " below the floor " + std::to_string(kSpectrumFloor) +
                                              " at x = " + std::to_string(x));
    }
    out.push_back(HpdMatrix::trusted(hermitian_part(f)));
  }
  return out;
}

Eigen::VectorXcd complex_normal(Index d, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd z(d);
  for (Index i = 0; i < d; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    z(i) = Complex(re, im) * (1.0 / std::numbers::sqrt2);
  }
  return z;
}

HermitianMatrix sample_wishart(Index d, int B, const HpdMatrix& f, Rng& rng) {
  if (B < 1) throw Error(ErrorKind::InvalidArgument, "Wishart sampling needs B >= 1");
  if (f.dim() != d) throw Error(ErrorKind::DimMismatch, "scale matrix dimension differs from d");
  Matrix s = Matrix::Zero(d, d);
  for (int b = 0; b < B; ++b) {
    const auto z = complex_normal(d, rng);
    s.noalias() += z * z.adjoint();
  }
  s /= static_cast<double>(B);
  return HermitianMatrix(congruence(mfn::sqrt(f.matrix()), s));
}

TimeSeries cramer_timeseries(const HpdCurve& spectrum, Index T, Rng& rng) {
  const auto n = static_cast<Index>(spectrum.size());
  if (n < 1) throw Error(ErrorKind::EmptyInput, "empty spectrum");
  if (T != 2 * n) {
    throw Error(ErrorKind::LengthMismatch, "series length " + std::to_string(T) +
                                               " must be twice the spectrum length " + std::to_string(n));
  }
  const Index d = spectrum.front().dim();
  std::normal_distribution<double> normal;
  const auto real_amplitude = [&](const HpdMatrix& f) {
    const Eigen::MatrixXd root = mfn::sqrt(Matrix(f.matrix().real().cast<Complex>())).real();
    Eigen::VectorXd g(d);
    for (Index i = 0; i < d; ++i) g(i) = normal(rng);
    return Eigen::VectorXcd((root * g).cast<Complex>());
  };

  // Full DFT-domain vector per channel: Y_0, Y_1..Y_{n-1}, Y_n, conjugates above n.
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(d, T);
  for (const auto& f : spectrum) {
    if (f.dim() != d) throw Error(ErrorKind::DimMismatch, "spectrum dimensions differ");
  }
  y.col(0) = real_amplitude(spectrum.front());
  for (Index l = 1; l < n; ++l) {
    y.col(l) = mfn::sqrt(spectrum[static_cast<std::size_t>(l) - 1].matrix()) * complex_normal(d, rng);
    y.col(T - l) = y.col(l).conjugate();
  }
  y.col(n) = real_amplitude(spectrum.back());

  TimeSeries ts;
  ts.data.resize(d, T);
  const double scale = std::sqrt(2.0 * std::numbers::pi / static_cast<double>(T)) * static_cast<double>(T);
  Eigen::FFT<double> fft;
  for (Index c = 0; c < d; ++c) {
    std::vector<Complex> in(static_cast<std::size_t>(T));
    for (Index k = 0; k < T; ++k) in[static_cast<std::size_t>(k)] = y(c, k);
    std::vector<Complex> out;
    fft.inv(out, in);
    for (Index t = 0; t < T; ++t) ts.data(c, t) = scale * out[static_cast<std::size_t>(t)].real();
  }
  return ts;
}

double isre(const HpdCurve& estimate, const HpdCurve& truth) {
  if (estimate.size() != truth.size() || estimate.empty()) {
    throw Error(ErrorKind::ShapeMismatch, "ISRE needs curves of equal nonzero length, got " +
                                              std::to_string(estimate.size()) + " and " +
                                              std::to_string(truth.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (estimate[i].dim() != truth[i].dim()) throw Error(ErrorKind::ShapeMismatch, "ISRE dimension mismatch");
    const double e = dist(MetricKind::Riemannian, estimate[i], truth[i]);
    total += e * e;
  }
  return total / static_cast<double>(truth.size());
}

HpdCurve nn_regression(const HpdCurve& curve, int k, MetricKind metric) {
  if (k < 1 || k % 2 == 0) throw Error(ErrorKind::InvalidArgument, "k must be odd and positive");
  if (static_cast<std::size_t>(k) > curve.size()) {
    throw Error(ErrorKind::InvalidArgument, "k exceeds the curve length");
  }
  const std::size_t n = curve.size();
  HpdCurve out(n);
  parallel_for(n, [&](std::size_t i) {
    const std::size_t half = std::min({static_cast<std::size_t>(k - 1) / 2, i, n - 1 - i});
    if (half == 0) {
      out[i] = curve[i];
      return;
    }
    const std::span<const HpdMatrix> window(curve.data() + (i - half), 2 * half + 1);
    const std::vector<double> w(window.size(), 1.0);
    out[i] = karcher_mean(window, w, metric);
  });
  return out;
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct EstimatorRun {
  std::string estimator;
  std::string params;
  int k = 0;
};

std::vector<EstimatorRun> expand_estimators(const BenchmarkConfig& config) {
  std::vector<EstimatorRun> runs;
  const std::string wavelet_params =
      "N=" + std::to_string(config.order) + ";metric=" + std::string(to_string(config.metric));
  for (const auto& name : config.estimators) {
    if (name == "raw") {
      runs.push_back({name, ""});
    } else if (name == "wavelet-universal" || name == "wavelet-cv") {
      runs.push_back({name, wavelet_params});
    } else if (name == "wavelet-cpress") {
      runs.push_back({name, wavelet_params + ";lambda=" + format_double(config.cpress_lambda)});
    } else if (name == "nn") {
      for (int k : config.nn_k) runs.push_back({name, "k=" + std::to_string(k), k});
    } else {
      throw Error(ErrorKind::InvalidArgument, "unknown estimator '" + name + "'");
    }
  }
  return runs;
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config) {
  if (config.replicates < 1) throw Error(ErrorKind::InvalidArgument, "replicates must be >= 1");
  if (config.T < 2 || config.T % 2 != 0) throw Error(ErrorKind::NotDyadic, "T must be even");
  TestSpectrumSpec spec = config.spectrum;
  spec.n = static_cast<std::size_t>(config.T / 2);
  dyadic_levels(spec.n);
  const auto truth = make_test_spectrum(spec);
  const auto runs = expand_estimators(config);

  EstimateOptions options;
  options.B = config.B;
  options.order = config.order;
  options.metric = config.metric;
  options.nw = config.nw;
  options.taper = config.taper;
  const Index d = spec.d;
  const int B = resolve_tapers(options, d);
  const auto tapers = make_tapers(options, config.T, B);

  std::vector<std::vector<BenchmarkRow>> per_replicate(static_cast<std::size_t>(config.replicates));
  parallel_for(per_replicate.size(), [&](std::size_t r) {
    auto& rows = per_replicate[r];
    for (const auto& run : runs) {
      rows.push_back({static_cast<int>(r), run.estimator, run.params,
                      std::numeric_limits<double>::quiet_NaN()});
    }
    HpdCurve periodogram;
    try {
      Rng rng = make_rng(config.seed, r);
      const auto ts = cramer_timeseries(truth, config.T, rng);
      periodogram = bias_correct(multitaper_periodogram(ts, tapers), d, B, config.metric);
    } catch (const Error&) {
      return;
    }
    for (std::size_t e = 0; e < runs.size(); ++e) {
      const auto& run = runs[e];
      try {
        HpdCurve estimate;
        if (run.estimator == "raw") {
          estimate = periodogram;
        } else if (run.estimator == "nn") {
          estimate = nn_regression(periodogram, run.k);
        } else {
          EstimateOptions o = options;
          if (run.estimator == "wavelet-universal") o.policy = ThresholdPolicy::universal();
          if (run.estimator == "wavelet-cv") o.policy = ThresholdPolicy::cross_validation();
          if (run.estimator == "wavelet-cpress") o.policy = ThresholdPolicy::cpress(config.cpress_lambda);
          estimate = denoise_curve(periodogram, o, B).estimate;
        }
        rows[e].isre = isre(estimate, truth);
      } catch (const Error&) {
        // recorded as NaN
      }
    }
  }, 1);

  std::vector<BenchmarkRow> out;
  for (auto& rows : per_replicate) {
    for (auto& row : rows) out.push_back(std::move(row));
  }
  return out;
}

std::vector<BenchmarkSummary> summarize(const std::vector<BenchmarkRow>& rows) {
  std::vector<BenchmarkSummary> out;
  std::vector<std::vector<double>> values;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const BenchmarkSummary& s) {
      return s.estimator == row.estimator && s.params == row.params;
    });
    if (it == out.end()) {
      out.push_back({row.estimator, row.params});
      values.emplace_back();
      it = out.end() - 1;
    }
    auto& s = *it;
    ++s.runs;
    if (std::isnan(row.isre)) {
      ++s.failures;
    } else {
      values[static_cast<std::size_t>(it - out.begin())].push_back(row.isre);
    }
  }
  const auto quantile = [](const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& v = values[i];
    if (v.empty()) {
      out[i].mean = out[i].median = out[i].q25 = out[i].q75 = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    out[i].mean = sum / static_cast<double>(v.size());
    out[i].median = quantile(v, 0.5);
    out[i].q25 = quantile(v, 0.25);
    out[i].q75 = quantile(v, 0.75);
  }
  return out;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::string out = "replicate,estimator,params,ISRE\r\n";
  for (const auto& row : rows) {
    out += std::to_string(row.replicate) + "," + csv_field(row.estimator) + "," + csv_field(row.params) +
           "," + format_double(row.isre) + "\r\n";
  }
  return out;
}

}  // namespace hpdwave
