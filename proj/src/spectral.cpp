// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#include "hpdwave/spectral.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <charconv>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/FFT>

#include "hpdwave/parallel.hpp"

namespace hpdwave {

namespace {

// Symmetric tridiagonal matrix: diagonal a (size T), off-diagonal b (b[i]
// couples i and i+1, size T-1).
struct Tridiagonal {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
};

// Number of eigenvalues strictly below x (Sturm sequence).
Index count_below(const Tridiagonal& m, double x) {
  const double tiny = std::numeric_limits<double>::min() * 1e4;
  Index count = 0;
  double q = m.a(0) - x;
  if (q < 0.0) ++count;
  for (Index i = 1; i < m.a.size(); ++i) {
    if (q == 0.0) q = tiny;
    q = (m.a(i) - x) - m.b(i - 1) * m.b(i - 1) / q;
    if (q < 0.0) ++count;
  }
  return count;
}

// The eigenvalue with `index` eigenvalues below it, by bisection.
double bisect_eigenvalue(const Tridiagonal& m, Index index, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(m, mid) > index) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Solves (m - shift I) x = rhs by Gaussian elimination with partial pivoting.
Eigen::VectorXd shifted_solve(const Tridiagonal& m, double shift, const Eigen::VectorXd& rhs,
                              double pivot_floor) {
  const Index n = m.a.size();
  // Rows hold up to three nonzeros after pivoting: diag, super, super-super.
  Eigen::VectorXd d(n), du(n), du2(n), dl(n), x = rhs;
  for (Index i = 0; i < n; ++i) {
    d(i) = m.a(i) - shift;
    du(i) = i + 1 < n ? m.b(i) : 0.0;
    dl(i) = i + 1 < n ? m.b(i) : 0.0;
    du2(i) = 0.0;
  }
  for (Index i = 0; i + 1 < n; ++i) {
    if (std::abs(d(i)) >= std::abs(dl(i))) {
      if (d(i) == 0.0) d(i) = pivot_floor;
      const double f = dl(i) / d(i);
      d(i + 1) -= f * du(i);
      x(i + 1) -= f * x(i);
      dl(i) = 0.0;
    } else {
      // swap rows i and i+1
      const double f = d(i) / dl(i);
      d(i) = dl(i);
      const double tmp = d(i + 1);
      d(i + 1) = du(i) - f * tmp;
      if (i + 2 < n) {
        du2(i) = du(i + 1);
        du(i + 1) = -f * du2(i);
      }
      du(i) = tmp;
      std::swap(x(i), x(i + 1));
      x(i + 1) -= f * x(i);
    }
  }
  if (d(n - 1) == 0.0) d(n - 1) = pivot_floor;
  x(n - 1) /= d(n - 1);
  if (n > 1) x(n - 2) = (x(n - 2) - du(n - 2) * x(n - 1)) / d(n - 2);
  for (Index i = n - 3; i >= 0; --i) {
    x(i) = (x(i) - du(i) * x(i + 1) - du2(i) * x(i + 2)) / d(i);
  }
  return x;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double eps = 1e-12 * v.cwiseAbs().maxCoeff();
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > eps) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

TaperSet dpss_tapers(Index T, double W, int B) {
  if (T < 1 || B < 1) throw Error(ErrorKind::InvalidArgument, "tapers need T >= 1 and B >= 1");
  if (!(W > 0.0 && W < 0.5)) throw Error(ErrorKind::InvalidArgument, "bandwidth W must lie in (0, 1/2)");
  if (static_cast<double>(B) > 2.0 * static_cast<double>(T) * W) {
    throw Error(ErrorKind::BandwidthTooSmall, std::to_string(B) + " tapers exceed 2TW = " +
                                                  std::to_string(2.0 * static_cast<double>(T) * W));
  }
  Tridiagonal m{Eigen::VectorXd(T), Eigen::VectorXd(std::max<Index>(T - 1, 0))};
  const double c = std::cos(2.0 * std::numbers::pi * W);
  for (Index t = 0; t < T; ++t) {
    const double h = 0.5 * static_cast<double>(T - 1 - 2 * t);
    m.a(t) = h * h * c;
  }
  for (Index t = 1; t < T; ++t) m.b(t - 1) = 0.5 * static_cast<double>(t) * static_cast<double>(T - t);

  double lo = m.a(0);
  double hi = m.a(0);
  for (Index i = 0; i < T; ++i) {
    const double r = (i > 0 ? std::abs(m.b(i - 1)) : 0.0) + (i + 1 < T ? std::abs(m.b(i)) : 0.0);
    lo = std::min(lo, m.a(i) - r);
    hi = std::max(hi, m.a(i) + r);
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));
  lo -= 1e-9 * scale + 1.0;
  hi += 1e-9 * scale + 1.0;

  TaperSet out;
  out.tapers.resize(T, B);
  out.eigenvalues.resize(B);
  for (int b = 0; b < B; ++b) {
    const double lambda = bisect_eigenvalue(m, T - 1 - b, lo, hi);
    out.eigenvalues(b) = lambda;
    // Inverse iteration from a deterministic start, orthogonalised against the
    // tapers already found.
    Eigen::VectorXd v(T);
    for (Index t = 0; t < T; ++t) v(t) = 1.0 + 0.01 * std::sin(0.7 * static_cast<double>(t + 1) * (b + 1));
    const double shift = lambda + 1e-13 * scale;
    for (int it = 0; it < 6; ++it) {
      v = shifted_solve(m, shift, v, 1e-300 + 1e-16 * scale);
      for (int p = 0; p < b; ++p) v -= out.tapers.col(p).dot(v) * out.tapers.col(p);
      v.normalize();
    }
    fix_sign(v);
    out.tapers.col(b) = v;
  }
  return out;
}

TaperSet sine_tapers(Index T, int B) {
  if (T < 1 || B < 1) throw Error(ErrorKind::InvalidArgument, "tapers need T >= 1 and B >= 1");
  if (B > T) throw Error(ErrorKind::InvalidArgument, "more sine tapers than samples");
  TaperSet out;
  out.tapers.resize(T, B);
  const double norm = std::sqrt(2.0 / static_cast<double>(T + 1));
  for (int b = 1; b <= B; ++b) {
    for (Index t = 0; t < T; ++t) {
      out.tapers(t, b - 1) =
          norm * std::sin(std::numbers::pi * b * static_cast<double>(t + 1) / static_cast<double>(T + 1));
    }
  }
  return out;
}

std::vector<double> fourier_frequencies(Index T) {
  std::vector<double> out;
  for (Index l = 1; l <= T / 2; ++l) {
    out.push_back(2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(T));
  }
  return out;
}

HpdCurve multitaper_periodogram(const TimeSeries& ts, const TaperSet& tapers) {
  const Index d = ts.dim();
  const Index T = ts.length();
  const int B = tapers.count();
  if (d < 1 || T < 2) throw Error(ErrorKind::EmptyInput, "empty time series");
  if (!ts.data.allFinite()) throw Error(ErrorKind::DomainError, "time series has non-finite values");
  if (tapers.length() != T) {
    throw Error(ErrorKind::LengthMismatch, "taper length " + std::to_string(tapers.length()) +
                                               " differs from series length " + std::to_string(T));
  }
  if (B < d) {
    throw Error(ErrorKind::RankDeficient, "B = " + std::to_string(B) +
                                              " tapers cannot give a full-rank estimate for d = " +
                                              std::to_string(d));
  }
  if (T % 2 != 0) throw Error(ErrorKind::NotDyadic, "series length must be even");
  const Index n = T / 2;
  dyadic_levels(static_cast<std::size_t>(n));

  // J[b](c, l) for l = 1..n.
  std::vector<Eigen::MatrixXcd> dft(static_cast<std::size_t>(B), Eigen::MatrixXcd(d, n));
  parallel_for(static_cast<std::size_t>(B) * static_cast<std::size_t>(d), [&](std::size_t job) {
    const auto b = static_cast<Index>(job / static_cast<std::size_t>(d));
    const auto c = static_cast<Index>(job % static_cast<std::size_t>(d));
    Eigen::FFT<double> fft;
    std::vector<double> in(static_cast<std::size_t>(T));
    for (Index t = 0; t < T; ++t) in[static_cast<std::size_t>(t)] = tapers.tapers(t, b) * ts.data(c, t);
    std::vector<std::complex<double>> out;
    fft.fwd(out, in);
    for (Index l = 1; l <= n; ++l) dft[static_cast<std::size_t>(b)](c, l - 1) = out[static_cast<std::size_t>(l)];
  });

  const double scale = 1.0 / (2.0 * std::numbers::pi * B);
  HpdCurve out(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t l) {
    Matrix acc = Matrix::Zero(d, d);
    for (int b = 0; b < B; ++b) {
      const auto j = dft[static_cast<std::size_t>(b)].col(static_cast<Index>(l));
      acc.noalias() += j * j.adjoint();
    }
    out[l] = HpdMatrix(Matrix(scale * acc));
  });
  return out;
}

double bias_constant(Index d, int B) {
  if (d < 1 || B < d) {
    throw Error(ErrorKind::RankDeficient, "bias constant needs B >= d >= 1");
  }
  double s = 0.0;
  for (Index i = 1; i <= d; ++i) s += boost::math::digamma(static_cast<double>(B - d + i));
  return -std::log(static_cast<double>(B)) + s / static_cast<double>(d);
}

HpdCurve bias_correct(const HpdCurve& curve, Index d, int B, MetricKind metric) {
  if (metric != MetricKind::Riemannian && metric != MetricKind::LogEuclidean) {
    throw Error(ErrorKind::UnsupportedMetric,
                "bias correction is defined for the riemannian and logeuclidean metrics, not " +
                    std::string(to_string(metric)));
  }
  const double factor = std::exp(-bias_constant(d, B));
  HpdCurve out;
  out.reserve(curve.size());
  for (const auto& p : curve) {
    if (p.dim() != d) throw Error(ErrorKind::DimMismatch, "curve dimension differs from d");
    out.push_back(HpdMatrix::trusted(factor * p.matrix()));
  }
  return out;
}

namespace {

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidArgument, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

ThresholdPolicy parse_policy(std::string_view text) {
  if (text == "universal") return ThresholdPolicy::universal();
  if (text == "cv") return ThresholdPolicy::cross_validation();
  if (text.starts_with("cpress:")) {
    const double lambda = parse_double(text.substr(7));
    if (lambda < 0.0) throw Error(ErrorKind::InvalidArgument, "cpress lambda must be nonnegative");
    return ThresholdPolicy::cpress(lambda);
  }
  if (text.starts_with("cv:")) {
    std::vector<double> grid;
    std::string_view rest = text.substr(3);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      grid.push_back(parse_double(rest.substr(0, comma)));
      if (grid.back() < 0.0) throw Error(ErrorKind::InvalidArgument, "cv grid must be nonnegative");
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty cv grid");
    return ThresholdPolicy::cross_validation(std::move(grid));
  }
  throw Error(ErrorKind::InvalidArgument,
              "unknown policy '" + std::string(text) + "' (universal, cpress:<lambda>, cv)");
}

std::string to_string(const ThresholdPolicy& policy) {
  switch (policy.kind) {
    case PolicyKind::Universal: return "universal";
    case PolicyKind::Cpress: {
      char buf[32];
      const auto r = std::to_chars(buf, buf + sizeof buf, policy.lambda);
      return "cpress:" + std::string(buf, r.ptr);
    }
    case PolicyKind::CrossValidation: return "cv";
  }
  return "unknown";
}

DenoiseResult denoise_curve(const HpdCurve& curve, const EstimateOptions& options, int B) {
  if (curve.empty()) throw Error(ErrorKind::EmptyInput, "empty curve");
  const Index d = curve.front().dim();
  TransformOptions topts;
  topts.order = options.order;
  topts.metric = options.metric;
  const auto decomp = forward(curve, topts);

  DenoiseResult out;
  out.traces = trace_pyramid(decomp);
  const bool closed_form = !options.mad_noise &&
                           (options.metric == MetricKind::Riemannian ||
                            options.metric == MetricKind::LogEuclidean) &&
                           (options.order == 1 || options.order == 3 || options.order == 5 ||
                            options.order == 7);
  if (closed_form) {
    out.sigma = std::sqrt(noise_variance({d, B, decomp.levels(), options.order}));
  } else if (decomp.levels() > 0) {
    out.sigma = mad_sigma(out.traces);
  }

  switch (options.policy.kind) {
    case PolicyKind::Universal:
      out.lambda = universal_threshold(out.sigma, std::max<std::size_t>(decomp.coefficient_count(), 1));
      break;
    case PolicyKind::Cpress: out.lambda = options.policy.lambda; break;
    case PolicyKind::CrossValidation: {
      std::vector<double> grid = options.policy.grid;
      if (grid.empty()) {
        // Half curves have twice the trace variance of the full curve.
        const double half_sigma = std::numbers::sqrt2 * out.sigma;
        for (int i = 0; i <= 20; ++i) grid.push_back(0.25 * i * half_sigma);
      }
      const auto cv = cv_select_lambda(curve, topts, grid);
      out.lambda = cv.lambda / std::numbers::sqrt2;
      break;
    }
  }
  out.labels = cpress_prune(out.traces, out.lambda);
  out.estimate = inverse(apply_labels(decomp, out.labels));
  return out;
}

int resolve_tapers(const EstimateOptions& options, Index d) {
  return options.B > 0 ? options.B : static_cast<int>(d);
}

TaperSet make_tapers(const EstimateOptions& options, Index T, int B) {
  if (options.taper == TaperKind::Sine) return sine_tapers(T, B);
  const double nw = options.nw > 0.0 ? options.nw : 0.5 * B + 1.0;
  return dpss_tapers(T, nw / static_cast<double>(T), B);
}

SpectralEstimate estimate_spectrum(const TimeSeries& ts, const EstimateOptions& options) {
  const Index d = ts.dim();
  const int B = resolve_tapers(options, d);
  if (B < d) {
    throw Error(ErrorKind::RankDeficient, "B = " + std::to_string(B) + " < d = " + std::to_string(d));
  }
  if (options.bias_correction && options.metric != MetricKind::Riemannian &&
      options.metric != MetricKind::LogEuclidean) {
    throw Error(ErrorKind::UnsupportedMetric, "bias correction is not available for the " +
                                                  std::string(to_string(options.metric)) + " metric");
  }
  const auto tapers = make_tapers(options, ts.length(), B);
  HpdCurve curve = multitaper_periodogram(ts, tapers);
  if (options.bias_correction) curve = bias_correct(curve, d, B, options.metric);

  auto denoised = denoise_curve(curve, options, B);
  SpectralEstimate out;
  out.curve = std::move(denoised.estimate);
  out.frequencies = fourier_frequencies(ts.length());
  out.d = d;
  out.B = B;
  out.order = options.order;
  out.metric = options.metric;
  out.policy = options.policy;
  out.periodogram = std::move(curve);
  out.traces = std::move(denoised.traces);
  out.labels = std::move(denoised.labels);
  out.lambda = denoised.lambda;
  return out;
}

}  // namespace hpdwave
