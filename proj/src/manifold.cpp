// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#include "hpdwave/manifold.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "geometry.hpp"

namespace hpdwave {

std::string_view to_string(MetricKind metric) {
  switch (metric) {
    case MetricKind::Riemannian: return "riemannian";
    case MetricKind::LogEuclidean: return "logeuclidean";
    case MetricKind::Cholesky: return "cholesky";
    case MetricKind::Euclidean: return "euclidean";
  }
  return "unknown";
}

MetricKind parse_metric(std::string_view name) {
  std::string s;
  for (char ch : name) {
    if (ch != '-' && ch != '_') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (s == "riemannian") return MetricKind::Riemannian;
  if (s == "logeuclidean") return MetricKind::LogEuclidean;
  if (s == "cholesky") return MetricKind::Cholesky;
  if (s == "euclidean") return MetricKind::Euclidean;
  throw Error(ErrorKind::InvalidArgument, "unknown metric '" + std::string(name) + "'");
}

bool is_dyadic(std::size_t n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

int dyadic_levels(std::size_t n) {
  if (!is_dyadic(n)) {
    throw Error(ErrorKind::NotDyadic, "curve length " + std::to_string(n) + " is not a power of two");
  }
  int levels = 0;
  while ((std::size_t{1} << levels) < n) ++levels;
  return levels;
}

namespace detail {

Matrix riemannian_geodesic(const Matrix& a, const Matrix& b, double t) {
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  const auto sp = mfn::sqrt_pair(a);
  const Matrix w = congruence(sp.inv_sqrt, b);
  return congruence(sp.sqrt, mfn::power(w, t));
}

Matrix riemannian_log(const Matrix& p, const Matrix& q) {
  const auto sp = mfn::sqrt_pair(p);
  return congruence(sp.sqrt, mfn::log(congruence(sp.inv_sqrt, q)));
}

Matrix riemannian_exp(const Matrix& p, const Matrix& v) {
  const auto sp = mfn::sqrt_pair(p);
  return congruence(sp.sqrt, mfn::exp(congruence(sp.inv_sqrt, v)));
}

double riemannian_dist(const Matrix& p1, const Matrix& p2) {
  const Matrix w = congruence(mfn::inv_sqrt(p1), p2);
  const auto e = eig_hermitian(w);
  if (!(e.values(0) > 0.0)) throw Error(ErrorKind::NotPD, "distance to a non-PD matrix");
  return e.values.array().log().matrix().norm();
}

namespace {

std::vector<double> normalized(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) throw Error(ErrorKind::InvalidArgument, "non-finite mean weight");
    total += w;
  }
  if (total == 0.0) throw Error(ErrorKind::InvalidArgument, "mean weights sum to zero");
  std::vector<double> out(weights.begin(), weights.end());
  for (double& w : out) w /= total;
  return out;
}

void check_mean_inputs(std::span<const Matrix> points, std::span<const double> weights) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "mean of an empty set");
  if (points.size() != weights.size()) {
    throw Error(ErrorKind::ShapeMismatch, "points and weights differ in length");
  }
  for (const auto& p : points) {
    if (p.rows() != points.front().rows() || p.cols() != points.front().cols()) {
      throw Error(ErrorKind::DimMismatch, "mean of matrices with different dimensions");
    }
  }
}

}  // namespace

namespace {

// Hermitian matrix <-> real coordinates, isometric for the Frobenius norm.
Eigen::VectorXd pack_hermitian(const Matrix& h) {
  const Index d = h.rows();
  Eigen::VectorXd v(d * d);
  Index c = 0;
  for (Index i = 0; i < d; ++i) {
    v(c++) = h(i, i).real();
    for (Index j = i + 1; j < d; ++j) {
      v(c++) = h(i, j).real() * std::numbers::sqrt2;
      v(c++) = h(i, j).imag() * std::numbers::sqrt2;
    }
  }
  return v;
}

Matrix unpack_hermitian(const Eigen::VectorXd& v, Index d) {
  Matrix h(d, d);
  Index c = 0;
  for (Index i = 0; i < d; ++i) {
    h(i, i) = v(c++);
    for (Index j = i + 1; j < d; ++j) {
      const double re = v(c++) / std::numbers::sqrt2;
      const double im = v(c++) / std::numbers::sqrt2;
      h(i, j) = Complex(re, im);
      h(j, i) = Complex(re, -im);
    }
  }
  return h;
}

// Whitened gradient sum_i w_i Log(mu^{-1/2} x_i mu^{-1/2}).
Matrix whitened_gradient(std::span<const Matrix> points, std::span<const double> w,
                         const Matrix& inv_sqrt_mu) {
  Matrix grad = Matrix::Zero(inv_sqrt_mu.rows(), inv_sqrt_mu.cols());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (w[i] != 0.0) grad += w[i] * mfn::log(congruence(inv_sqrt_mu, points[i]));
  }
  return grad;
}

double gradient_norm(std::span<const Matrix> points, std::span<const double> w, const Matrix& mu) {
  return whitened_gradient(points, w, mfn::inv_sqrt(mu)).norm();
}

// Damped Newton on the whitened gradient with a forward-difference Jacobian in
// the coordinates mu^{1/2} exp(E) mu^{1/2}.
bool newton_mean(std::span<const Matrix> points, std::span<const double> w, Matrix& mu,
                 double tol) {
  constexpr int kMaxNewton = 50;
  constexpr double kStep = 1e-6;
  const Index d = mu.rows();
  const Index p = d * d;
  for (int it = 0; it < kMaxNewton; ++it) {
    const auto sp = mfn::sqrt_pair(mu);
    const Eigen::VectorXd f = pack_hermitian(whitened_gradient(points, w, sp.inv_sqrt));
    const double norm = f.norm();
    if (norm <= 1e-2 * tol) return true;
    Eigen::MatrixXd jac(p, p);
    for (Index c = 0; c < p; ++c) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
      e(c) = kStep;
      const Matrix moved = congruence(sp.sqrt, mfn::exp(unpack_hermitian(e, d)));
      jac.col(c) = (pack_hermitian(whitened_gradient(points, w, mfn::inv_sqrt(moved))) - f) / kStep;
    }
    const Eigen::VectorXd step = jac.fullPivLu().solve(-f);
    if (!step.allFinite()) return norm <= tol;
    double alpha = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30 && !improved; ++ls, alpha *= 0.5) {
      try {
        const Matrix trial = congruence(sp.sqrt, mfn::exp(unpack_hermitian(alpha * step, d)));
        if (gradient_norm(points, w, trial) < norm) {
          mu = trial;
          improved = true;
        }
      } catch (const Error&) {
        // overshoot left the representable cone; shrink the step
      }
    }
    if (!improved) return norm <= tol;
  }
  return gradient_norm(points, w, mu) <= tol;
}

// Continuation from the point mass at `anchor` to the target weights.
bool homotopy_mean(std::span<const Matrix> points, std::span<const double> w, std::size_t anchor,
                   Matrix& mu, double tol) {
  Matrix current = points[anchor];
  double reached = 0.0;
  double h = 0.125;
  std::vector<double> ws(w.size());
  while (reached < 1.0) {
    const double s = std::min(1.0, reached + h);
    for (std::size_t i = 0; i < w.size(); ++i) ws[i] = s * w[i] + (i == anchor ? 1.0 - s : 0.0);
    Matrix trial = current;
    bool ok = false;
    try {
      ok = newton_mean(points, ws, trial, tol);
    } catch (const Error&) {
      ok = false;
    }
    if (ok) {
      current = std::move(trial);
      reached = s;
      h = std::min(0.25, 2.0 * h);
    } else {
      h *= 0.5;
      if (h < 1e-3) return false;
    }
  }
  mu = std::move(current);
  return true;
}

}  // namespace

Matrix riemannian_mean(std::span<const Matrix> points, std::span<const double> weights,
                       const KarcherOptions& options) {
  check_mean_inputs(points, weights);
  const auto w = normalized(weights);

  std::size_t anchor = 0;
  bool signed_weights = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (std::abs(w[i]) > std::abs(w[anchor])) anchor = i;
    if (w[i] < 0.0) signed_weights = true;
  }
  if (points.size() == 1 || w[anchor] == 1.0) {
    bool others_zero = true;
    for (std::size_t i = 0; i < w.size(); ++i) others_zero = others_zero && (i == anchor || w[i] == 0.0);
    if (others_zero) return points[anchor];
  }
  if (points.size() == 2) return riemannian_geodesic(points[0], points[1], w[1]);

  bool all_equal = true;
  for (const auto& p : points) all_equal = all_equal && p == points.front();
  if (all_equal) return points.front();

  Matrix mu = points[anchor];
  if (!signed_weights) {
    // The log-Euclidean mean is a close start for spread-out positive data.
    Matrix log_mean = Matrix::Zero(mu.rows(), mu.cols());
    for (std::size_t i = 0; i < points.size(); ++i) log_mean += w[i] * mfn::log(points[i]);
    mu = mfn::exp(log_mean);
  }
  double step = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  Matrix best = mu;
  double best_norm = previous;
  for (int it = 0; it < options.max_iter; ++it) {
    const auto sp = mfn::sqrt_pair(mu);
    const Matrix grad = whitened_gradient(points, w, sp.inv_sqrt);
    const double norm = grad.norm();
    if (norm <= options.tol) return mu;
    if (!std::isfinite(norm)) break;
    if (norm < best_norm) {
      best = mu;
      best_norm = norm;
    }
    if (norm >= previous) step *= 0.5;
    previous = norm;
    try {
      mu = congruence(sp.sqrt, mfn::exp(step * grad));
    } catch (const Error&) {
      break;
    }
  }

  // Ill-conditioned data and signed weights far from the convex case can
  // defeat the damped fixed point; solve the same stationarity equation by
  // Newton, then (signed weights) by continuation.
  if (std::isfinite(best_norm)) {
    Matrix start = best;
    try {
      if (newton_mean(points, w, start, options.tol)) return start;
    } catch (const Error&) {
      // fall through
    }
  }
  if (signed_weights) {
    try {
      const auto sp = mfn::sqrt_pair(points[anchor]);
      Matrix start = congruence(sp.sqrt, mfn::exp(whitened_gradient(points, w, sp.inv_sqrt)));
      if (newton_mean(points, w, start, options.tol)) return start;
    } catch (const Error&) {
      // fall through to continuation
    }
    Matrix tracked;
    if (homotopy_mean(points, w, anchor, tracked, options.tol)) return tracked;
  }
  throw Error(ErrorKind::NonConvergence,
              "intrinsic mean did not converge in " + std::to_string(options.max_iter) + " iterations");
}

namespace {

class RiemannianGeometry final : public Geometry {
 public:
  Matrix geodesic(const Matrix& a, const Matrix& b, double t) const override {
    return riemannian_geodesic(a, b, t);
  }
  Matrix log(const Matrix& base, const Matrix& q) const override { return riemannian_log(base, q); }
  Matrix exp(const Matrix& base, const Matrix& v) const override { return riemannian_exp(base, v); }
  Matrix reflect(const Matrix& mid, const Matrix& a) const override {
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::NotPD, "reflection about a non-PD point");
    return hermitian_part(mid * llt.solve(mid));
  }
  Matrix mean(std::span<const Matrix> points, std::span<const double> weights,
              const KarcherOptions& options) const override {
    return riemannian_mean(points, weights, options);
  }
  Matrix whiten(const Matrix& base, const Matrix& v) const override {
    return congruence(mfn::inv_sqrt(base), v);
  }
};

class FlatGeometry final : public Geometry {
 public:
  Matrix geodesic(const Matrix& a, const Matrix& b, double t) const override {
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    return (1.0 - t) * a + t * b;
  }
  Matrix log(const Matrix& base, const Matrix& q) const override { return q - base; }
  Matrix exp(const Matrix& base, const Matrix& v) const override { return base + v; }
  Matrix reflect(const Matrix& mid, const Matrix& a) const override { return 2.0 * mid - a; }
  Matrix mean(std::span<const Matrix> points, std::span<const double> weights,
              const KarcherOptions&) const override {
    check_mean_inputs(points, weights);
    const auto w = normalized(weights);
    Matrix out = Matrix::Zero(points.front().rows(), points.front().cols());
    for (std::size_t i = 0; i < points.size(); ++i) out += w[i] * points[i];
    return out;
  }
  Matrix whiten(const Matrix&, const Matrix& v) const override { return v; }
};

}  // namespace

const Geometry& geometry_for(MetricKind metric) {
  static const RiemannianGeometry riemannian;
  static const FlatGeometry flat;
  return metric == MetricKind::Riemannian ? static_cast<const Geometry&>(riemannian)
                                          : static_cast<const Geometry&>(flat);
}

}  // namespace detail

Matrix to_chart(MetricKind metric, const Matrix& p) {
  switch (metric) {
    case MetricKind::Riemannian:
    case MetricKind::Euclidean: return p;
    case MetricKind::LogEuclidean: return mfn::log(p);
    case MetricKind::Cholesky: return cholesky_lower(p);
  }
  return p;
}

Matrix from_chart(MetricKind metric, const Matrix& c) {
  switch (metric) {
    case MetricKind::Riemannian:
    case MetricKind::Euclidean: return hermitian_part(c);
    case MetricKind::LogEuclidean: return mfn::exp(c);
    case MetricKind::Cholesky: return hermitian_part(c * c.adjoint());
  }
  return c;
}

namespace {

void require_same_dim(const HpdMatrix& a, const HpdMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimMismatch, "matrices of different dimension");
}

void require_same_dim(const HpdMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimMismatch, "matrices of different dimension");
}

HpdMatrix checked_from_chart(MetricKind metric, const Matrix& c) {
  if (metric == MetricKind::LogEuclidean) return HpdMatrix::trusted(from_chart(metric, c));
  return HpdMatrix(from_chart(metric, c));
}

}  // namespace

double inner_product(const HpdMatrix& p, const HermitianMatrix& h1, const HermitianMatrix& h2) {
  require_same_dim(p, h1);
  require_same_dim(p, h2);
  const Matrix is = mfn::inv_sqrt(p.matrix());
  const Matrix a = congruence(is, h1.matrix());
  const Matrix b = congruence(is, h2.matrix());
  return (a * b).trace().real();
}

double riemannian_norm(const HpdMatrix& p, const HermitianMatrix& h) {
  return std::sqrt(std::max(inner_product(p, h, h), 0.0));
}

double dist(MetricKind metric, const HpdMatrix& p1, const HpdMatrix& p2) {
  require_same_dim(p1, p2);
  if (metric == MetricKind::Riemannian) return detail::riemannian_dist(p1.matrix(), p2.matrix());
  return (to_chart(metric, p1.matrix()) - to_chart(metric, p2.matrix())).norm();
}

HpdMatrix geodesic(MetricKind metric, const HpdMatrix& p1, const HpdMatrix& p2, double t) {
  require_same_dim(p1, p2);
  if (!std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "non-finite geodesic time");
  if (t == 0.0) return p1;
  if (t == 1.0) return p2;
  if (metric == MetricKind::Riemannian) {
    return HpdMatrix::trusted(detail::riemannian_geodesic(p1.matrix(), p2.matrix(), t));
  }
  const Matrix c1 = to_chart(metric, p1.matrix());
  const Matrix c2 = to_chart(metric, p2.matrix());
  return checked_from_chart(metric, (1.0 - t) * c1 + t * c2);
}

HpdMatrix exp_map(const HpdMatrix& p, const HermitianMatrix& h) {
  require_same_dim(p, h);
  return HpdMatrix::trusted(detail::riemannian_exp(p.matrix(), h.matrix()));
}

HermitianMatrix log_map(const HpdMatrix& p, const HpdMatrix& q) {
  require_same_dim(p, q);
  return HermitianMatrix(detail::riemannian_log(p.matrix(), q.matrix()));
}

HermitianMatrix whitening_transport(const HpdMatrix& p, const HermitianMatrix& w) {
  require_same_dim(p, w);
  return HermitianMatrix(congruence(mfn::inv_sqrt(p.matrix()), w.matrix()));
}

HermitianMatrix geodesic_parallel_transport(const HpdMatrix& p, const HermitianMatrix& v,
                                            const HermitianMatrix& w) {
  require_same_dim(p, v);
  require_same_dim(p, w);
  // E w E^* with E = Exp_p(v/2) p^{-1}.
  const Matrix half = detail::riemannian_exp(p.matrix(), 0.5 * v.matrix());
  const Matrix e = mfn::inverse(p.matrix()) * half;
  return congruence(e, w);
}

HpdMatrix karcher_mean(std::span<const HpdMatrix> points, std::span<const double> weights,
                       MetricKind metric, KarcherOptions options) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "mean of an empty set");
  std::vector<Matrix> chart;
  chart.reserve(points.size());
  for (const auto& p : points) {
    if (p.dim() != points.front().dim()) throw Error(ErrorKind::DimMismatch, "mixed dimensions");
    chart.push_back(to_chart(metric, p.matrix()));
  }
  const Matrix m = detail::geometry_for(metric).mean(chart, weights, options);
  if (metric == MetricKind::Riemannian) return HpdMatrix::trusted(m);
  return checked_from_chart(metric, m);
}

}  // namespace hpdwave
