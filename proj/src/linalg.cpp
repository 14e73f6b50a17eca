// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#include "hpdwave/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace hpdwave {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::NotPD: return "NotPD";
    case ErrorKind::NotDyadic: return "NotDyadic";
    case ErrorKind::DegenerateGrid: return "DegenerateGrid";
    case ErrorKind::OrderTooLarge: return "OrderTooLarge";
    case ErrorKind::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorKind::BoundaryLocation: return "BoundaryLocation";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::BandwidthTooSmall: return "BandwidthTooSmall";
    case ErrorKind::UnsupportedMetric: return "UnsupportedMetric";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

void require_square_finite(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::DimMismatch, "matrix must be square and non-empty");
  }
  if (!m.allFinite()) throw Error(ErrorKind::DomainError, "matrix has non-finite entries");
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

Matrix hermitian_part(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  for (Index i = 0; i < h.rows(); ++i) h(i, i) = Complex(h(i, i).real(), 0.0);
  return h;
}

HermitianMatrix::HermitianMatrix(const Matrix& m) {
  require_square_finite(m);
  m_ = hermitian_part(m);
}

HermitianMatrix HermitianMatrix::zero(Index d) { return HermitianMatrix(Matrix::Zero(d, d)); }
HermitianMatrix HermitianMatrix::identity(Index d) { return HermitianMatrix(Matrix::Identity(d, d)); }
HermitianMatrix HermitianMatrix::diagonal(const Eigen::VectorXd& values) {
  return HermitianMatrix(Matrix(values.cast<Complex>().asDiagonal()));
}

double pd_tolerance(double largest) { return 1e-12 * (largest > 0.0 ? largest : 1.0); }

HpdMatrix::HpdMatrix(const Matrix& m) : HpdMatrix(HermitianMatrix(m)) {}

HpdMatrix::HpdMatrix(const HermitianMatrix& h) : h_(h) {
  const auto e = eig_hermitian(h_.matrix());
  const double lo = e.values(0);
  const double hi = e.values(e.values.size() - 1);
  if (!(lo > pd_tolerance(hi)) || hi <= 0.0) {
    throw Error(ErrorKind::NotPD, "smallest eigenvalue " + std::to_string(lo) + " is not positive");
  }
}

HpdMatrix HpdMatrix::identity(Index d) { return trusted(Matrix::Identity(d, d)); }
HpdMatrix HpdMatrix::diagonal(const Eigen::VectorXd& values) {
  return HpdMatrix(Matrix(values.cast<Complex>().asDiagonal()));
}

HpdMatrix HpdMatrix::trusted(const Matrix& m) {
  HpdMatrix p;
  p.h_ = HermitianMatrix(m);
  return p;
}

EigenDecomposition eig_hermitian(const Matrix& h) {
  require_square_finite(h);
  const Index n = h.rows();
  Matrix a = hermitian_part(h);
  Matrix v = Matrix::Identity(n, n);
  const double scale = a.norm();

  bool converged = (n == 1);
  for (int sweep = 0; sweep < kMaxJacobiSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const bool negligible = mag <= 1e-300 || mag <= 1e-18 * scale ||
                                (sweep > 3 && std::abs(app) + 100.0 * mag == std::abs(app) &&
                                 std::abs(aqq) + 100.0 * mag == std::abs(aqq));
        if (negligible) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        rotated = true;
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = std::abs(theta) > 1e150
                             ? 0.5 / theta
                             : sign_of(theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex phase = apq / mag;
        const Complex spq = s * phase;             // J(p,q)
        const Complex sqp = -s * std::conj(phase);  // J(q,p)

        for (Index k = 0; k < n; ++k) {  // A <- A J
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp + sqp * akq;
          a(k, q) = spq * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {  // A <- J^* A
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk + std::conj(sqp) * aqk;
          a(q, k) = std::conj(spq) * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {  // V <- V J
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp + sqp * vkq;
          v(k, q) = spq * vkp + c * vkq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = Complex(a(p, p).real(), 0.0);
        a(q, q) = Complex(a(q, q).real(), 0.0);
      }
    }
    if (!rotated) converged = true;
  }
  if (!converged) {
    throw Error(ErrorKind::NonConvergence, "Jacobi eigensolver exceeded " +
                                               std::to_string(kMaxJacobiSweeps) + " sweeps");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i).real() < a(j, j).real(); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    out.values(i) = a(order[i], order[i]).real();
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

EigenDecomposition eig_hermitian(const HermitianMatrix& h) { return eig_hermitian(h.matrix()); }

Matrix reconstruct(const EigenDecomposition& e) {
  return hermitian_part(e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint());
}

Matrix apply_spectral(const EigenDecomposition& e, const std::function<double(double)>& f) {
  Eigen::VectorXd fv(e.values.size());
  for (Index i = 0; i < fv.size(); ++i) {
    fv(i) = f(e.values(i));
    if (!std::isfinite(fv(i))) {
      throw Error(ErrorKind::DomainError,
                  "matrix function undefined at eigenvalue " + std::to_string(e.values(i)));
    }
  }
  return hermitian_part(e.vectors * fv.cast<Complex>().asDiagonal() * e.vectors.adjoint());
}

HermitianMatrix matrix_fn(const HermitianMatrix& h, const std::function<double(double)>& f) {
  return HermitianMatrix(apply_spectral(eig_hermitian(h), f));
}

namespace mfn {
namespace {

void require_positive(const EigenDecomposition& e, const char* what) {
  if (!(e.values(0) > 0.0)) {
    throw Error(ErrorKind::DomainError, std::string(what) + " requires positive eigenvalues, got " +
                                            std::to_string(e.values(0)));
  }
}

}  // namespace

Matrix exp(const Matrix& h) {
  return apply_spectral(eig_hermitian(h), [](double x) { return std::exp(x); });
}

Matrix log(const Matrix& h) {
  const auto e = eig_hermitian(h);
  require_positive(e, "log");
  return apply_spectral(e, [](double x) { return std::log(x); });
}

Matrix sqrt(const Matrix& h) {
  const auto e = eig_hermitian(h);
  const double hi = std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
  if (e.values(0) < -1e-14 * hi) {
    throw Error(ErrorKind::DomainError, "sqrt of a matrix with a negative eigenvalue");
  }
  return apply_spectral(e, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

Matrix inv_sqrt(const Matrix& h) {
  const auto e = eig_hermitian(h);
  require_positive(e, "inv_sqrt");
  return apply_spectral(e, [](double x) { return 1.0 / std::sqrt(x); });
}

Matrix inverse(const Matrix& h) {
  const auto e = eig_hermitian(h);
  if (e.values.cwiseAbs().minCoeff() == 0.0) {
    throw Error(ErrorKind::DomainError, "inverse of a singular matrix");
  }
  return apply_spectral(e, [](double x) { return 1.0 / x; });
}

Matrix power(const Matrix& h, double t) {
  const auto e = eig_hermitian(h);
  require_positive(e, "power");
  return apply_spectral(e, [t](double x) { return std::pow(x, t); });
}

SqrtPair sqrt_pair(const Matrix& p) {
  const auto e = eig_hermitian(p);
  require_positive(e, "sqrt_pair");
  return {apply_spectral(e, [](double x) { return std::sqrt(x); }),
          apply_spectral(e, [](double x) { return 1.0 / std::sqrt(x); })};
}

}  // namespace mfn

HermitianMatrix exp(const HermitianMatrix& h) { return HermitianMatrix(mfn::exp(h.matrix())); }
HermitianMatrix log(const HermitianMatrix& h) { return HermitianMatrix(mfn::log(h.matrix())); }
HermitianMatrix sqrt(const HermitianMatrix& h) { return HermitianMatrix(mfn::sqrt(h.matrix())); }
HermitianMatrix inv_sqrt(const HermitianMatrix& h) {
  return HermitianMatrix(mfn::inv_sqrt(h.matrix()));
}
HermitianMatrix inverse(const HermitianMatrix& h) {
  return HermitianMatrix(mfn::inverse(h.matrix()));
}
HermitianMatrix power(const HermitianMatrix& h, double t) {
  return HermitianMatrix(mfn::power(h.matrix(), t));
}

Matrix congruence(const Matrix& a, const Matrix& x) {
  if (a.rows() != a.cols() || a.rows() != x.rows() || x.rows() != x.cols()) {
    throw Error(ErrorKind::DimMismatch, "congruence needs square matrices of equal size");
  }
  return hermitian_part(a.adjoint() * x * a);
}

HermitianMatrix congruence(const Matrix& a, const HermitianMatrix& x) {
  return HermitianMatrix(congruence(a, x.matrix()));
}

Matrix cholesky_lower(const Matrix& p) {
  require_square_finite(p);
  Eigen::LLT<Matrix> llt(hermitian_part(p));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPD, "Cholesky factorization hit a non-positive pivot");
  }
  Matrix l = llt.matrixL();
  return l;
}

Matrix cholesky_lower(const HpdMatrix& p) { return cholesky_lower(p.matrix()); }

bool is_hpd(const HermitianMatrix& h, double eps) {
  return eig_hermitian(h).values(0) > eps;
}

bool is_hpd(const Matrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0 || !h.allFinite()) return false;
  const auto e = eig_hermitian(h);
  const double hi = e.values(e.values.size() - 1);
  return hi > 0.0 && e.values(0) > pd_tolerance(hi);
}

}  // namespace hpdwave
