// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "hpdwave/error.hpp"

namespace hpdwave {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Dense complex Hermitian matrix. Construction symmetrizes the input as
/// (m + m^*)/2, so the stored entries are exactly Hermitian with a real
/// diagonal.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const Matrix& m);

  static HermitianMatrix zero(Index d);
  static HermitianMatrix identity(Index d);
  static HermitianMatrix diagonal(const Eigen::VectorXd& values);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 private:
  Matrix m_;
};

/// Hermitian positive-definite matrix: the smallest eigenvalue exceeds
/// `pd_tolerance(largest eigenvalue)`.
class HpdMatrix {
 public:
  HpdMatrix() = default;
  explicit HpdMatrix(const Matrix& m);
  explicit HpdMatrix(const HermitianMatrix& h);

  static HpdMatrix identity(Index d);
  static HpdMatrix diagonal(const Eigen::VectorXd& values);
  static HpdMatrix scalar(double value) { return diagonal(Eigen::VectorXd::Constant(1, value)); }

  /// Skips the eigenvalue check. Only for results that are HPD by
  /// construction (matrix exponentials, congruences of HPD matrices).
  static HpdMatrix trusted(const Matrix& m);

  const Matrix& matrix() const noexcept { return h_.matrix(); }
  const HermitianMatrix& hermitian() const noexcept { return h_; }
  Index dim() const noexcept { return h_.dim(); }

 private:
  HermitianMatrix h_;
};

struct EigenDecomposition {
  Eigen::VectorXd values;  ///< ascending
  Matrix vectors;          ///< unitary, eigenvectors in columns
};

inline constexpr int kMaxJacobiSweeps = 50;
inline constexpr double kTolEig = 1e-12;
inline constexpr double kTolFn = 1e-10;

/// Smallest eigenvalue accepted as positive for a matrix whose largest
/// eigenvalue is `largest`.
double pd_tolerance(double largest);

/// Cyclic complex Jacobi eigensolver. The input is assumed Hermitian; only the
/// Hermitian part participates.
EigenDecomposition eig_hermitian(const Matrix& h);
EigenDecomposition eig_hermitian(const HermitianMatrix& h);

Matrix reconstruct(const EigenDecomposition& e);

/// Q f(Λ) Q^*.
Matrix apply_spectral(const EigenDecomposition& e, const std::function<double(double)>& f);

HermitianMatrix matrix_fn(const HermitianMatrix& h, const std::function<double(double)>& f);

namespace mfn {
// Raw-matrix versions used by the geometry kernels. Inputs are Hermitian.
Matrix exp(const Matrix& h);
Matrix log(const Matrix& h);
Matrix sqrt(const Matrix& h);
Matrix inv_sqrt(const Matrix& h);
Matrix inverse(const Matrix& h);
Matrix power(const Matrix& h, double t);

struct SqrtPair {
  Matrix sqrt;
  Matrix inv_sqrt;
};
SqrtPair sqrt_pair(const Matrix& p);
}  // namespace mfn

HermitianMatrix exp(const HermitianMatrix& h);
HermitianMatrix log(const HermitianMatrix& h);
HermitianMatrix sqrt(const HermitianMatrix& h);
HermitianMatrix inv_sqrt(const HermitianMatrix& h);
HermitianMatrix inverse(const HermitianMatrix& h);
HermitianMatrix power(const HermitianMatrix& h, double t);

/// (m + m^*)/2 with the diagonal imaginary parts zeroed.
Matrix hermitian_part(const Matrix& m);

/// a^* x a, symmetrized.
Matrix congruence(const Matrix& a, const Matrix& x);
HermitianMatrix congruence(const Matrix& a, const HermitianMatrix& x);

/// Lower-triangular L with positive real diagonal and L L^* = p.
Matrix cholesky_lower(const HpdMatrix& p);
Matrix cholesky_lower(const Matrix& p);

bool is_hpd(const HermitianMatrix& h, double eps);
bool is_hpd(const Matrix& h);

}  // namespace hpdwave
