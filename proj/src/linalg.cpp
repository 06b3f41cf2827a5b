// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#include "splitkit/linalg.hpp"

#include <algorithm>
#include <cstddef>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "splitkit/errors.hpp"

// Factorizations are delegated to Eigen; this is the only translation unit
// that includes it. Matrix-vector products go through the kernel layer since
// they sit on solver hot paths.

namespace splitkit {

namespace {

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EigenRowMajor>;
using MutMap = Eigen::Map<EigenRowMajor>;

ConstMap map_of(const Matrix& m) {
  return ConstMap(m.data.data(), static_cast<Eigen::Index>(m.rows),
                  static_cast<Eigen::Index>(m.cols));
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
  std::size_t i = 0;
  for (const auto& r : rows) {
    assert(r.size() == m.cols);
    std::copy(r.begin(), r.end(), m.row(i));
    ++i;
  }
  return m;
}

Vec matvec(const Matrix& a, const Vec& x) {
  assert(x.size() == a.cols);
  Vec y(a.rows);
  const auto& ops = kernels::active();
  for (std::size_t i = 0; i < a.rows; ++i)
    y[i] = ops.dot(a.row(i), x.data(), a.cols);
  return y;
}

Vec matvec_transpose(const Matrix& a, const Vec& x) {
  assert(x.size() == a.rows);
  Vec y(a.cols, 0.0);
  const auto& ops = kernels::active();
  for (std::size_t i = 0; i < a.rows; ++i)
    ops.axpy(x[i], a.row(i), y.data(), a.cols);
  return y;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  assert(a.cols == b.rows);
  Matrix c(a.rows, b.cols);
  MutMap(c.data.data(), static_cast<Eigen::Index>(c.rows),
         static_cast<Eigen::Index>(c.cols)) = map_of(a) * map_of(b);
  return c;
}

Matrix gram(const Matrix& a) {
  Matrix c(a.cols, a.cols);
  MutMap(c.data.data(), static_cast<Eigen::Index>(c.rows),
         static_cast<Eigen::Index>(c.cols)) =
      map_of(a).transpose() * map_of(a);
  return c;
}

Matrix gram_rows(const Matrix& a) {
  Matrix c(a.rows, a.rows);
  MutMap(c.data.data(), static_cast<Eigen::Index>(c.rows),
         static_cast<Eigen::Index>(c.cols)) =
      map_of(a) * map_of(a).transpose();
  return c;
}

Matrix add_scaled_identity(const Matrix& a, double shift) {
  assert(a.rows == a.cols);
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows; ++i) out(i, i) += shift;
  return out;
}

SpdFactor SpdFactor::make(const Matrix& spd) {
  if (spd.rows != spd.cols)
    throw InvalidArgumentError("SpdFactor: matrix must be square");
  Eigen::LLT<Eigen::MatrixXd> llt(map_of(spd));
  if (llt.info() != Eigen::Success)
    throw SingularSystemError(
        "SpdFactor: matrix is not numerically positive definite");
  SpdFactor f;
  f.lower_ = Matrix(spd.rows, spd.cols);
  MutMap(f.lower_.data.data(), static_cast<Eigen::Index>(spd.rows),
         static_cast<Eigen::Index>(spd.cols)) = llt.matrixL();
  return f;
}

Vec SpdFactor::solve(const Vec& rhs) const {
  const std::size_t n = dim();
  assert(rhs.size() == n);
  Vec y(rhs);
  // Forward sweep L y = rhs.
  for (std::size_t i = 0; i < n; ++i) {
    double s = y[i];
    const double* li = lower_.row(i);
    s -= kernels::active().dot(li, y.data(), i);
    y[i] = s / li[i];
  }
  // Backward sweep L^T x = y.
  for (std::size_t ip = n; ip-- > 0;) {
    double s = y[ip];
    for (std::size_t j = ip + 1; j < n; ++j) s -= lower_(j, ip) * y[j];
    y[ip] = s / lower_(ip, ip);
  }
  return y;
}

std::vector<double> symmetric_eigenvalues(const Matrix& s) {
  if (s.rows != s.cols)
    throw InvalidArgumentError("symmetric_eigenvalues: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      map_of(s), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw SingularSystemError("symmetric_eigenvalues: eigensolver failed");
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

double spectral_norm(const Matrix& a) {
  if (a.rows == 0 || a.cols == 0) return 0.0;
  const Matrix g = a.rows <= a.cols ? gram_rows(a) : gram(a);
  const auto ev = symmetric_eigenvalues(g);
  const double top = std::max(ev.back(), 0.0);
  return std::sqrt(top);
}

double min_eigenvalue_gram_rows(const Matrix& a) {
  const auto ev = symmetric_eigenvalues(gram_rows(a));
  return std::max(ev.front(), 0.0);
}

Matrix pseudo_inverse(const Matrix& a) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(map_of(a));
  Eigen::MatrixXd pinv = cod.pseudoInverse();
  Matrix out(a.cols, a.rows);
  MutMap(out.data.data(), static_cast<Eigen::Index>(out.rows),
         static_cast<Eigen::Index>(out.cols)) = pinv;
  return out;
}

}  // namespace splitkit
