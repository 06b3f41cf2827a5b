// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#ifndef SPLITKIT_LINALG_HPP_
#define SPLITKIT_LINALG_HPP_

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "splitkit/vec.hpp"

// Small dense matrices and the factorizations the proximal catalog needs.
// Problems here are desk scale (n up to a few hundred), so everything is
// dense and factorizations are built eagerly and cached by their owners.

namespace splitkit {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) {
    assert(i < rows && j < cols);
    return data[i * cols + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    assert(i < rows && j < cols);
    return data[i * cols + j];
  }

  const double* row(std::size_t i) const { return data.data() + i * cols; }
  double* row(std::size_t i) { return data.data() + i * cols; }

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
};

// y = A x
Vec matvec(const Matrix& a, const Vec& x);
// y = A^T x
Vec matvec_transpose(const Matrix& a, const Vec& x);

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
// A^T A
Matrix gram(const Matrix& a);
// A A^T
Matrix gram_rows(const Matrix& a);
Matrix add_scaled_identity(const Matrix& a, double shift);

// Cholesky factorization of a symmetric positive definite matrix.
// Throws SingularSystemError when the matrix is not numerically SPD.
class SpdFactor {
 public:
  static SpdFactor make(const Matrix& spd);

  Vec solve(const Vec& rhs) const;
  const Matrix& lower() const { return lower_; }
  std::size_t dim() const { return lower_.rows; }

 private:
  Matrix lower_;
};

// Eigenvalues of a symmetric matrix, ascending.
std::vector<double> symmetric_eigenvalues(const Matrix& s);

// Largest singular value.
double spectral_norm(const Matrix& a);

// Smallest eigenvalue of A A^T (clamped at zero); the strong monotonicity
// modulus of the row range.
double min_eigenvalue_gram_rows(const Matrix& a);

// Moore-Penrose pseudoinverse via a rank-revealing decomposition.
Matrix pseudo_inverse(const Matrix& a);

}  // namespace splitkit

#endif  // SPLITKIT_LINALG_HPP_
