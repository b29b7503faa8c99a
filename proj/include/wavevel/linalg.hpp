#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace wavevel {

/// Dense square matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::size_t n, std::span<const double> row_major);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const double> data() const { return a_; }

  Matrix transposed() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);

/// y = A x
std::vector<double> multiply(const Matrix& a, std::span<const double> x);
/// y = A^T x
std::vector<double> multiply_transposed(const Matrix& a, std::span<const double> x);

double frobenius_norm(const Matrix& a);

/// Symmetric matrix with packed upper-triangle storage. Both (i,j) and (j,i)
/// address the same slot, so symmetry holds exactly.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n) : n_(n), a_(n * (n + 1) / 2, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[slot(i, j)]; }
  double& operator()(std::size_t i, std::size_t j) { return a_[slot(i, j)]; }
  std::span<const double> packed() const { return a_; }

  Matrix to_matrix() const;
  /// Builds from the upper triangle of a dense matrix; the lower triangle is ignored.
  static SymmetricMatrix from_upper(const Matrix& m);

 private:
  std::size_t slot(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i + 1) / 2 + j;
  }

  std::size_t n_ = 0;
  std::vector<double> a_;
};

double frobenius_norm(const SymmetricMatrix& a);

/// LU factorisation with partial (row) pivoting: P A = L U.
class LuFactorization {
 public:
  explicit LuFactorization(Matrix a);

  /// True when elimination met an exactly zero pivot column.
  bool singular() const { return singular_; }
  double determinant() const;
  std::vector<double> solve(std::span<const double> b) const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  bool singular_ = false;
};

/// Throws std::domain_error for exactly singular input.
Matrix inverse(const Matrix& a);

double determinant2(double a00, double a01, double a10, double a11);
double determinant3(const Matrix& a);

}  // namespace wavevel
