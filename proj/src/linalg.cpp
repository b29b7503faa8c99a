#include "wavevel/linalg.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wavevel {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::size_t n, std::span<const double> row_major) {
  if (row_major.size() != n * n) {
    throw std::invalid_argument("Matrix::from_rows: expected n*n entries");
  }
  Matrix m(n);
  std::copy(row_major.begin(), row_major.end(), m.a_.begin());
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.size() != b.size()) throw std::invalid_argument("Matrix product: size mismatch");
  const std::size_t n = a.size();
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
  if (a.size() != x.size()) throw std::invalid_argument("multiply: size mismatch");
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

std::vector<double> multiply_transposed(const Matrix& a, std::span<const double> x) {
  if (a.size() != x.size()) throw std::invalid_argument("multiply_transposed: size mismatch");
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) y[i] += a(j, i) * x[j];
  return y;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

Matrix SymmetricMatrix::to_matrix() const {
  Matrix m(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

SymmetricMatrix SymmetricMatrix::from_upper(const Matrix& m) {
  SymmetricMatrix s(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i; j < m.size(); ++j) s(i, j) = m(i, j);
  return s;
}

double frobenius_norm(const SymmetricMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

LuFactorization::LuFactorization(Matrix a) : lu_(std::move(a)), perm_(lu_.size()) {
  const std::size_t n = lu_.size();
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        p = i;
      }
    }
    if (best == 0.0) {
      singular_ = true;
      continue;
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
      std::swap(perm_[k], perm_[p]);
      sign_ = -sign_;
    }
    const double pivot = lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_(i, k) / pivot;
      lu_(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

double LuFactorization::determinant() const {
  if (singular_) return 0.0;
  double d = sign_;
  for (std::size_t i = 0; i < lu_.size(); ++i) d *= lu_(i, i);
  return d;
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
  const std::size_t n = lu_.size();
  if (b.size() != n) throw std::invalid_argument("LuFactorization::solve: size mismatch");
  if (singular_) throw std::domain_error("LuFactorization::solve: singular matrix");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

Matrix inverse(const Matrix& a) {
  const LuFactorization lu(a);
  if (lu.singular()) throw std::domain_error("inverse: singular matrix");
  const std::size_t n = a.size();
  Matrix inv(n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e.assign(n, 0.0);
    e[j] = 1.0;
    const auto col = lu.solve(e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

double determinant2(double a00, double a01, double a10, double a11) {
  return a00 * a11 - a01 * a10;
}

double determinant3(const Matrix& a) {
  if (a.size() != 3) throw std::invalid_argument("determinant3: expected 3x3");
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

}  // namespace wavevel
