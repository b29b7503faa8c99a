#include "wavevel/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wavevel/velocities.hpp"

namespace wavevel {

namespace {

void require_dim(std::size_t got, std::size_t want, const char* who) {
  if (got != want) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix q(n);
  // Modified Gram-Schmidt on the columns of a Gaussian matrix.
  for (std::size_t j = 0; j < n; ++j) {
    for (;;) {
      std::vector<double> col(n);
      for (auto& c : col) c = normal(rng);
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q(i, k) * col[i];
        for (std::size_t i = 0; i < n; ++i) col[i] -= dot * q(i, k);
      }
      double norm = 0.0;
      for (double c : col) norm += c * c;
      norm = std::sqrt(norm);
      if (norm < 1e-6) continue;
      for (std::size_t i = 0; i < n; ++i) q(i, j) = col[i] / norm;
      break;
    }
  }
  return q;
}

template <typename Jets>
std::vector<Jet2> pushed_jets(const AnalyticField& field_X, const AffineMap& map,
                              std::span<const std::vector<double>> points_x, double t, Jets& jets_x) {
  require_dim(field_X.dim(), map.dim(), "covariance check");
  std::vector<Jet2> jets_X;
  jets_X.reserve(points_x.size());
  jets_x.reserve(points_x.size());
  for (const auto& x : points_x) {
    require_dim(x.size(), map.dim(), "covariance check");
    jets_X.push_back(analytic_jet2(field_X, map.apply(x), t));
    jets_x.push_back(pullback_jet2(jets_X.back(), map));
  }
  return jets_X;
}

bool usable(const FirstOrderVelocity& v, double max_condition) {
  return v.valid && v.hessian_condition <= max_condition;
}

}  // namespace

AffineMap::AffineMap(Matrix jacobian, std::vector<double> offset) : a_(std::move(jacobian)), b_(std::move(offset)) {
  if (a_.size() == 0) throw std::invalid_argument("AffineMap: empty matrix");
  if (b_.empty()) b_.assign(a_.size(), 0.0);
  require_dim(b_.size(), a_.size(), "AffineMap");
  if (!std::all_of(a_.data().begin(), a_.data().end(), [](double v) { return std::isfinite(v); }) ||
      !std::all_of(b_.begin(), b_.end(), [](double v) { return std::isfinite(v); })) {
    throw std::invalid_argument("AffineMap: non-finite entries");
  }
  det_ = LuFactorization(a_).determinant();
  if (!(std::abs(det_) >= kMinDeterminant)) throw std::invalid_argument("AffineMap: |det A| below 1e-8");
  inv_ = wavevel::inverse(a_);
  const Matrix check = a_ * inv_;
  for (std::size_t i = 0; i < a_.size(); ++i)
    for (std::size_t j = 0; j < a_.size(); ++j) {
      if (std::abs(check(i, j) - (i == j ? 1.0 : 0.0)) > 1e-12) {
        throw std::invalid_argument("AffineMap: matrix too ill-conditioned for an accurate inverse");
      }
    }
}

AffineMap AffineMap::identity(std::size_t dim) { return AffineMap(Matrix::identity(dim), {}); }

AffineMap AffineMap::linear(Matrix jacobian) { return AffineMap(std::move(jacobian), {}); }

AffineMap AffineMap::rotation2d(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double rows[] = {c, -s, s, c};
  return linear(Matrix::from_rows(2, rows));
}

AffineMap AffineMap::mirror(std::size_t dim) {
  Matrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = -1.0;
  return linear(std::move(m));
}

std::vector<double> AffineMap::apply(std::span<const double> x) const {
  require_dim(x.size(), dim(), "AffineMap::apply");
  auto X = multiply(a_, x);
  for (std::size_t i = 0; i < X.size(); ++i) X[i] += b_[i];
  return X;
}

std::vector<double> AffineMap::apply_inverse(std::span<const double> X) const {
  require_dim(X.size(), dim(), "AffineMap::apply_inverse");
  std::vector<double> d(X.begin(), X.end());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= b_[i];
  return multiply(inv_, d);
}

AffineMap AffineMap::inverse() const {
  auto shift = multiply(inv_, b_);
  for (auto& s : shift) s = -s;
  return AffineMap(inv_, std::move(shift));
}

AffineMap random_affine_map(std::size_t dim, double max_condition, std::mt19937_64& rng) {
  if (dim == 0) throw std::invalid_argument("random_affine_map: dim must be positive");
  if (!(max_condition >= 1.0)) throw std::invalid_argument("random_affine_map: max_condition must be >= 1");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  const Matrix u = random_orthogonal(dim, rng);
  const Matrix v = random_orthogonal(dim, rng);
  const double scale = std::exp(std::log(4.0) * (unit(rng) - 0.5));
  Matrix s(dim);
  for (std::size_t i = 0; i < dim; ++i) s(i, i) = scale * std::exp(std::log(max_condition) * unit(rng));
  std::vector<double> b(dim);
  for (auto& x : b) x = normal(rng);
  return AffineMap(u * s * v.transposed(), std::move(b));
}

Jet2 pullback_jet2(const Jet2& jet_X, const AffineMap& map) {
  const std::size_t n = map.dim();
  require_dim(jet_X.dim(), n, "pullback_jet2");
  const Matrix& a = map.jacobian();
  Jet2 out(n);
  out.jet1.psi = jet_X.jet1.psi;
  out.jet1.dpsi_dt = jet_X.jet1.dpsi_dt;
  out.jet1.grad = multiply_transposed(a, jet_X.jet1.grad);
  out.time_mixed = multiply_transposed(a, jet_X.time_mixed);
  // A^T H A, upper triangle only.
  const Matrix h = jet_X.hessian.to_matrix();
  const Matrix ha = h * a;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a(k, i) * ha(k, j);
      out.hessian(i, j) = s;
    }
  return out;
}

std::vector<double> transform_covector(std::span<const double> w_X, const AffineMap& map) {
  require_dim(w_X.size(), map.dim(), "transform_covector");
  return multiply_transposed(map.jacobian(), w_X);
}

std::vector<double> transform_vector(std::span<const double> v_X, const AffineMap& map) {
  require_dim(v_X.size(), map.dim(), "transform_vector");
  return multiply(map.inverse_jacobian(), v_X);
}

namespace {

double term_magnitude(const ZeroOrderVelocity& v0, const FirstOrderVelocity& v1) {
  double m = 0.0;
  for (std::size_t i = 0; i < v0.dim; ++i) m += std::abs(v0.reciprocal[i] * v1.components[i]);
  return m;
}

}  // namespace

double relative_max_deviation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("relative_max_deviation: size mismatch");
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
  const double scale = std::max(max_abs(a), max_abs(b));
  return scale == 0.0 ? diff : diff / scale;
}

CovarianceReport zero_order_deviation(std::span<const Jet2> jets_x, std::span<const Jet2> jets_X,
                                      const AffineMap& map) {
  require_dim(jets_x.size(), jets_X.size(), "zero_order_deviation");
  CovarianceReport r;
  for (std::size_t k = 0; k < jets_x.size(); ++k) {
    if (jets_x[k].jet1.dpsi_dt == 0.0 || jets_X[k].jet1.dpsi_dt == 0.0) {
      ++r.skipped;
      continue;
    }
    const auto direct = zero_order_velocity(jets_x[k].jet1);
    const auto moved = transform_covector(zero_order_velocity(jets_X[k].jet1).reciprocal, map);
    r.max_deviation = std::max(r.max_deviation, relative_max_deviation(direct.reciprocal, moved));
    ++r.checked;
  }
  return r;
}

CovarianceReport first_order_deviation(std::span<const Jet2> jets_x, std::span<const Jet2> jets_X,
                                       const AffineMap& map, double max_condition) {
  require_dim(jets_x.size(), jets_X.size(), "first_order_deviation");
  CovarianceReport r;
  for (std::size_t k = 0; k < jets_x.size(); ++k) {
    const auto direct = first_order_velocity(jets_x[k]);
    const auto upper = first_order_velocity(jets_X[k]);
    if (!usable(direct, max_condition) || !usable(upper, max_condition)) {
      ++r.skipped;
      continue;
    }
    const auto moved = transform_vector(upper.components, map);
    r.max_deviation = std::max(r.max_deviation, relative_max_deviation(direct.components, moved));
    ++r.checked;
  }
  return r;
}

CovarianceReport contraction_deviation(std::span<const Jet2> jets_x, std::span<const Jet2> jets_X,
                                       double max_condition) {
  require_dim(jets_x.size(), jets_X.size(), "contraction_deviation");
  CovarianceReport r;
  for (std::size_t k = 0; k < jets_x.size(); ++k) {
    const auto v1x = first_order_velocity(jets_x[k]);
    const auto v1X = first_order_velocity(jets_X[k]);
    if (jets_x[k].jet1.dpsi_dt == 0.0 || jets_X[k].jet1.dpsi_dt == 0.0 || !usable(v1x, max_condition) ||
        !usable(v1X, max_condition)) {
      ++r.skipped;
      continue;
    }
    const auto v0x = zero_order_velocity(jets_x[k].jet1);
    const auto v0X = zero_order_velocity(jets_X[k].jet1);
    const double sx = contraction_scalar(v0x, v1x);
    const double sX = contraction_scalar(v0X, v1X);
    // Relative to the magnitude of the summed terms, the rounding scale of the sum.
    const double scale = std::max(term_magnitude(v0x, v1x), term_magnitude(v0X, v1X));
    r.max_deviation = std::max(r.max_deviation, scale == 0.0 ? std::abs(sx - sX) : std::abs(sx - sX) / scale);
    ++r.checked;
  }
  return r;
}

CovarianceReport check_zero_order_covariance(const AnalyticField& field_X, const AffineMap& map,
                                             std::span<const std::vector<double>> points_x, double t) {
  std::vector<Jet2> jets_x;
  const auto jets_X = pushed_jets(field_X, map, points_x, t, jets_x);
  return zero_order_deviation(jets_x, jets_X, map);
}

CovarianceReport check_first_order_covariance(const AnalyticField& field_X, const AffineMap& map,
                                              std::span<const std::vector<double>> points_x, double t,
                                              double max_condition) {
  std::vector<Jet2> jets_x;
  const auto jets_X = pushed_jets(field_X, map, points_x, t, jets_x);
  return first_order_deviation(jets_x, jets_X, map, max_condition);
}

CovarianceReport check_contraction_invariance(const AnalyticField& field_X, const AffineMap& map,
                                              std::span<const std::vector<double>> points_x, double t,
                                              double max_condition) {
  std::vector<Jet2> jets_x;
  const auto jets_X = pushed_jets(field_X, map, points_x, t, jets_x);
  return contraction_deviation(jets_x, jets_X, max_condition);
}

}  // namespace wavevel
