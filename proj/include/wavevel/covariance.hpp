#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "wavevel/field.hpp"
#include "wavevel/linalg.hpp"

namespace wavevel {

/// Coordinate change X = A x + b with A = dX/dx (the Jacobi matrix, rows X, Y, ...
/// and columns x, y, ...). The lower-case frame is the "x-frame", the upper-case
/// image the "X-frame".
class AffineMap {
 public:
  static constexpr double kMinDeterminant = 1e-8;

  /// Throws std::invalid_argument if |det A| < 1e-8, the offset length differs,
  /// or the cached inverse fails A A^-1 = I to 1e-12.
  AffineMap(Matrix jacobian, std::vector<double> offset);

  static AffineMap identity(std::size_t dim);
  static AffineMap linear(Matrix jacobian);
  /// Counter-clockwise rotation of the 2-D plane.
  static AffineMap rotation2d(double angle);
  /// x -> -x
  static AffineMap mirror(std::size_t dim);

  std::size_t dim() const { return a_.size(); }
  const Matrix& jacobian() const { return a_; }
  const Matrix& inverse_jacobian() const { return inv_; }
  const std::vector<double>& offset() const { return b_; }
  double determinant() const { return det_; }

  /// x-frame point -> X-frame point.
  std::vector<double> apply(std::span<const double> x) const;
  /// X-frame point -> x-frame point.
  std::vector<double> apply_inverse(std::span<const double> X) const;
  AffineMap inverse() const;

 private:
  Matrix a_;
  Matrix inv_;
  std::vector<double> b_;
  double det_ = 0.0;
};

/// Random invertible map with 2-norm condition number at most max_condition
/// (orthogonal x diagonal x orthogonal, random reflections included).
AffineMap random_affine_map(std::size_t dim, double max_condition, std::mt19937_64& rng);

/// Re-expresses a jet given in X-frame derivatives as x-frame derivatives by the
/// chain rule: grad_x = A^T grad_X, H_x = A^T H_X A, (psi_t)_x rows = A^T rows.
/// psi and psi_t are unchanged. Exact for affine maps (no second derivatives of
/// the coordinates exist).
Jet2 pullback_jet2(const Jet2& jet_X, const AffineMap& map);

/// w_x = A^T w_X
std::vector<double> transform_covector(std::span<const double> w_X, const AffineMap& map);
/// v_x = A^-1 v_X
std::vector<double> transform_vector(std::span<const double> v_X, const AffineMap& map);

struct CovarianceReport {
  double max_deviation = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
};

/// Points whose Hessian condition (in either frame) exceeds this are skipped by
/// the first-order checks, along with singular ones.
inline constexpr double kDefaultMaxCondition = 1e6;

// Two-path checks. The field is given in the X-frame and evaluated at
// X = map.apply(x) for each x-frame point. Path 1 computes the velocity from the
// pulled-back x-frame jet; path 2 transforms the X-frame velocity with the
// corresponding law.

/// Max relative deviation ||a - b||_inf / max(||a||_inf, ||b||_inf) of the
/// reciprocal 0-PV. Points with psi_t = 0 are skipped.
CovarianceReport check_zero_order_covariance(const AnalyticField& field_X, const AffineMap& map,
                                             std::span<const std::vector<double>> points_x, double t);

/// Same for the 1-PV under the contravariant law.
CovarianceReport check_first_order_covariance(const AnalyticField& field_X, const AffineMap& map,
                                              std::span<const std::vector<double>> points_x, double t,
                                              double max_condition = kDefaultMaxCondition);

/// Max deviation of the contraction scalar between frames, relative to sum_i |w_i v_i|.
CovarianceReport check_contraction_invariance(const AnalyticField& field_X, const AffineMap& map,
                                              std::span<const std::vector<double>> points_x, double t,
                                              double max_condition = kDefaultMaxCondition);

// Jet-level forms of the checks above: jets_x[k] and jets_X[k] describe the same
// physical point in the two frames, however they were obtained.

CovarianceReport zero_order_deviation(std::span<const Jet2> jets_x, std::span<const Jet2> jets_X,
                                      const AffineMap& map);
CovarianceReport first_order_deviation(std::span<const Jet2> jets_x, std::span<const Jet2> jets_X,
                                       const AffineMap& map, double max_condition = kDefaultMaxCondition);
CovarianceReport contraction_deviation(std::span<const Jet2> jets_x, std::span<const Jet2> jets_X,
                                       double max_condition = kDefaultMaxCondition);

/// ||a - b||_inf / max(||a||_inf, ||b||_inf); 0 when both vanish.
double relative_max_deviation(std::span<const double> a, std::span<const double> b);

}  // namespace wavevel
