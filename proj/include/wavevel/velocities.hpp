#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "wavevel/differentiation.hpp"
#include "wavevel/field.hpp"

namespace wavevel {

/// A 1-PV is reported invalid when |det H| <= kSingularityTolerance * ||H||_F^N.
inline constexpr double kSingularityTolerance = 1e-10;

/// Velocity of a fixed field value psi = psi_0 (0-PV).
///
/// `reciprocal` is the primary representation: w_i = -N psi_{x_i} / psi_t,
/// finite whenever psi_t != 0 and the quantity that transforms as a covector.
/// `components` are v_i = -(1/N) psi_t / psi_{x_i}; a zero gradient entry with
/// psi_t != 0 gives an infinite component whose sign is that of -psi_t (the
/// gradient entry is read as +0). Only the reciprocal is meaningful there.
///
/// With psi_t = 0 every component is 0 and the reciprocal is undefined
/// (`reciprocal_defined` is false; its entries are +-inf or NaN).
struct ZeroOrderVelocity {
  std::size_t dim = 0;
  std::vector<double> reciprocal;
  std::vector<double> components;
  bool reciprocal_defined = true;
};

/// Velocity of a point with fixed spatial gradient (1-PV): H v = -d/dt grad psi.
/// When `valid` is false the components are quiet NaNs and must not be used.
struct FirstOrderVelocity {
  std::size_t dim = 0;
  std::vector<double> components;
  bool valid = false;
  /// ||H||_F^N / |det H|; +inf for an exactly singular Hessian.
  double hessian_condition = 0.0;
};

/// psi = level
struct LevelSet {
  double level = 0.0;
};

/// grad psi = targets (peaks, troughs and saddles for targets = 0). The
/// velocity formulas never read the target values; tracking does.
struct GradientSet {
  std::vector<double> targets;
};

using AttributeSpec = std::variant<LevelSet, GradientSet>;

/// Throws StationaryDegenerate when psi_t = 0 and grad psi = 0,
/// std::invalid_argument when dim differs from the jet or the jet is not finite.
ZeroOrderVelocity zero_order_velocity(const Jet1& jet, std::size_t dim);
ZeroOrderVelocity zero_order_velocity(const Jet1& jet);

/// Cramer's rule on the 2x2 Hessian system.
FirstOrderVelocity first_order_velocity_2d(const Jet2& jet);
/// Ratios D_x / D, D_y / D, D_z / D of 3x3 determinants.
FirstOrderVelocity first_order_velocity_3d(const Jet2& jet);
/// Partial-pivoting LU solve for any N >= 1.
FirstOrderVelocity first_order_velocity_nd(const Jet2& jet);
/// Cramer forms for N = 2, 3; the pivoted solve otherwise.
FirstOrderVelocity first_order_velocity(const Jet2& jet);

/// sum_i w_i v_i, dimensionless. Throws UndefinedContraction when v1 is invalid
/// or v0 came from a jet with psi_t = 0.
double contraction_scalar(const ZeroOrderVelocity& v0, const FirstOrderVelocity& v1);

/// Pointwise velocities over a JetField. Components are point-major
/// (N consecutive entries per grid point). Invalid points hold NaN.
struct VelocityField {
  Grid grid;
  int order = 0;
  std::vector<double> components;
  std::vector<double> reciprocal;         // order 0 only
  std::vector<double> hessian_condition;  // order 1 only
  std::vector<std::uint8_t> valid;

  std::size_t dim() const { return grid.dim(); }
  std::size_t valid_count() const;
};

/// order 0: invalid where the jet is invalid or stationary-degenerate;
/// `reciprocal` holds NaN at valid points with psi_t = 0.
/// order 1: invalid where the jet is invalid or the Hessian is singular.
VelocityField velocity_field(const JetField& jets, int order);

struct ScalarField {
  Grid grid;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;

  std::size_t valid_count() const;
};

/// Contraction scalar at every point where both velocities are defined.
ScalarField contraction_field(const JetField& jets);

namespace reference {
VelocityField velocity_field(const JetField& jets, int order);
ScalarField contraction_field(const JetField& jets);
}  // namespace reference

}  // namespace wavevel
