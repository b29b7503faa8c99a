#include "wavevel/velocities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "parallel.hpp"
#include "wavevel/errors.hpp"

namespace wavevel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

FirstOrderVelocity invalid_velocity(std::size_t n, double condition) {
  return FirstOrderVelocity{n, std::vector<double>(n, kNaN), false, condition};
}

// Applies the scale-invariant singularity rule and packages the result.
FirstOrderVelocity finish(const Jet2& jet, double det, std::vector<double> components) {
  const std::size_t n = jet.dim();
  const double scale = std::pow(frobenius_norm(jet.hessian), static_cast<double>(n));
  const double condition = det == 0.0 ? kInf : scale / std::abs(det);
  if (!std::isfinite(det) || std::abs(det) <= kSingularityTolerance * scale) return invalid_velocity(n, condition);
  if (!std::all_of(components.begin(), components.end(), [](double v) { return std::isfinite(v); })) {
    return invalid_velocity(n, condition);
  }
  return FirstOrderVelocity{n, std::move(components), true, condition};
}

void require_dim(const Jet2& jet, std::size_t n, const char* who) {
  if (jet.dim() != n) throw std::invalid_argument(std::string(who) + ": wrong jet dimension");
}

template <typename Loop>
VelocityField velocity_field_impl(const JetField& jets, int order, Loop loop) {
  if (order != 0 && order != 1) throw std::invalid_argument("velocity_field: order must be 0 or 1");
  const std::size_t n = jets.grid.dim();
  const std::size_t count = jets.grid.point_count();
  VelocityField out;
  out.grid = jets.grid;
  out.order = order;
  out.components.assign(count * n, kNaN);
  if (order == 0) out.reciprocal.assign(count * n, kNaN);
  if (order == 1) out.hessian_condition.assign(count, kNaN);
  out.valid.assign(count, 0);
  loop(count, [&](std::size_t k) {
    if (!jets.valid_mask[k]) return;
    const Jet2& jet = jets.jets[k];
    if (order == 0) {
      const Jet1& j1 = jet.jet1;
      const bool degenerate =
          j1.dpsi_dt == 0.0 && std::all_of(j1.grad.begin(), j1.grad.end(), [](double g) { return g == 0.0; });
      if (degenerate) return;
      const auto v0 = zero_order_velocity(j1, n);
      std::copy(v0.components.begin(), v0.components.end(), out.components.begin() + k * n);
      if (v0.reciprocal_defined) std::copy(v0.reciprocal.begin(), v0.reciprocal.end(), out.reciprocal.begin() + k * n);
      out.valid[k] = 1;
    } else {
      const auto v1 = first_order_velocity(jet);
      out.hessian_condition[k] = v1.hessian_condition;
      if (!v1.valid) return;
      std::copy(v1.components.begin(), v1.components.end(), out.components.begin() + k * n);
      out.valid[k] = 1;
    }
  });
  return out;
}

template <typename Loop>
ScalarField contraction_field_impl(const JetField& jets, Loop loop) {
  const std::size_t count = jets.grid.point_count();
  ScalarField out;
  out.grid = jets.grid;
  out.values.assign(count, kNaN);
  out.valid.assign(count, 0);
  loop(count, [&](std::size_t k) {
    if (!jets.valid_mask[k]) return;
    const Jet2& jet = jets.jets[k];
    if (jet.jet1.dpsi_dt == 0.0) return;
    const auto v1 = first_order_velocity(jet);
    if (!v1.valid) return;
    out.values[k] = contraction_scalar(zero_order_velocity(jet.jet1), v1);
    out.valid[k] = 1;
  });
  return out;
}

std::size_t count_valid(const std::vector<std::uint8_t>& mask) {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

}  // namespace

ZeroOrderVelocity zero_order_velocity(const Jet1& jet, std::size_t dim) {
  if (dim != jet.dim() || dim == 0) throw std::invalid_argument("zero_order_velocity: dim must equal the gradient length");
  if (!jet.finite()) throw std::invalid_argument("zero_order_velocity: non-finite jet");
  const double psi_t = jet.dpsi_dt;
  const bool flat = std::all_of(jet.grad.begin(), jet.grad.end(), [](double g) { return g == 0.0; });
  if (psi_t == 0.0 && flat) {
    throw StationaryDegenerate("zero_order_velocity: psi_t = 0 and grad psi = 0, the level condition is vacuous");
  }
  const auto nd = static_cast<double>(dim);
  ZeroOrderVelocity v{dim, std::vector<double>(dim), std::vector<double>(dim), psi_t != 0.0};
  for (std::size_t i = 0; i < dim; ++i) {
    const double g = jet.grad[i];
    if (psi_t != 0.0) {
      v.reciprocal[i] = -nd * g / psi_t;
      v.components[i] = g != 0.0 ? -psi_t / (nd * g) : std::copysign(kInf, -psi_t);
    } else {
      v.reciprocal[i] = g != 0.0 ? std::copysign(kInf, -g) : kNaN;
      v.components[i] = 0.0;
    }
  }
  return v;
}

ZeroOrderVelocity zero_order_velocity(const Jet1& jet) { return zero_order_velocity(jet, jet.dim()); }

FirstOrderVelocity first_order_velocity_2d(const Jet2& jet) {
  require_dim(jet, 2, "first_order_velocity_2d");
  const auto& h = jet.hessian;
  const double a = h(0, 0);
  const double b = h(0, 1);
  const double c = h(1, 1);
  const double p = jet.time_mixed[0];
  const double q = jet.time_mixed[1];
  const double det = determinant2(a, b, b, c);
  std::vector<double> v{(b * q - c * p) / det, (b * p - a * q) / det};
  return finish(jet, det, std::move(v));
}

FirstOrderVelocity first_order_velocity_3d(const Jet2& jet) {
  require_dim(jet, 3, "first_order_velocity_3d");
  const Matrix h = jet.hessian.to_matrix();
  const double det = determinant3(h);
  std::vector<double> v(3);
  for (std::size_t col = 0; col < 3; ++col) {
    Matrix replaced = h;
    for (std::size_t row = 0; row < 3; ++row) replaced(row, col) = -jet.time_mixed[row];
    v[col] = determinant3(replaced) / det;
  }
  return finish(jet, det, std::move(v));
}

FirstOrderVelocity first_order_velocity_nd(const Jet2& jet) {
  const std::size_t n = jet.dim();
  if (n == 0) throw std::invalid_argument("first_order_velocity_nd: empty jet");
  const LuFactorization lu(jet.hessian.to_matrix());
  const double det = lu.determinant();
  if (lu.singular()) return finish(jet, 0.0, std::vector<double>(n, kNaN));
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -jet.time_mixed[i];
  return finish(jet, det, lu.solve(rhs));
}

FirstOrderVelocity first_order_velocity(const Jet2& jet) {
  switch (jet.dim()) {
    case 2: return first_order_velocity_2d(jet);
    case 3: return first_order_velocity_3d(jet);
    default: return first_order_velocity_nd(jet);
  }
}

double contraction_scalar(const ZeroOrderVelocity& v0, const FirstOrderVelocity& v1) {
  if (v0.dim != v1.dim) throw std::invalid_argument("contraction_scalar: dimension mismatch");
  if (!v1.valid) throw UndefinedContraction("contraction_scalar: first-order velocity is invalid");
  if (!v0.reciprocal_defined) throw UndefinedContraction("contraction_scalar: psi_t = 0, reciprocal 0-PV undefined");
  double s = 0.0;
  for (std::size_t i = 0; i < v0.dim; ++i) s += v0.reciprocal[i] * v1.components[i];
  return s;
}

std::size_t VelocityField::valid_count() const { return count_valid(valid); }
std::size_t ScalarField::valid_count() const { return count_valid(valid); }

VelocityField velocity_field(const JetField& jets, int order) {
  return velocity_field_impl(jets, order, [](std::size_t n, auto&& body) { detail::parallel_for(n, body); });
}

ScalarField contraction_field(const JetField& jets) {
  return contraction_field_impl(jets, [](std::size_t n, auto&& body) { detail::parallel_for(n, body); });
}

namespace reference {

VelocityField velocity_field(const JetField& jets, int order) {
  return velocity_field_impl(jets, order, [](std::size_t n, auto&& body) { detail::serial_for(n, body); });
}

ScalarField contraction_field(const JetField& jets) {
  return contraction_field_impl(jets, [](std::size_t n, auto&& body) { detail::serial_for(n, body); });
}

}  // namespace reference

}  // namespace wavevel
