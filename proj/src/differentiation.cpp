#include "wavevel/differentiation.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "parallel.hpp"
#include "wavevel/errors.hpp"

namespace wavevel {

namespace {

const std::vector<double>& central_weights(int derivative, int order) {
  static const std::vector<double> d1o2{-0.5, 0.0, 0.5};
  static const std::vector<double> d2o2{1.0, -2.0, 1.0};
  static const std::vector<double> d1o4{1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0};
  static const std::vector<double> d2o4{-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0};
  if (order == 2) return derivative == 1 ? d1o2 : d2o2;
  return derivative == 1 ? d1o4 : d2o4;
}

// Evaluates one frame of one field at a node displaced from a base linear index.
class NodeAccess {
 public:
  NodeAccess(const SampledField& field, std::span<const std::size_t> index)
      : field_(field), grid_(field.grid()), index_(index.begin(), index.end()) {
    base_ = grid_.linear_index(index_);
  }

  std::size_t index(std::size_t axis) const { return index_[axis]; }

  double value(std::size_t frame, std::ptrdiff_t linear_shift) const {
    return field_.at(frame, static_cast<std::size_t>(static_cast<std::ptrdiff_t>(base_) + linear_shift));
  }

  std::ptrdiff_t shift(std::size_t axis, int steps) const {
    return static_cast<std::ptrdiff_t>(grid_.stride(axis)) * steps;
  }

 private:
  const SampledField& field_;
  const Grid& grid_;
  std::vector<std::size_t> index_;
  std::size_t base_ = 0;
};

struct FrameStencil {
  std::size_t frame = 0;
  Stencil1D time;
};

void check_frames(const SampledField& field, std::size_t frame, const StencilSpec& spec) {
  validate(spec);
  if (frame >= field.frames()) throw std::out_of_range("fd: frame out of range");
  if (field.frames() < static_cast<std::size_t>(spec.order) + 1) {
    throw InsufficientFrames("fd: order-" + std::to_string(spec.order) + " time derivatives need at least " +
                             std::to_string(spec.order + 1) + " frames, field has " +
                             std::to_string(field.frames()));
  }
}

std::optional<FrameStencil> time_stencil(const SampledField& field, std::size_t frame, const StencilSpec& spec) {
  auto st = derivative_stencil(1, frame, field.frames(), spec.order, spec.boundary);
  if (!st) return std::nullopt;
  return FrameStencil{frame, std::move(*st)};
}

// sum_k w_k psi(frame, node + (offset + k) e_axis), divided by h.
double first_derivative(const NodeAccess& at, std::size_t frame, std::ptrdiff_t base_shift, std::size_t axis,
                        const Stencil1D& st, double h) {
  double s = 0.0;
  for (std::size_t k = 0; k < st.weights.size(); ++k) {
    if (st.weights[k] == 0.0) continue;
    s += st.weights[k] * at.value(frame, base_shift + at.shift(axis, st.offset + static_cast<int>(k)));
  }
  return s / h;
}

// sum over m of w_m * psi(frame + offset + m, node + base_shift), divided by dt.
double time_derivative(const NodeAccess& at, const FrameStencil& ts, std::ptrdiff_t base_shift, double dt) {
  double s = 0.0;
  for (std::size_t m = 0; m < ts.time.weights.size(); ++m) {
    if (ts.time.weights[m] == 0.0) continue;
    const auto f = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(ts.frame) + ts.time.offset +
                                            static_cast<std::ptrdiff_t>(m));
    s += ts.time.weights[m] * at.value(f, base_shift);
  }
  return s / dt;
}

double mixed_space_time(const NodeAccess& at, const FrameStencil& ts, std::size_t axis, const Stencil1D& sx,
                        double h, double dt, CompositionOrder composition) {
  if (composition == CompositionOrder::space_then_time) {
    double s = 0.0;
    for (std::size_t m = 0; m < ts.time.weights.size(); ++m) {
      if (ts.time.weights[m] == 0.0) continue;
      const auto f = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(ts.frame) + ts.time.offset +
                                              static_cast<std::ptrdiff_t>(m));
      s += ts.time.weights[m] * first_derivative(at, f, 0, axis, sx, h);
    }
    return s / dt;
  }
  double s = 0.0;
  for (std::size_t k = 0; k < sx.weights.size(); ++k) {
    if (sx.weights[k] == 0.0) continue;
    s += sx.weights[k] * time_derivative(at, ts, at.shift(axis, sx.offset + static_cast<int>(k)), dt);
  }
  return s / h;
}

template <typename Loop>
JetField jet_field_impl(const SampledField& field, std::size_t frame, const StencilSpec& spec, Loop loop) {
  check_frames(field, frame, spec);
  const Grid& grid = field.grid();
  JetField out;
  out.grid = grid;
  out.t_index = frame;
  out.time = field.time(frame);
  out.jets.assign(grid.point_count(), Jet2(grid.dim()));
  out.valid_mask.assign(grid.point_count(), 0);
  loop(grid.point_count(), [&](std::size_t k) {
    const auto idx = grid.multi_index(k);
    if (auto jet = fd_jet2_at(field, frame, idx, spec)) {
      out.jets[k] = std::move(*jet);
      out.valid_mask[k] = 1;
    }
  });
  return out;
}

}  // namespace

void validate(const StencilSpec& spec) {
  if (spec.order != 2 && spec.order != 4) throw std::invalid_argument("stencil order must be 2 or 4");
}

std::size_t stencil_half_width(const StencilSpec& spec) {
  validate(spec);
  const auto hw = static_cast<std::size_t>(spec.order / 2);
  return spec.hessian == HessianScheme::composed ? 2 * hw : hw;
}

std::vector<double> fornberg_weights(std::span<const int> offsets, int derivative) {
  const std::size_t n = offsets.size();
  if (n == 0 || derivative < 0 || static_cast<std::size_t>(derivative) >= n) {
    throw std::invalid_argument("fornberg_weights: need more nodes than the derivative order");
  }
  const auto m = static_cast<std::size_t>(derivative);
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = offsets[0];
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = offsets[i];
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = static_cast<double>(offsets[i] - offsets[j]);
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = c[j][m];
  return w;
}

std::optional<Stencil1D> derivative_stencil(int derivative, std::size_t i, std::size_t n, int order,
                                            Boundary boundary) {
  if (derivative != 1 && derivative != 2) throw std::invalid_argument("derivative_stencil: derivative must be 1 or 2");
  if (order != 2 && order != 4) throw std::invalid_argument("derivative_stencil: order must be 2 or 4");
  if (i >= n) throw std::out_of_range("derivative_stencil: node out of range");
  const int hw = order / 2;
  const auto ii = static_cast<int>(i);
  const auto nn = static_cast<int>(n);
  if (ii - hw >= 0 && ii + hw <= nn - 1) return Stencil1D{-hw, central_weights(derivative, order)};
  if (boundary == Boundary::shrink_to_valid) return std::nullopt;
  // Off-centre windows need one extra node for second derivatives to keep the order.
  const int width = std::min(order + derivative, nn);
  if (width <= derivative) throw std::invalid_argument("derivative_stencil: axis too short");
  const int start = std::clamp(ii - hw, 0, nn - width);
  std::vector<int> offsets(static_cast<std::size_t>(width));
  std::iota(offsets.begin(), offsets.end(), start - ii);
  return Stencil1D{start - ii, fornberg_weights(offsets, derivative)};
}

std::optional<Jet2> fd_jet2_at(const SampledField& field, std::size_t frame, std::span<const std::size_t> index,
                               const StencilSpec& spec) {
  check_frames(field, frame, spec);
  const Grid& grid = field.grid();
  const std::size_t n = grid.dim();
  const NodeAccess at(field, index);  // validates index

  const auto ts = time_stencil(field, frame, spec);
  if (!ts) return std::nullopt;

  std::vector<Stencil1D> d1(n);
  for (std::size_t a = 0; a < n; ++a) {
    auto st = derivative_stencil(1, index[a], grid.extent(a), spec.order, spec.boundary);
    if (!st) return std::nullopt;
    d1[a] = std::move(*st);
  }

  Jet2 jet(n);
  jet.jet1.psi = at.value(frame, 0);
  jet.jet1.dpsi_dt = time_derivative(at, *ts, 0, field.dt());

  for (std::size_t a = 0; a < n; ++a) {
    const double h = grid.spacing()[a];
    jet.jet1.grad[a] = first_derivative(at, frame, 0, a, d1[a], h);
    jet.time_mixed[a] = mixed_space_time(at, *ts, a, d1[a], h, field.dt(), CompositionOrder::space_then_time);

    if (spec.hessian == HessianScheme::compact) {
      const auto d2 = derivative_stencil(2, index[a], grid.extent(a), spec.order, spec.boundary);
      if (!d2) return std::nullopt;
      double s = 0.0;
      for (std::size_t k = 0; k < d2->weights.size(); ++k) {
        s += d2->weights[k] * at.value(frame, at.shift(a, d2->offset + static_cast<int>(k)));
      }
      jet.hessian(a, a) = s / (h * h);
    } else {
      double s = 0.0;
      for (std::size_t k = 0; k < d1[a].weights.size(); ++k) {
        if (d1[a].weights[k] == 0.0) continue;
        const int step = d1[a].offset + static_cast<int>(k);
        const auto node = static_cast<std::size_t>(static_cast<int>(index[a]) + step);
        const auto inner = derivative_stencil(1, node, grid.extent(a), spec.order, spec.boundary);
        if (!inner) return std::nullopt;
        s += d1[a].weights[k] * first_derivative(at, frame, at.shift(a, step), a, *inner, h);
      }
      jet.hessian(a, a) = s / h;
    }

    for (std::size_t b = a + 1; b < n; ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < d1[a].weights.size(); ++k) {
        const double wa = d1[a].weights[k];
        if (wa == 0.0) continue;
        const auto sa = at.shift(a, d1[a].offset + static_cast<int>(k));
        double inner = 0.0;
        for (std::size_t l = 0; l < d1[b].weights.size(); ++l) {
          if (d1[b].weights[l] == 0.0) continue;
          inner += d1[b].weights[l] * at.value(frame, sa + at.shift(b, d1[b].offset + static_cast<int>(l)));
        }
        s += wa * inner;
      }
      jet.hessian(a, b) = s / (h * grid.spacing()[b]);
    }
  }
  return jet;
}

std::optional<double> fd_time_mixed_at(const SampledField& field, std::size_t frame,
                                       std::span<const std::size_t> index, std::size_t axis,
                                       const StencilSpec& spec, CompositionOrder composition) {
  check_frames(field, frame, spec);
  const Grid& grid = field.grid();
  if (axis >= grid.dim()) throw std::out_of_range("fd: axis out of range");
  const NodeAccess at(field, index);
  const auto ts = time_stencil(field, frame, spec);
  if (!ts) return std::nullopt;
  const auto sx = derivative_stencil(1, index[axis], grid.extent(axis), spec.order, spec.boundary);
  if (!sx) return std::nullopt;
  return mixed_space_time(at, *ts, axis, *sx, grid.spacing()[axis], field.dt(), composition);
}

std::size_t JetField::valid_count() const {
  return static_cast<std::size_t>(std::count(valid_mask.begin(), valid_mask.end(), std::uint8_t{1}));
}

JetField fd_jet_field(const SampledField& field, std::size_t frame, const StencilSpec& spec) {
  return jet_field_impl(field, frame, spec, [](std::size_t n, auto&& body) { detail::parallel_for(n, body); });
}

JetField analytic_jet_field(const AnalyticField& field, const Grid& grid, double t) {
  if (field.dim() != grid.dim()) throw std::invalid_argument("analytic_jet_field: dimension mismatch");
  JetField out;
  out.grid = grid;
  out.time = t;
  out.jets.assign(grid.point_count(), Jet2(grid.dim()));
  out.valid_mask.assign(grid.point_count(), 1);
  detail::parallel_for(grid.point_count(),
                       [&](std::size_t k) { out.jets[k] = analytic_jet2(field, grid.point(k), t); });
  return out;
}

namespace reference {

JetField fd_jet_field(const SampledField& field, std::size_t frame, const StencilSpec& spec) {
  return jet_field_impl(field, frame, spec, [](std::size_t n, auto&& body) { detail::serial_for(n, body); });
}

}  // namespace reference

}  // namespace wavevel
