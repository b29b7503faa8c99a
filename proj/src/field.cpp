#include "wavevel/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace wavevel {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void require_finite(std::span<const double> v, const char* what) {
  if (!all_finite(v)) throw std::invalid_argument(std::string(what) + ": non-finite parameter");
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite parameter");
}

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

// d^d/dx^d x^p
double monomial_derivative(double x, int p, int d) {
  if (d > p) return 0.0;
  double f = 1.0;
  for (int i = 0; i < d; ++i) f *= static_cast<double>(p - i);
  return f * ipow(x, p - d);
}

double term_derivative(const Monomial& m, std::span<const double> x, double t, std::span<const int> orders,
                       int time_order) {
  double v = m.coefficient * monomial_derivative(t, m.time_power, time_order);
  for (std::size_t a = 0; a < x.size() && v != 0.0; ++a) v *= monomial_derivative(x[a], m.powers[a], orders[a]);
  return v;
}

void check_point(const AnalyticField& f, std::span<const double> x) {
  if (x.size() != f.dim()) throw std::invalid_argument("analytic field: point dimension mismatch");
  if (!all_finite(x)) throw std::invalid_argument("analytic field: non-finite point");
}

// exp(-|d|^2 / sigma^2) jet with d = x - x0 - c t.
Jet2 gaussian_jet(const AnalyticField::Params& p, std::span<const double> x, double t,
                  std::span<const double> velocity) {
  const std::size_t n = x.size();
  const double s2 = p.sigma * p.sigma;
  std::vector<double> d(n);
  double r2 = 0.0;
  double cd = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = velocity.empty() ? 0.0 : velocity[i];
    d[i] = x[i] - p.center[i] - c * t;
    r2 += d[i] * d[i];
    cd += c * d[i];
  }
  const double psi = p.amplitude * std::exp(-r2 / s2);
  Jet2 jet(n);
  jet.jet1.psi = psi;
  jet.jet1.dpsi_dt = 2.0 * cd / s2 * psi;
  for (std::size_t i = 0; i < n; ++i) {
    jet.jet1.grad[i] = -2.0 * d[i] / s2 * psi;
    for (std::size_t j = i; j < n; ++j) {
      jet.hessian(i, j) = (4.0 * d[i] * d[j] / (s2 * s2) - (i == j ? 2.0 / s2 : 0.0)) * psi;
    }
    const double c = velocity.empty() ? 0.0 : velocity[i];
    jet.time_mixed[i] = 2.0 * c / s2 * psi - 2.0 * d[i] / s2 * jet.jet1.dpsi_dt;
  }
  return jet;
}

Jet2 plane_wave_jet(const AnalyticField::Params& p, std::span<const double> x, double t) {
  const std::size_t n = x.size();
  double theta = p.phase - p.omega * t;
  for (std::size_t i = 0; i < n; ++i) theta += p.wave_vector[i] * x[i];
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const auto& k = p.wave_vector;
  Jet2 jet(n);
  jet.jet1.psi = p.amplitude * s;
  jet.jet1.dpsi_dt = -p.amplitude * p.omega * c;
  for (std::size_t i = 0; i < n; ++i) {
    jet.jet1.grad[i] = p.amplitude * k[i] * c;
    for (std::size_t j = i; j < n; ++j) jet.hessian(i, j) = -p.amplitude * k[i] * k[j] * s;
    jet.time_mixed[i] = p.amplitude * p.omega * k[i] * s;
  }
  return jet;
}

Jet2 ring_jet(const AnalyticField::Params& p, std::span<const double> x, double t) {
  const std::size_t n = x.size();
  std::vector<double> d(n);
  double r2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = x[i] - p.center[i];
    r2 += d[i] * d[i];
  }
  if (r2 == 0.0) throw std::domain_error("expanding ring: derivatives undefined at the center");
  const double r = std::sqrt(r2);
  const double w2 = p.ring_width * p.ring_width;
  const double q = r - p.ring_radius - p.ring_speed * t;
  const double f = p.amplitude * std::exp(-q * q / w2);
  const double fr = -2.0 * q / w2 * f;
  const double frr = (4.0 * q * q / (w2 * w2) - 2.0 / w2) * f;
  Jet2 jet(n);
  jet.jet1.psi = f;
  jet.jet1.dpsi_dt = -p.ring_speed * fr;
  for (std::size_t i = 0; i < n; ++i) {
    const double ni = d[i] / r;
    jet.jet1.grad[i] = fr * ni;
    for (std::size_t j = i; j < n; ++j) {
      const double nj = d[j] / r;
      jet.hessian(i, j) = frr * ni * nj + fr * ((i == j ? 1.0 : 0.0) - ni * nj) / r;
    }
    jet.time_mixed[i] = -p.ring_speed * frr * ni;
  }
  return jet;
}

Jet2 polynomial_jet(const AnalyticField::Params& p, std::span<const double> x, double t) {
  const std::size_t n = x.size();
  Jet2 jet(n);
  std::vector<int> orders(n, 0);
  for (const auto& term : p.terms) {
    std::fill(orders.begin(), orders.end(), 0);
    jet.jet1.psi += term_derivative(term, x, t, orders, 0);
    jet.jet1.dpsi_dt += term_derivative(term, x, t, orders, 1);
    for (std::size_t i = 0; i < n; ++i) {
      orders[i] += 1;
      jet.jet1.grad[i] += term_derivative(term, x, t, orders, 0);
      jet.time_mixed[i] += term_derivative(term, x, t, orders, 1);
      for (std::size_t j = i; j < n; ++j) {
        orders[j] += 1;
        jet.hessian(i, j) += term_derivative(term, x, t, orders, 0);
        orders[j] -= 1;
      }
      orders[i] -= 1;
    }
  }
  return jet;
}

void check_times(std::span<const double> times) {
  if (times.empty()) throw std::invalid_argument("sample: at least one time stamp required");
  require_finite(times, "sample");
  if (times.size() == 1) return;
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw std::invalid_argument("sample: time stamps must be strictly increasing");
  for (std::size_t m = 1; m < times.size(); ++m) {
    const double step = times[m] - times[m - 1];
    if (!(step > 0.0)) throw std::invalid_argument("sample: time stamps must be strictly increasing");
    if (std::abs(step - dt) > 1e-9 * dt) throw std::invalid_argument("sample: time step must be uniform");
  }
}

template <typename Loop>
SampledField sample_impl(const PointFunction& fn, const Grid& grid, std::span<const double> times, Loop loop) {
  check_times(times);
  const std::size_t frames = times.size();
  const std::size_t count = grid.point_count();
  std::vector<double> values(frames * count);
  loop(frames * count, [&](std::size_t k) {
    const std::size_t m = k / count;
    const auto x = grid.point(k % count);
    values[k] = fn(x, times[m]);
  });
  const double dt = frames > 1 ? (times.back() - times.front()) / static_cast<double>(frames - 1) : 0.0;
  return SampledField(grid, times.front(), dt, frames, std::move(values));
}

PointFunction bind(const AnalyticField& field, const Grid& grid) {
  if (field.dim() != grid.dim()) throw std::invalid_argument("sample: field and grid dimensions differ");
  return [&field](std::span<const double> x, double t) { return field.evaluate(x, t); };
}

}  // namespace

Grid::Grid(std::vector<std::size_t> shape, std::vector<double> spacing, std::vector<double> origin)
    : shape_(std::move(shape)), spacing_(std::move(spacing)), origin_(std::move(origin)) {
  if (shape_.empty()) throw std::invalid_argument("grid: dim must be at least 1");
  if (spacing_.size() != shape_.size() || origin_.size() != shape_.size()) {
    throw std::invalid_argument("grid: shape, spacing and origin lengths differ");
  }
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    if (shape_[a] < kMinExtent) throw std::invalid_argument("grid: extent too small (minimum 5)");
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a])) {
      throw std::invalid_argument("grid: spacing must be positive and finite");
    }
    if (!std::isfinite(origin_[a])) throw std::invalid_argument("grid: origin must be finite");
  }
  strides_.assign(shape_.size(), 1);
  for (std::size_t a = shape_.size() - 1; a-- > 0;) strides_[a] = strides_[a + 1] * shape_[a + 1];
  count_ = strides_[0] * shape_[0];
}

std::size_t Grid::linear_index(std::span<const std::size_t> index) const {
  if (index.size() != dim()) throw std::invalid_argument("grid: index dimension mismatch");
  std::size_t k = 0;
  for (std::size_t a = 0; a < dim(); ++a) {
    if (index[a] >= shape_[a]) throw std::out_of_range("grid: index out of range");
    k += index[a] * strides_[a];
  }
  return k;
}

std::vector<std::size_t> Grid::multi_index(std::size_t linear) const {
  std::vector<std::size_t> idx(dim());
  for (std::size_t a = 0; a < dim(); ++a) {
    idx[a] = linear / strides_[a];
    linear %= strides_[a];
  }
  return idx;
}

std::vector<double> Grid::point(std::span<const std::size_t> index) const {
  std::vector<double> x(dim());
  for (std::size_t a = 0; a < dim(); ++a) x[a] = coordinate(a, index[a]);
  return x;
}

std::vector<double> Grid::point(std::size_t linear) const { return point(multi_index(linear)); }

Grid make_grid(std::size_t dim, std::vector<std::size_t> shape, std::vector<double> spacing,
               std::vector<double> origin) {
  if (dim < 1) throw std::invalid_argument("grid: dim must be at least 1");
  if (shape.size() != dim) throw std::invalid_argument("grid: shape length must equal dim");
  return Grid(std::move(shape), std::move(spacing), std::move(origin));
}

SampledField::SampledField(Grid grid, double t0, double dt, std::size_t frames, std::vector<double> values)
    : grid_(std::move(grid)), t0_(t0), dt_(dt), frames_(frames), values_(std::move(values)) {
  if (frames_ == 0) throw std::invalid_argument("sampled field: at least one frame required");
  if (values_.size() != frames_ * grid_.point_count()) {
    throw std::invalid_argument("sampled field: value count does not match frames x grid shape");
  }
  if (!std::isfinite(t0_) || !std::isfinite(dt_)) throw std::invalid_argument("sampled field: non-finite time");
  if (frames_ > 1 && !(dt_ > 0.0)) throw std::invalid_argument("sampled field: dt must be positive");
  if (!all_finite(values_)) throw std::invalid_argument("sampled field: non-finite value");
}

bool Jet1::finite() const { return std::isfinite(psi) && std::isfinite(dpsi_dt) && all_finite(grad); }

Jet2::Jet2(std::size_t dim) : hessian(dim), time_mixed(dim, 0.0) { jet1.grad.assign(dim, 0.0); }

bool Jet2::finite() const { return jet1.finite() && all_finite(hessian.packed()) && all_finite(time_mixed); }

FieldKind parse_field_kind(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '_', '-');
  if (s == "plane-wave") return FieldKind::plane_wave;
  if (s == "translating-gaussian") return FieldKind::translating_gaussian;
  if (s == "expanding-gaussian-ring" || s == "expanding-ring") return FieldKind::expanding_gaussian_ring;
  if (s == "static-gaussian") return FieldKind::static_gaussian;
  if (s == "polynomial") return FieldKind::polynomial;
  throw std::invalid_argument("unknown field kind: " + std::string(name));
}

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::plane_wave: return "plane-wave";
    case FieldKind::translating_gaussian: return "translating-gaussian";
    case FieldKind::expanding_gaussian_ring: return "expanding-gaussian-ring";
    case FieldKind::static_gaussian: return "static-gaussian";
    case FieldKind::polynomial: return "polynomial";
  }
  throw std::invalid_argument("unknown field kind");
}

AnalyticField::AnalyticField(FieldKind kind, std::size_t dim, Params params)
    : kind_(kind), dim_(dim), params_(std::move(params)) {
  if (dim_ < 1) throw std::invalid_argument("analytic field: dim must be at least 1");
  require_finite(params_.amplitude, "analytic field");
}

AnalyticField AnalyticField::plane_wave(std::vector<double> wave_vector, double omega, double phase,
                                        double amplitude) {
  require_finite(wave_vector, "plane-wave");
  require_finite(omega, "plane-wave");
  require_finite(phase, "plane-wave");
  double k2 = 0.0;
  for (double k : wave_vector) k2 += k * k;
  if (!(k2 > 0.0)) throw std::invalid_argument("plane-wave: |k| must be positive");
  Params p;
  p.amplitude = amplitude;
  p.wave_vector = std::move(wave_vector);
  p.omega = omega;
  p.phase = phase;
  const std::size_t n = p.wave_vector.size();
  return AnalyticField(FieldKind::plane_wave, n, std::move(p));
}

AnalyticField AnalyticField::translating_gaussian(std::vector<double> velocity, double sigma,
                                                  std::vector<double> center, double amplitude) {
  require_finite(velocity, "translating-gaussian");
  require_finite(center, "translating-gaussian");
  require_finite(sigma, "translating-gaussian");
  if (!(sigma > 0.0)) throw std::invalid_argument("translating-gaussian: sigma must be positive");
  if (center.empty()) center.assign(velocity.size(), 0.0);
  if (center.size() != velocity.size()) throw std::invalid_argument("translating-gaussian: dimension mismatch");
  Params p;
  p.amplitude = amplitude;
  p.velocity = std::move(velocity);
  p.center = std::move(center);
  p.sigma = sigma;
  const std::size_t n = p.velocity.size();
  return AnalyticField(FieldKind::translating_gaussian, n, std::move(p));
}

AnalyticField AnalyticField::static_gaussian(std::vector<double> center, double sigma, double amplitude) {
  require_finite(center, "static-gaussian");
  require_finite(sigma, "static-gaussian");
  if (!(sigma > 0.0)) throw std::invalid_argument("static-gaussian: sigma must be positive");
  Params p;
  p.amplitude = amplitude;
  p.center = std::move(center);
  p.sigma = sigma;
  const std::size_t n = p.center.size();
  return AnalyticField(FieldKind::static_gaussian, n, std::move(p));
}

AnalyticField AnalyticField::expanding_ring(std::vector<double> center, double radius, double speed, double width,
                                            double amplitude) {
  require_finite(center, "expanding-gaussian-ring");
  require_finite(radius, "expanding-gaussian-ring");
  require_finite(speed, "expanding-gaussian-ring");
  require_finite(width, "expanding-gaussian-ring");
  if (!(width > 0.0)) throw std::invalid_argument("expanding-gaussian-ring: width must be positive");
  Params p;
  p.amplitude = amplitude;
  p.center = std::move(center);
  p.ring_radius = radius;
  p.ring_speed = speed;
  p.ring_width = width;
  const std::size_t n = p.center.size();
  return AnalyticField(FieldKind::expanding_gaussian_ring, n, std::move(p));
}

AnalyticField AnalyticField::polynomial(std::size_t dim, std::vector<Monomial> terms) {
  for (const auto& m : terms) {
    require_finite(m.coefficient, "polynomial");
    if (m.powers.size() != dim) throw std::invalid_argument("polynomial: monomial dimension mismatch");
    if (m.time_power < 0 || std::any_of(m.powers.begin(), m.powers.end(), [](int q) { return q < 0; })) {
      throw std::invalid_argument("polynomial: negative exponent");
    }
  }
  Params p;
  p.terms = std::move(terms);
  return AnalyticField(FieldKind::polynomial, dim, std::move(p));
}

std::vector<double> AnalyticField::translation_velocity() const {
  if (kind_ == FieldKind::translating_gaussian) return params_.velocity;
  if (kind_ == FieldKind::static_gaussian) return std::vector<double>(dim_, 0.0);
  return {};
}

double AnalyticField::evaluate(std::span<const double> x, double t) const {
  check_point(*this, x);
  const auto& p = params_;
  switch (kind_) {
    case FieldKind::plane_wave: {
      double theta = p.phase - p.omega * t;
      for (std::size_t i = 0; i < dim_; ++i) theta += p.wave_vector[i] * x[i];
      return p.amplitude * std::sin(theta);
    }
    case FieldKind::translating_gaussian:
    case FieldKind::static_gaussian: {
      double r2 = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        const double c = p.velocity.empty() ? 0.0 : p.velocity[i];
        const double d = x[i] - p.center[i] - c * t;
        r2 += d * d;
      }
      return p.amplitude * std::exp(-r2 / (p.sigma * p.sigma));
    }
    case FieldKind::expanding_gaussian_ring: {
      double r2 = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        const double d = x[i] - p.center[i];
        r2 += d * d;
      }
      const double q = std::sqrt(r2) - p.ring_radius - p.ring_speed * t;
      return p.amplitude * std::exp(-q * q / (p.ring_width * p.ring_width));
    }
    case FieldKind::polynomial: {
      std::vector<int> orders(dim_, 0);
      double v = 0.0;
      for (const auto& term : p.terms) v += term_derivative(term, x, t, orders, 0);
      return v;
    }
  }
  throw std::invalid_argument("unknown field kind");
}

Jet2 analytic_jet2(const AnalyticField& field, std::span<const double> point, double t) {
  check_point(field, point);
  const auto& p = field.params();
  switch (field.kind()) {
    case FieldKind::plane_wave: return plane_wave_jet(p, point, t);
    case FieldKind::translating_gaussian: return gaussian_jet(p, point, t, p.velocity);
    case FieldKind::static_gaussian: return gaussian_jet(p, point, t, {});
    case FieldKind::expanding_gaussian_ring: return ring_jet(p, point, t);
    case FieldKind::polynomial: return polynomial_jet(p, point, t);
  }
  throw std::invalid_argument("unknown field kind");
}

std::vector<double> uniform_times(double t0, double dt, std::size_t frames) {
  std::vector<double> t(frames);
  for (std::size_t m = 0; m < frames; ++m) t[m] = t0 + static_cast<double>(m) * dt;
  return t;
}

SampledField sample_function(const PointFunction& fn, const Grid& grid, std::span<const double> times) {
  return sample_impl(fn, grid, times, [](std::size_t n, auto&& body) { detail::parallel_for(n, body); });
}

SampledField sample(const AnalyticField& field, const Grid& grid, std::span<const double> times) {
  return wavevel::sample_function(bind(field, grid), grid, times);
}

namespace reference {

SampledField sample_function(const PointFunction& fn, const Grid& grid, std::span<const double> times) {
  return sample_impl(fn, grid, times, [](std::size_t n, auto&& body) { detail::serial_for(n, body); });
}

SampledField sample(const AnalyticField& field, const Grid& grid, std::span<const double> times) {
  return reference::sample_function(bind(field, grid), grid, times);
}

}  // namespace reference

}  // namespace wavevel
