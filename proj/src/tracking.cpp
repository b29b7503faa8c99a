#include "wavevel/tracking.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wavevel/covariance.hpp"
#include "wavevel/errors.hpp"

namespace wavevel {

namespace {

constexpr std::size_t kSupport = 4;

// Lagrange basis on nodes 0..3 evaluated at s.
std::array<double, kSupport> cubic_weights(double s) {
  std::array<double, kSupport> w{};
  for (std::size_t j = 0; j < kSupport; ++j) {
    double l = 1.0;
    for (std::size_t m = 0; m < kSupport; ++m) {
      if (m == j) continue;
      l *= (s - static_cast<double>(m)) / (static_cast<double>(j) - static_cast<double>(m));
    }
    w[j] = l;
  }
  return w;
}

struct Support {
  std::size_t start = 0;
  std::array<double, kSupport> weights{};
};

// Window of 4 nodes around the continuous grid coordinate u = (x - origin) / h.
std::optional<Support> support_for(double u, std::size_t n) {
  const double last = static_cast<double>(n - 1);
  if (!(u >= 0.0 && u <= last)) return std::nullopt;
  const auto cell = static_cast<std::ptrdiff_t>(std::floor(u));
  const auto start = std::clamp<std::ptrdiff_t>(cell - 1, 0, static_cast<std::ptrdiff_t>(n - kSupport));
  return Support{static_cast<std::size_t>(start), cubic_weights(u - static_cast<double>(start))};
}

double grid_coordinate(const Grid& g, std::size_t axis, double x) {
  return (x - g.origin()[axis]) / g.spacing()[axis];
}

std::vector<std::size_t> nearest_node(const Grid& g, std::span<const double> x) {
  std::vector<std::size_t> idx(g.dim());
  for (std::size_t a = 0; a < g.dim(); ++a) {
    const double u = std::round(grid_coordinate(g, a, x[a]));
    idx[a] = static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(g.extent(a) - 1)));
  }
  return idx;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double min_spacing(const Grid& g) { return *std::min_element(g.spacing().begin(), g.spacing().end()); }

// Residual and Newton step at x; std::nullopt outside the interpolable region.
struct NewtonState {
  double residual = 0.0;
  double tolerance = 0.0;
  std::vector<double> step;
  bool singular = false;
};

std::optional<NewtonState> newton_state(const JetInterpolator& interp, std::span<const double> x,
                                        std::span<const double> targets) {
  const auto jet = interp.at(x);
  if (!jet) return std::nullopt;
  const std::size_t n = jet->dim();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = jet->jet1.grad[i] - targets[i];
  NewtonState s;
  s.residual = norm2(g);
  const double hnorm = frobenius_norm(jet->hessian);
  s.tolerance = hnorm;  // scaled by the caller
  const LuFactorization lu(jet->hessian.to_matrix());
  const double det = lu.determinant();
  if (lu.singular() || std::abs(det) <= kSingularityTolerance * std::pow(hnorm, static_cast<double>(n))) {
    s.singular = true;
    return s;
  }
  for (auto& v : g) v = -v;
  s.step = lu.solve(g);
  return s;
}

std::vector<double> central_differences(const std::vector<std::vector<double>>& positions, double dt,
                                        std::size_t m) {
  const std::size_t frames = positions.size();
  const std::size_t n = positions[0].size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (m == 0) {
      v[i] = (positions[1][i] - positions[0][i]) / dt;
    } else if (m == frames - 1) {
      v[i] = (positions[m][i] - positions[m - 1][i]) / dt;
    } else {
      v[i] = (positions[m + 1][i] - positions[m - 1][i]) / (2.0 * dt);
    }
  }
  return v;
}

// Velocities below 1e-9 grid cells per frame count as zero, so a resting
// attribute with rounding-level velocities does not report a relative blowup.
void fill_deviation(TrackResult& r, const SampledField& field) {
  const auto& h = field.grid().spacing();
  const double floor = 1e-9 * *std::min_element(h.begin(), h.end()) / field.dt();
  r.deviation = 0.0;
  for (std::size_t m = 1; m + 1 < r.positions.size(); ++m) {
    const auto& emp = r.empirical_velocity[m];
    const auto& comp = r.computed_velocity[m];
    double diff = 0.0;
    for (std::size_t i = 0; i < emp.size(); ++i) diff = std::max(diff, std::abs(emp[i] - comp[i]));
    const double scale = max_abs(comp);
    r.deviation = std::max(r.deviation, diff / std::max(scale, floor));
  }
}

// psi - level along the axis ray through `node` at one frame, interpolated with
// cubic Lagrange; returns the crossing coordinate nearest to `reference`.
double ray_crossing(const SampledField& field, std::size_t frame, std::span<const std::size_t> node,
                    std::size_t axis, double level, double reference) {
  const Grid& g = field.grid();
  const std::size_t n = g.extent(axis);
  std::vector<std::size_t> idx(node.begin(), node.end());
  std::vector<double> f(n);
  for (std::size_t j = 0; j < n; ++j) {
    idx[axis] = j;
    f[j] = field.at(frame, g.linear_index(idx)) - level;
  }
  const double uref = grid_coordinate(g, axis, reference);
  std::optional<std::size_t> best;
  double best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const bool brackets = (f[j] <= 0.0 && f[j + 1] >= 0.0) || (f[j] >= 0.0 && f[j + 1] <= 0.0);
    if (!brackets || (f[j] == 0.0 && f[j + 1] == 0.0)) continue;
    const double distance = std::abs(static_cast<double>(j) + 0.5 - uref);
    if (distance < best_distance) {
      best_distance = distance;
      best = j;
    }
  }
  if (!best) throw AttributeLost("track: no level crossing on the ray");
  const std::size_t j = *best;
  if (f[j] == 0.0) return g.coordinate(axis, j);
  if (f[j + 1] == 0.0) return g.coordinate(axis, j + 1);

  const std::size_t start = std::min(j == 0 ? 0 : j - 1, n - kSupport);
  auto interp = [&](double u) {
    const auto w = cubic_weights(u - static_cast<double>(start));
    double s = 0.0;
    for (std::size_t k = 0; k < kSupport; ++k) s += w[k] * f[start + k];
    return s;
  };
  double lo = static_cast<double>(j);
  double hi = lo + 1.0;
  const bool rising = f[j] < 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = interp(mid);
    if ((v < 0.0) == rising) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return g.origin()[axis] + 0.5 * (lo + hi) * g.spacing()[axis];
}

TrackResult track_gradient_set(const SampledField& field, const GradientSet& target,
                               std::span<const std::size_t> seed, const TrackOptions& opt) {
  const Grid& g = field.grid();
  TrackResult r;
  std::vector<std::size_t> node(seed.begin(), seed.end());
  for (std::size_t m = 0; m < field.frames(); ++m) {
    const JetField jets = fd_jet_field(field, m, opt.stencil);
    const auto pos = find_critical_point(jets, node, target, opt.max_iterations);
    const auto jet = JetInterpolator(jets).at(pos);
    if (!jet) throw AttributeLost("track: critical point left the grid");
    const auto v1 = first_order_velocity(*jet);
    if (!v1.valid) throw SingularHessian("track: singular Hessian at the tracked point");
    r.positions.push_back(pos);
    r.computed_velocity.push_back(v1.components);
    node = nearest_node(g, pos);
  }
  return r;
}

TrackResult track_level_set(const SampledField& field, const LevelSet& target, std::span<const std::size_t> seed,
                            const TrackOptions& opt) {
  const Grid& g = field.grid();
  const std::size_t n = g.dim();
  const auto seed_point = g.point(seed);
  TrackResult r;
  std::vector<double> reference = seed_point;
  for (std::size_t m = 0; m < field.frames(); ++m) {
    const JetField jets = fd_jet_field(field, m, opt.stencil);
    const JetInterpolator interp(jets);
    std::vector<double> pos(n);
    std::vector<double> predicted(n);
    for (std::size_t a = 0; a < n; ++a) {
      pos[a] = ray_crossing(field, m, seed, a, target.level, reference[a]);
      auto x = seed_point;
      x[a] = pos[a];
      const auto jet = interp.at(x);
      if (!jet) throw AttributeLost("track: crossing outside the interpolable region");
      const auto v0 = zero_order_velocity(jet->jet1);
      predicted[a] = static_cast<double>(n) * v0.components[a];
    }
    reference = pos;
    r.positions.push_back(std::move(pos));
    r.computed_velocity.push_back(std::move(predicted));
  }
  return r;
}

// Nearest root of fn within radius of x0, bisected to machine precision.
template <typename Fn>
double nearest_root(Fn&& fn, double x0, double radius) {
  const double f0 = fn(x0);
  if (f0 == 0.0) return x0;
  constexpr int kProbes = 2000;
  const double step = radius / kProbes;
  double lo = 0.0;
  double hi = 0.0;
  bool found = false;
  for (int k = 1; k <= kProbes && !found; ++k) {
    for (double dir : {1.0, -1.0}) {
      const double a = x0 + dir * (k - 1) * step;
      const double b = x0 + dir * k * step;
      const double fa = fn(a);
      const double fb = fn(b);
      if (fb == 0.0) return b;
      if ((fa < 0.0) != (fb < 0.0)) {
        lo = std::min(a, b);
        hi = std::max(a, b);
        found = true;
        break;
      }
    }
  }
  if (!found) throw AttributeLost("level crossing: no root within the search radius");
  const bool rising = fn(lo) < 0.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = fn(mid);
    if (v == 0.0) return mid;
    if ((v < 0.0) == rising) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::optional<Jet2> JetInterpolator::at(std::span<const double> x) const {
  const Grid& g = jets_.grid;
  const std::size_t n = g.dim();
  if (x.size() != n) throw std::invalid_argument("JetInterpolator: dimension mismatch");
  std::vector<Support> sup(n);
  for (std::size_t a = 0; a < n; ++a) {
    auto s = support_for(grid_coordinate(g, a, x[a]), g.extent(a));
    if (!s) return std::nullopt;
    sup[a] = *s;
  }
  Jet2 out(n);
  std::vector<std::size_t> offs(n, 0);
  std::vector<std::size_t> idx(n);
  const std::size_t total = static_cast<std::size_t>(std::pow(kSupport, n));
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rem = c;
    double w = 1.0;
    for (std::size_t a = n; a-- > 0;) {
      offs[a] = rem % kSupport;
      rem /= kSupport;
      idx[a] = sup[a].start + offs[a];
      w *= sup[a].weights[offs[a]];
    }
    const std::size_t k = g.linear_index(idx);
    if (!jets_.valid_mask[k]) return std::nullopt;
    const Jet2& j = jets_.jets[k];
    out.jet1.psi += w * j.jet1.psi;
    out.jet1.dpsi_dt += w * j.jet1.dpsi_dt;
    for (std::size_t a = 0; a < n; ++a) {
      out.jet1.grad[a] += w * j.jet1.grad[a];
      out.time_mixed[a] += w * j.time_mixed[a];
      for (std::size_t b = a; b < n; ++b) out.hessian(a, b) += w * j.hessian(a, b);
    }
  }
  return out;
}

std::vector<double> find_critical_point(const JetField& jets, std::span<const std::size_t> seed_index,
                                        const AttributeSpec& target, std::size_t max_iterations) {
  const auto* gs = std::get_if<GradientSet>(&target);
  if (!gs) throw std::invalid_argument("find_critical_point: needs a gradient-set attribute");
  const Grid& g = jets.grid;
  std::vector<double> targets = gs->targets.empty() ? std::vector<double>(g.dim(), 0.0) : gs->targets;
  if (targets.size() != g.dim()) throw std::invalid_argument("find_critical_point: target dimension mismatch");
  const JetInterpolator interp(jets);
  std::vector<double> x = g.point(seed_index);
  const double h = min_spacing(g);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const auto s = newton_state(interp, x, targets);
    if (!s) throw NoConvergence("find_critical_point: iterate left the grid");
    if (s->residual <= 1e-8 * s->tolerance * h) {
      // Two polishing steps, kept only while they reduce the residual.
      double residual = s->residual;
      auto state = s;
      for (int p = 0; p < 2 && !state->singular; ++p) {
        std::vector<double> y = x;
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += state->step[i];
        const auto next = newton_state(interp, y, targets);
        if (!next || next->residual >= residual) break;
        x = std::move(y);
        residual = next->residual;
        state = next;
      }
      return x;
    }
    if (s->singular) throw SingularHessian("find_critical_point: singular Hessian at iterate");
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += s->step[i];
  }
  throw NoConvergence("find_critical_point: no convergence within the iteration limit");
}

TrackResult track_attribute(const SampledField& field, const AttributeSpec& target,
                            std::span<const std::size_t> seed_index, const TrackOptions& options) {
  if (field.frames() < 3) throw InsufficientFrames("track_attribute: at least 3 frames required");
  if (seed_index.size() != field.grid().dim()) throw std::invalid_argument("track_attribute: seed dimension mismatch");
  (void)field.grid().linear_index(seed_index);
  TrackResult r = std::holds_alternative<GradientSet>(target)
                      ? track_gradient_set(field, std::get<GradientSet>(target), seed_index, options)
                      : track_level_set(field, std::get<LevelSet>(target), seed_index, options);
  for (std::size_t m = 0; m < r.positions.size(); ++m) {
    r.empirical_velocity.push_back(central_differences(r.positions, field.dt(), m));
  }
  fill_deviation(r, field);
  return r;
}

LevelCrossing level_crossing_analytic(const AnalyticField& field, double level, std::span<const double> point,
                                      double t, double time_step, double search_radius) {
  const std::size_t n = field.dim();
  if (point.size() != n) throw std::invalid_argument("level_crossing_analytic: dimension mismatch");
  if (!(time_step > 0.0) || !(search_radius > 0.0)) {
    throw std::invalid_argument("level_crossing_analytic: time_step and search_radius must be positive");
  }
  LevelCrossing out;
  for (std::size_t a = 0; a < n; ++a) {
    auto ray = [&](double tau) {
      return [&, tau](double s) {
        std::vector<double> y(point.begin(), point.end());
        y[a] = s;
        return field.evaluate(y, tau) - level;
      };
    };
    const double x0 = nearest_root(ray(t), point[a], search_radius);
    const double xp = nearest_root(ray(t + time_step), x0, search_radius);
    const double xm = nearest_root(ray(t - time_step), x0, search_radius);
    std::vector<double> y(point.begin(), point.end());
    y[a] = x0;
    const auto v0 = zero_order_velocity(analytic_jet2(field, y, t).jet1);
    out.crossing.push_back(x0);
    out.crossing_speed.push_back((xp - xm) / (2.0 * time_step));
    out.zero_order_component.push_back(v0.components[a]);
  }
  return out;
}

}  // namespace wavevel
