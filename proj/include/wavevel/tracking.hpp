#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wavevel/differentiation.hpp"
#include "wavevel/field.hpp"
#include "wavevel/velocities.hpp"

namespace wavevel {

/// Tensor-product cubic Lagrange interpolation of every JetField entry at
/// off-grid points. All 4^N supporting nodes must be valid.
class JetInterpolator {
 public:
  explicit JetInterpolator(const JetField& jets) : jets_(jets) {}

  /// std::nullopt outside the grid or when a supporting node is invalid.
  std::optional<Jet2> at(std::span<const double> x) const;

 private:
  const JetField& jets_;
};

/// Newton iteration on grad psi(x) - C = 0 over the interpolated FD jets,
/// starting from a grid node. Stops when ||g|| <= 1e-8 ||H||_F min(spacing).
/// Throws NoConvergence (iteration limit or the iterate left the grid) and
/// SingularHessian. A LevelSet target is rejected with std::invalid_argument.
std::vector<double> find_critical_point(const JetField& jets, std::span<const std::size_t> seed_index,
                                        const AttributeSpec& target, std::size_t max_iterations = 50);

struct TrackOptions {
  /// One-sided boundaries let the first and last frames carry time derivatives.
  StencilSpec stencil{4, Boundary::one_sided, HessianScheme::compact};
  std::size_t max_iterations = 50;
};

/// Per-frame track of an attribute point.
///
/// Gradient set: positions are the critical points, computed_velocity is the
/// 1-PV evaluated there.
/// Level set: positions[m][i] is the psi = level crossing on the axis-i ray
/// through the seed node, empirical_velocity[m][i] its speed along that ray,
/// and computed_velocity[m][i] = N * (0-PV component i) at the crossing, the
/// per-axis crossing speed the 0-PV predicts.
///
/// Empirical velocities are central differences of positions (one-sided at the
/// two end frames). `deviation` is the largest per-frame
/// ||empirical - computed||_inf / max(||computed||_inf, 1e-9 h_min / dt) over
/// interior frames.
struct TrackResult {
  std::vector<std::vector<double>> positions;
  std::vector<std::vector<double>> empirical_velocity;
  std::vector<std::vector<double>> computed_velocity;
  double deviation = 0.0;
};

/// Requires at least 3 frames. Throws AttributeLost when the attribute leaves
/// the grid or no crossing exists, and the errors of find_critical_point.
TrackResult track_attribute(const SampledField& field, const AttributeSpec& target,
                            std::span<const std::size_t> seed_index, const TrackOptions& options = {});

/// Level crossing along the coordinate rays through a point of an analytic field.
struct LevelCrossing {
  std::vector<double> crossing;              // coordinate of the crossing on ray i at time t
  std::vector<double> crossing_speed;        // d crossing_i / dt from root finding at t +- time_step
  std::vector<double> zero_order_component;  // 0-PV component i at the crossing
};

/// Root finding on exact evaluations; searches within search_radius of the
/// point on each ray. Throws AttributeLost when a ray has no crossing.
LevelCrossing level_crossing_analytic(const AnalyticField& field, double level, std::span<const double> point,
                                      double t, double time_step = 1e-3, double search_radius = 1.0);

}  // namespace wavevel
