#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavevel/linalg.hpp"

namespace wavevel {

/// Uniform rectilinear grid. Point i along axis a sits at origin[a] + i * spacing[a].
/// Linear indices are row-major: axis 0 is slowest, the last axis fastest.
class Grid {
 public:
  static constexpr std::size_t kMinExtent = 5;

  Grid() = default;
  /// Throws std::invalid_argument on dim < 1, extent < 5, non-positive or
  /// non-finite spacing, or mismatched vector lengths.
  Grid(std::vector<std::size_t> shape, std::vector<double> spacing, std::vector<double> origin);

  std::size_t dim() const { return shape_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<double>& spacing() const { return spacing_; }
  const std::vector<double>& origin() const { return origin_; }
  std::size_t extent(std::size_t axis) const { return shape_[axis]; }
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }
  std::size_t point_count() const { return count_; }

  std::size_t linear_index(std::span<const std::size_t> index) const;
  std::vector<std::size_t> multi_index(std::size_t linear) const;
  double coordinate(std::size_t axis, std::size_t i) const {
    return origin_[axis] + static_cast<double>(i) * spacing_[axis];
  }
  std::vector<double> point(std::span<const std::size_t> index) const;
  std::vector<double> point(std::size_t linear) const;

  bool operator==(const Grid&) const = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> spacing_;
  std::vector<double> origin_;
  std::vector<std::size_t> strides_;
  std::size_t count_ = 0;
};

Grid make_grid(std::size_t dim, std::vector<std::size_t> shape, std::vector<double> spacing,
               std::vector<double> origin);

/// Field values on a grid at M uniformly spaced time frames t0 + m * dt.
/// Storage is frame-major, then the grid's row-major order.
class SampledField {
 public:
  SampledField() = default;
  /// Throws std::invalid_argument when sizes disagree, values are non-finite,
  /// frames == 0, or dt <= 0 with more than one frame.
  SampledField(Grid grid, double t0, double dt, std::size_t frames, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t frames() const { return frames_; }
  double t0() const { return t0_; }
  double dt() const { return dt_; }
  double time(std::size_t frame) const { return t0_ + static_cast<double>(frame) * dt_; }

  std::span<const double> values() const { return values_; }
  std::span<const double> frame(std::size_t m) const {
    return std::span<const double>(values_).subspan(m * grid_.point_count(), grid_.point_count());
  }
  double at(std::size_t frame, std::size_t linear) const {
    return values_[frame * grid_.point_count() + linear];
  }

 private:
  Grid grid_;
  double t0_ = 0.0;
  double dt_ = 0.0;
  std::size_t frames_ = 0;
  std::vector<double> values_;
};

struct Jet1 {
  double psi = 0.0;
  double dpsi_dt = 0.0;
  std::vector<double> grad;

  std::size_t dim() const { return grad.size(); }
  bool finite() const;
};

/// Jet1 plus the spatial Hessian and the mixed rows psi_{x_i t}.
struct Jet2 {
  Jet1 jet1;
  SymmetricMatrix hessian;
  std::vector<double> time_mixed;

  Jet2() = default;
  explicit Jet2(std::size_t dim);

  std::size_t dim() const { return jet1.grad.size(); }
  bool finite() const;
};

enum class FieldKind { plane_wave, translating_gaussian, expanding_gaussian_ring, static_gaussian, polynomial };

/// Throws std::invalid_argument for an unknown name. Accepts the hyphenated
/// names used on the command line ("plane-wave", "translating-gaussian", ...).
FieldKind parse_field_kind(std::string_view name);
std::string to_string(FieldKind kind);

/// coefficient * prod_a x_a^powers[a] * t^time_power
struct Monomial {
  double coefficient = 0.0;
  std::vector<int> powers;
  int time_power = 0;
};

/// Closed-form scalar fields with exact derivative jets.
///
///   plane-wave:              A sin(k.x - omega t + phase)
///   translating-gaussian:    A exp(-|x - x0 - c t|^2 / sigma^2)
///   static-gaussian:         A exp(-|x - x0|^2 / sigma^2)
///   expanding-gaussian-ring: A exp(-(|x - x0| - R - s t)^2 / w^2)
///   polynomial:              sum of Monomial terms
class AnalyticField {
 public:
  struct Params {
    double amplitude = 1.0;
    std::vector<double> wave_vector;  // plane-wave
    double omega = 0.0;
    double phase = 0.0;
    std::vector<double> center;    // gaussians and ring
    std::vector<double> velocity;  // translating-gaussian
    double sigma = 1.0;            // gaussians
    double ring_radius = 0.0;
    double ring_speed = 0.0;
    double ring_width = 1.0;
    std::vector<Monomial> terms;  // polynomial
  };

  static AnalyticField plane_wave(std::vector<double> wave_vector, double omega, double phase = 0.0,
                                  double amplitude = 1.0);
  /// An empty center means the origin.
  static AnalyticField translating_gaussian(std::vector<double> velocity, double sigma,
                                            std::vector<double> center = {}, double amplitude = 1.0);
  static AnalyticField static_gaussian(std::vector<double> center, double sigma, double amplitude = 1.0);
  static AnalyticField expanding_ring(std::vector<double> center, double radius, double speed, double width,
                                      double amplitude = 1.0);
  static AnalyticField polynomial(std::size_t dim, std::vector<Monomial> terms);

  FieldKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const Params& params() const { return params_; }
  /// Translation velocity for kinds that move rigidly (translating and static
  /// gaussians); empty otherwise.
  std::vector<double> translation_velocity() const;

  double evaluate(std::span<const double> x, double t) const;

 private:
  AnalyticField(FieldKind kind, std::size_t dim, Params params);

  FieldKind kind_ = FieldKind::static_gaussian;
  std::size_t dim_ = 0;
  Params params_;
};

/// Exact first and second derivatives. Throws std::domain_error at the exact
/// center of an expanding ring, where |x - x0| is not differentiable.
Jet2 analytic_jet2(const AnalyticField& field, std::span<const double> point, double t);

/// Samples the field at every grid point for each time stamp. Time stamps must
/// be strictly increasing with a uniform step (relative tolerance 1e-9).
SampledField sample(const AnalyticField& field, const Grid& grid, std::span<const double> times);

using PointFunction = std::function<double(std::span<const double> x, double t)>;

/// Samples an arbitrary pure function; the function must be safe to call concurrently.
SampledField sample_function(const PointFunction& fn, const Grid& grid, std::span<const double> times);

/// t0, t0 + dt, ..., M stamps.
std::vector<double> uniform_times(double t0, double dt, std::size_t frames);

namespace reference {
SampledField sample(const AnalyticField& field, const Grid& grid, std::span<const double> times);
SampledField sample_function(const PointFunction& fn, const Grid& grid, std::span<const double> times);
}  // namespace reference

}  // namespace wavevel
