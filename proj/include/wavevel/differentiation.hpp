#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wavevel/field.hpp"

namespace wavevel {

enum class Boundary {
  one_sided,        // off-centre stencils of the same order near edges
  shrink_to_valid,  // points whose central stencil does not fit are invalid
};

/// How the pure second derivatives psi_{x_a x_a} are formed.
enum class HessianScheme {
  compact,   // classical 3- / 5-point second-derivative rows
  composed,  // D_a applied to D_a psi; every Hessian entry is a product of first-derivative stencils
};

struct StencilSpec {
  int order = 4;  // 2 or 4
  Boundary boundary = Boundary::shrink_to_valid;
  HessianScheme hessian = HessianScheme::compact;
};

/// Throws std::invalid_argument unless order is 2 or 4.
void validate(const StencilSpec& spec);

/// Half-width of the widest stencil a StencilSpec needs at an interior point.
std::size_t stencil_half_width(const StencilSpec& spec);

/// 1-D finite-difference weights for derivative `derivative` (1 or 2) at node i
/// of an axis with n nodes. `offset` is the first participating node relative to i.
/// Weights are not yet divided by h^derivative.
struct Stencil1D {
  int offset = 0;
  std::vector<double> weights;
};

/// std::nullopt when the boundary policy is shrink_to_valid and the central
/// stencil does not fit.
std::optional<Stencil1D> derivative_stencil(int derivative, std::size_t i, std::size_t n, int order,
                                            Boundary boundary);

/// Fornberg's recursion: weights for the `derivative`-th derivative at 0 from
/// samples at the given integer offsets (unit spacing).
std::vector<double> fornberg_weights(std::span<const int> offsets, int derivative);

/// Finite-difference Jet2 at a grid node of one frame. Returns std::nullopt
/// when shrink_to_valid cannot place a central stencil (space or time).
/// Throws InsufficientFrames when the field has fewer than order + 1 frames,
/// std::out_of_range for a bad frame or index.
std::optional<Jet2> fd_jet2_at(const SampledField& field, std::size_t frame, std::span<const std::size_t> index,
                               const StencilSpec& spec = {});

enum class CompositionOrder { space_then_time, time_then_space };

/// psi_{x_axis t} with an explicit order of the two 1-D sums; both orders apply
/// the same tensor-product stencil.
std::optional<double> fd_time_mixed_at(const SampledField& field, std::size_t frame,
                                       std::span<const std::size_t> index, std::size_t axis,
                                       const StencilSpec& spec, CompositionOrder composition);

struct JetField {
  Grid grid;
  std::size_t t_index = 0;
  double time = 0.0;
  std::vector<Jet2> jets;              // one per grid point, row-major
  std::vector<std::uint8_t> valid_mask;  // 1 where jets[k] is meaningful

  std::size_t valid_count() const;
};

JetField fd_jet_field(const SampledField& field, std::size_t frame, const StencilSpec& spec = {});

/// Exact jets of an analytic field on the grid nodes; every point valid.
JetField analytic_jet_field(const AnalyticField& field, const Grid& grid, double t);

namespace reference {
JetField fd_jet_field(const SampledField& field, std::size_t frame, const StencilSpec& spec = {});
}

}  // namespace wavevel
