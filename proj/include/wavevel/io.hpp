#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wavevel/field.hpp"
#include "wavevel/velocities.hpp"

namespace wavevel {

/// Binary field file layout, all little-endian:
///
///   magic   8 bytes  "WVFIELD1"
///   dim     u8
///   shape   dim x u32
///   frames  u32
///   spacing dim x f64
///   origin  dim x f64
///   t0, dt  f64, f64
///   payload frames x prod(shape) f64, time slowest, then axis 1..N
struct FieldFileHeader {
  static constexpr char kMagic[8] = {'W', 'V', 'F', 'I', 'E', 'L', 'D', '1'};

  std::uint8_t dim = 0;
  std::vector<std::uint32_t> shape;
  std::uint32_t frames = 0;
  std::vector<double> spacing;
  std::vector<double> origin;
  double t0 = 0.0;
  double dt = 0.0;

  std::size_t header_bytes() const;
  std::size_t payload_values() const;
};

/// Throws FieldFileError(kind = io) when the file cannot be written.
void write_field(const SampledField& field, const std::filesystem::path& path);
void write_field(const SampledField& field, std::ostream& out);

/// Throws FieldFileError: `format` for a bad magic or invalid header fields,
/// `length` when the payload is truncated or followed by extra bytes, `io`
/// when the file cannot be opened.
SampledField read_field(const std::filesystem::path& path);
SampledField read_field(std::istream& in);
FieldFileHeader read_header(const std::filesystem::path& path);

/// One CSV column over the grid points (row-major).
struct CsvColumn {
  std::string name;
  std::vector<double> values;
};

/// Header `x1,...,xN,<names>`, one row per grid point. Finite values use 17
/// significant digits; NaN prints as `nan`, infinities as `inf` / `-inf`.
/// Throws std::invalid_argument for an empty column set or a column whose
/// length is not the point count, FieldFileError(io) on write failure.
void export_csv(const Grid& grid, std::span<const CsvColumn> columns, const std::filesystem::path& path);
void write_csv(const Grid& grid, std::span<const CsvColumn> columns, std::ostream& out);

std::string format_number(double v);

/// order 0: v0_1..v0_N, w_1..w_N, valid. order 1: v1_1..v1_N, cond, valid.
/// Invalid points carry nan in every non-mask column.
std::vector<CsvColumn> velocity_columns(const VelocityField& field);
/// scalar, valid
std::vector<CsvColumn> scalar_columns(const ScalarField& field);

}  // namespace wavevel
