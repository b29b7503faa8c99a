#include "wavevel/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "wavevel/errors.hpp"

namespace wavevel {

namespace {

using Kind = FieldFileError::Kind;

template <typename U>
void put_le(std::ostream& out, U v) {
  char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, sizeof(U));
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <typename U>
  U get(Kind on_short) {
    unsigned char bytes[sizeof(U)];
    in_.read(reinterpret_cast<char*>(bytes), sizeof(U));
    if (in_.gcount() != static_cast<std::streamsize>(sizeof(U))) {
      throw FieldFileError(on_short, on_short == Kind::length ? "field file: truncated payload"
                                                                : "field file: truncated header");
    }
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
    return v;
  }

  double get_f64(Kind on_short) { return std::bit_cast<double>(get<std::uint64_t>(on_short)); }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

  std::istream& stream() { return in_; }

 private:
  std::istream& in_;
};

FieldFileHeader parse_header(Reader& r) {
  char magic[8];
  r.stream().read(magic, sizeof magic);
  if (r.stream().gcount() != static_cast<std::streamsize>(sizeof magic) ||
      std::memcmp(magic, FieldFileHeader::kMagic, sizeof magic) != 0) {
    throw FieldFileError(Kind::format, "field file: bad magic (expected WVFIELD1)");
  }
  FieldFileHeader h;
  h.dim = r.get<std::uint8_t>(Kind::format);
  if (h.dim == 0) throw FieldFileError(Kind::format, "field file: dim must be at least 1");
  for (std::uint8_t a = 0; a < h.dim; ++a) h.shape.push_back(r.get<std::uint32_t>(Kind::format));
  h.frames = r.get<std::uint32_t>(Kind::format);
  for (std::uint8_t a = 0; a < h.dim; ++a) h.spacing.push_back(r.get_f64(Kind::format));
  for (std::uint8_t a = 0; a < h.dim; ++a) h.origin.push_back(r.get_f64(Kind::format));
  h.t0 = r.get_f64(Kind::format);
  h.dt = r.get_f64(Kind::format);
  if (h.frames == 0) throw FieldFileError(Kind::format, "field file: zero frames");
  return h;
}

void write_impl(const SampledField& field, std::ostream& out) {
  const Grid& g = field.grid();
  if (g.dim() > std::numeric_limits<std::uint8_t>::max()) throw std::invalid_argument("write_field: dim exceeds 255");
  out.write(FieldFileHeader::kMagic, sizeof FieldFileHeader::kMagic);
  put_le(out, static_cast<std::uint8_t>(g.dim()));
  for (std::size_t e : g.shape()) {
    if (e > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("write_field: extent exceeds u32");
    put_le(out, static_cast<std::uint32_t>(e));
  }
  put_le(out, static_cast<std::uint32_t>(field.frames()));
  for (double s : g.spacing()) put_f64(out, s);
  for (double o : g.origin()) put_f64(out, o);
  put_f64(out, field.t0());
  put_f64(out, field.dt());
  for (double v : field.values()) put_f64(out, v);
}

void write_csv_impl(const Grid& grid, std::span<const CsvColumn> columns, std::ostream& out) {
  if (columns.empty()) throw std::invalid_argument("export_csv: no columns");
  for (const auto& c : columns) {
    if (c.values.size() != grid.point_count()) {
      throw std::invalid_argument("export_csv: column '" + c.name + "' does not match the grid");
    }
  }
  for (std::size_t a = 0; a < grid.dim(); ++a) out << (a ? "," : "") << 'x' << (a + 1);
  for (const auto& c : columns) out << ',' << c.name;
  out << '\n';
  for (std::size_t k = 0; k < grid.point_count(); ++k) {
    const auto idx = grid.multi_index(k);
    for (std::size_t a = 0; a < grid.dim(); ++a) out << (a ? "," : "") << format_number(grid.coordinate(a, idx[a]));
    for (const auto& c : columns) out << ',' << format_number(c.values[k]);
    out << '\n';
  }
}

}  // namespace

std::size_t FieldFileHeader::header_bytes() const { return 8 + 1 + 4 * std::size_t{dim} + 4 + 16 * std::size_t{dim} + 16; }

std::size_t FieldFileHeader::payload_values() const {
  std::size_t n = frames;
  for (auto e : shape) n *= e;
  return n;
}

void write_field(const SampledField& field, std::ostream& out) {
  write_impl(field, out);
  if (!out) throw FieldFileError(Kind::io, "write_field: stream write failed");
}

void write_field(const SampledField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FieldFileError(Kind::io, "write_field: cannot open " + path.string());
  write_impl(field, out);
  out.flush();
  if (!out) throw FieldFileError(Kind::io, "write_field: write failed for " + path.string());
}

SampledField read_field(std::istream& in) {
  Reader r(in);
  const FieldFileHeader h = parse_header(r);
  std::vector<std::size_t> shape(h.shape.begin(), h.shape.end());
  Grid grid;
  try {
    grid = Grid(std::move(shape), h.spacing, h.origin);
  } catch (const std::invalid_argument& e) {
    throw FieldFileError(Kind::format, std::string("field file: invalid grid: ") + e.what());
  }
  // Grow as bytes arrive so a corrupt header cannot trigger a huge allocation.
  const std::size_t count = h.payload_values();
  std::vector<double> values;
  values.reserve(std::min<std::size_t>(count, std::size_t{1} << 20));
  for (std::size_t k = 0; k < count; ++k) values.push_back(r.get_f64(Kind::length));
  if (!r.at_end()) throw FieldFileError(Kind::length, "field file: trailing bytes after payload");
  try {
    return SampledField(std::move(grid), h.t0, h.dt, h.frames, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw FieldFileError(Kind::format, std::string("field file: ") + e.what());
  }
}

SampledField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FieldFileError(Kind::io, "read_field: cannot open " + path.string());
  return read_field(in);
}

FieldFileHeader read_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FieldFileError(Kind::io, "read_header: cannot open " + path.string());
  Reader r(in);
  return parse_header(r);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv(const Grid& grid, std::span<const CsvColumn> columns, std::ostream& out) {
  write_csv_impl(grid, columns, out);
}

void export_csv(const Grid& grid, std::span<const CsvColumn> columns, const std::filesystem::path& path) {
  if (columns.empty()) throw std::invalid_argument("export_csv: no columns");
  std::ofstream out(path);
  if (!out) throw FieldFileError(Kind::io, "export_csv: cannot open " + path.string());
  write_csv_impl(grid, columns, out);
  out.flush();
  if (!out) throw FieldFileError(Kind::io, "export_csv: write failed for " + path.string());
}

std::vector<CsvColumn> velocity_columns(const VelocityField& field) {
  const std::size_t n = field.dim();
  const std::size_t count = field.grid.point_count();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::string prefix = field.order == 0 ? "v0_" : "v1_";
  std::vector<CsvColumn> cols;
  for (std::size_t a = 0; a < n; ++a) {
    CsvColumn c{prefix + std::to_string(a + 1), std::vector<double>(count)};
    for (std::size_t k = 0; k < count; ++k) c.values[k] = field.valid[k] ? field.components[k * n + a] : nan;
    cols.push_back(std::move(c));
  }
  if (field.order == 0) {
    for (std::size_t a = 0; a < n; ++a) {
      CsvColumn c{"w_" + std::to_string(a + 1), std::vector<double>(count)};
      for (std::size_t k = 0; k < count; ++k) c.values[k] = field.valid[k] ? field.reciprocal[k * n + a] : nan;
      cols.push_back(std::move(c));
    }
  } else {
    CsvColumn c{"cond", std::vector<double>(count)};
    for (std::size_t k = 0; k < count; ++k) c.values[k] = field.valid[k] ? field.hessian_condition[k] : nan;
    cols.push_back(std::move(c));
  }
  CsvColumn valid{"valid", std::vector<double>(count)};
  for (std::size_t k = 0; k < count; ++k) valid.values[k] = field.valid[k] ? 1.0 : 0.0;
  cols.push_back(std::move(valid));
  return cols;
}

std::vector<CsvColumn> scalar_columns(const ScalarField& field) {
  const std::size_t count = field.grid.point_count();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CsvColumn s{"scalar", std::vector<double>(count)};
  CsvColumn valid{"valid", std::vector<double>(count)};
  for (std::size_t k = 0; k < count; ++k) {
    s.values[k] = field.valid[k] ? field.values[k] : nan;
    valid.values[k] = field.valid[k] ? 1.0 : 0.0;
  }
  return {std::move(s), std::move(valid)};
}

}  // namespace wavevel
