#include "wavevel/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "wavevel/covariance.hpp"
#include "wavevel/differentiation.hpp"
#include "wavevel/errors.hpp"
#include "wavevel/field.hpp"
#include "wavevel/io.hpp"
#include "wavevel/tracking.hpp"
#include "wavevel/velocities.hpp"

namespace wavevel {

namespace {

struct FieldOptions {
  std::string kind;
  std::vector<double> wave_vector;
  double omega = 1.0;
  double phase = 0.0;
  double amplitude = 1.0;
  std::vector<double> velocity;
  std::vector<double> center;
  double sigma = 1.0;
  double radius = 0.5;
  double speed = 0.5;
  double width = 0.25;
  std::vector<std::string> terms;
  std::size_t dim = 0;
};

struct StencilOptions {
  int order = 4;
  std::string boundary = "shrink-to-valid";
  std::string hessian;  // empty: composed when a 1-PV is computed, else compact
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void add_field_options(CLI::App* cmd, FieldOptions& f) {
  cmd->add_option("--kind", f.kind,
                  "plane-wave | translating-gaussian | static-gaussian | expanding-gaussian-ring | polynomial")
      ->required();
  cmd->add_option("--k", f.wave_vector, "plane-wave wave vector")->delimiter(',');
  cmd->add_option("--omega", f.omega, "plane-wave angular frequency");
  cmd->add_option("--phase", f.phase, "plane-wave phase");
  cmd->add_option("--amplitude", f.amplitude, "field amplitude");
  cmd->add_option("--velocity", f.velocity, "translating-gaussian velocity")->delimiter(',');
  cmd->add_option("--center", f.center, "gaussian / ring center")->delimiter(',');
  cmd->add_option("--sigma", f.sigma, "gaussian width");
  cmd->add_option("--radius", f.radius, "ring radius at t = 0");
  cmd->add_option("--speed", f.speed, "ring expansion speed");
  cmd->add_option("--width", f.width, "ring width");
  cmd->add_option("--term", f.terms, "polynomial term coef:p1,p2,...:pt (repeatable)");
  cmd->add_option("--dim", f.dim, "dimension (polynomial, or to expand a default center)");
}

void add_stencil_options(CLI::App* cmd, StencilOptions& s) {
  cmd->add_option("--stencil-order", s.order, "finite-difference order (2 or 4)")->check(CLI::IsMember({2, 4}));
  cmd->add_option("--boundary", s.boundary, "one-sided | shrink-to-valid")
      ->check(CLI::IsMember({"one-sided", "shrink-to-valid"}));
  cmd->add_option("--hessian", s.hessian, "compact | composed (default: composed for 1-PV output)")->check(CLI::IsMember({"compact", "composed"}));
}

// Composed second derivatives keep the FD Hessian of a plane wave rank 1, so
// singular points are reported as such; compact ones do not.
StencilSpec to_spec(const StencilOptions& s, bool first_order) {
  StencilSpec spec;
  spec.order = s.order;
  spec.boundary = s.boundary == "one-sided" ? Boundary::one_sided : Boundary::shrink_to_valid;
  const std::string hessian = s.hessian.empty() ? (first_order ? "composed" : "compact") : s.hessian;
  spec.hessian = hessian == "composed" ? HessianScheme::composed : HessianScheme::compact;
  return spec;
}

Monomial parse_term(const std::string& text, std::size_t dim) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 2 || parts.size() > 3) throw UsageError("--term expects coef:p1,...,pN[:pt], got '" + text + "'");
  Monomial m;
  m.coefficient = std::stod(parts[0]);
  std::stringstream ps(parts[1]);
  for (std::string p; std::getline(ps, p, ',');) m.powers.push_back(std::stoi(p));
  m.time_power = parts.size() == 3 ? std::stoi(parts[2]) : 0;
  if (m.powers.size() != dim) throw UsageError("--term '" + text + "' has the wrong number of exponents");
  return m;
}

AnalyticField build_field(const FieldOptions& f) {
  const FieldKind kind = parse_field_kind(f.kind);
  auto center_or_zero = [&](std::size_t n) { return f.center.empty() ? std::vector<double>(n, 0.0) : f.center; };
  switch (kind) {
    case FieldKind::plane_wave:
      if (f.wave_vector.empty()) throw UsageError("plane-wave needs --k");
      return AnalyticField::plane_wave(f.wave_vector, f.omega, f.phase, f.amplitude);
    case FieldKind::translating_gaussian:
      if (f.velocity.empty()) throw UsageError("translating-gaussian needs --velocity");
      return AnalyticField::translating_gaussian(f.velocity, f.sigma, center_or_zero(f.velocity.size()), f.amplitude);
    case FieldKind::static_gaussian: {
      const std::size_t n = f.center.empty() ? f.dim : f.center.size();
      if (n == 0) throw UsageError("static-gaussian needs --center or --dim");
      return AnalyticField::static_gaussian(center_or_zero(n), f.sigma, f.amplitude);
    }
    case FieldKind::expanding_gaussian_ring: {
      const std::size_t n = f.center.empty() ? f.dim : f.center.size();
      if (n == 0) throw UsageError("expanding-gaussian-ring needs --center or --dim");
      return AnalyticField::expanding_ring(center_or_zero(n), f.radius, f.speed, f.width, f.amplitude);
    }
    case FieldKind::polynomial: {
      if (f.dim == 0) throw UsageError("polynomial needs --dim");
      std::vector<Monomial> terms;
      for (const auto& t : f.terms) terms.push_back(parse_term(t, f.dim));
      return AnalyticField::polynomial(f.dim, std::move(terms));
    }
  }
  throw UsageError("unknown field kind");
}

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

template <typename T>
std::string join_int(std::span<const T> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

// key=value lines become --key value tokens unless the key is already on the
// command line. '#' starts a comment.
std::vector<std::string> config_tokens(const std::string& path, const std::vector<std::string>& args) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::set<std::string> present;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) present.insert(a.substr(0, a.find('=')));
  }
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (eq == std::string::npos) {
      if (!trim(line).empty()) throw UsageError("config line without '=': " + line);
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) != 0) key = "--" + key;
    if (present.count(key)) continue;
    tokens.push_back(key);
    tokens.push_back(value);
  }
  return tokens;
}

std::size_t default_frame(const SampledField& f, std::optional<std::size_t> frame) {
  const std::size_t m = frame.value_or(f.frames() / 2);
  if (m >= f.frames()) throw UsageError("--frame out of range");
  return m;
}

int cmd_generate(const FieldOptions& fo, const std::vector<std::size_t>& shape, const std::vector<double>& spacing,
                 std::vector<double> origin, std::size_t frames, double t0, double dt, const std::string& out_path,
                 std::ostream& out) {
  const AnalyticField field = build_field(fo);
  if (origin.empty()) origin.assign(shape.size(), 0.0);
  const Grid grid = make_grid(shape.size(), shape, spacing, origin);
  const auto times = uniform_times(t0, dt, frames);
  const SampledField sampled = sample(field, grid, times);
  write_field(sampled, out_path);
  out << "wrote " << out_path << ": " << to_string(field.kind()) << ", dim " << grid.dim() << ", shape "
      << join_int<std::size_t>(grid.shape()) << ", frames " << frames << "\n";
  return 0;
}

int cmd_velocity(const std::string& in_path, int order, std::optional<std::size_t> frame, const StencilOptions& so,
                 const std::string& csv, std::ostream& out, std::ostream& err) {
  const SampledField field = read_field(in_path);
  const std::size_t m = default_frame(field, frame);
  const JetField jets = fd_jet_field(field, m, to_spec(so, order == 1));
  const VelocityField v = velocity_field(jets, order);
  out << "order " << order << " velocity, frame " << m << " (t = " << format_number(field.time(m)) << "): "
      << v.valid_count() << " of " << v.grid.point_count() << " points valid\n";
  if (v.valid_count() == 0) {
    err << "warning: no valid points"
        << (order == 1 ? " (spatial Hessian singular everywhere)" : "") << "\n";
  }
  if (!csv.empty()) {
    export_csv(v.grid, velocity_columns(v), csv);
    out << "wrote " << csv << "\n";
  }
  return 0;
}

int cmd_scalar(const std::string& in_path, std::optional<std::size_t> frame, const StencilOptions& so,
               const std::string& csv, std::ostream& out, std::ostream& err) {
  const SampledField field = read_field(in_path);
  const std::size_t m = default_frame(field, frame);
  const ScalarField s = contraction_field(fd_jet_field(field, m, to_spec(so, true)));
  double lo = INFINITY;
  double hi = -INFINITY;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    if (!s.valid[k]) continue;
    lo = std::min(lo, s.values[k]);
    hi = std::max(hi, s.values[k]);
  }
  out << "contraction scalar, frame " << m << ": " << s.valid_count() << " of " << s.grid.point_count()
      << " points valid";
  if (s.valid_count()) out << ", range [" << format_number(lo) << ", " << format_number(hi) << "]";
  out << "\n";
  if (s.valid_count() == 0) err << "warning: no valid points\n";
  if (!csv.empty()) {
    export_csv(s.grid, scalar_columns(s), csv);
    out << "wrote " << csv << "\n";
  }
  return 0;
}

int cmd_track(const std::string& in_path, const std::string& attribute, double level,
              std::vector<double> gradient, std::vector<std::size_t> seed, double tolerance,
              const StencilOptions& so, bool stencil_set, std::ostream& out) {
  const SampledField field = read_field(in_path);
  const Grid& g = field.grid();
  AttributeSpec target;
  if (attribute == "gradient") {
    if (gradient.empty()) gradient.assign(g.dim(), 0.0);
    target = GradientSet{gradient};
  } else {
    target = LevelSet{level};
  }
  if (seed.empty()) {
    if (attribute == "gradient") {
      const auto f0 = field.frame(0);
      std::size_t best = 0;
      for (std::size_t k = 1; k < f0.size(); ++k)
        if (std::abs(f0[k]) > std::abs(f0[best])) best = k;
      seed = g.multi_index(best);
    } else {
      for (std::size_t a = 0; a < g.dim(); ++a) seed.push_back(g.extent(a) / 2);
    }
  }
  if (seed.size() != g.dim()) throw UsageError("--seed needs one index per axis");
  TrackOptions opts;
  if (stencil_set) {
    opts.stencil = to_spec(so, false);
  }
  const TrackResult r = track_attribute(field, target, seed, opts);
  out << "track " << attribute << " seed " << join_int<std::size_t>(seed) << "\n";
  out << "frame,t,position,empirical_velocity,computed_velocity\n";
  for (std::size_t m = 0; m < r.positions.size(); ++m) {
    out << m << "," << format_number(field.time(m)) << ",[" << join(r.positions[m]) << "],["
        << join(r.empirical_velocity[m]) << "],[" << join(r.computed_velocity[m]) << "]\n";
  }
  out << "deviation " << format_number(r.deviation) << " (tolerance " << format_number(tolerance) << ")\n";
  const bool pass = r.deviation <= tolerance;
  out << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int cmd_covcheck(const FieldOptions& fo, const std::string& map_kind, const std::vector<double>& matrix,
                 std::vector<double> offset, std::size_t maps, double max_condition, std::size_t samples,
                 std::uint64_t seed, double t, double radius, double tolerance, std::ostream& out) {
  const AnalyticField field = build_field(fo);
  const std::size_t n = field.dim();
  std::mt19937_64 rng(seed);
  std::vector<AffineMap> list;
  if (map_kind == "identity") {
    list.push_back(AffineMap::identity(n));
  } else if (map_kind == "mirror") {
    list.push_back(AffineMap::mirror(n));
  } else if (map_kind == "matrix") {
    if (matrix.size() != n * n) throw UsageError("--matrix needs dim*dim entries (row-major)");
    if (offset.empty()) offset.assign(n, 0.0);
    list.emplace_back(Matrix::from_rows(n, matrix), offset);
  } else {
    for (std::size_t k = 0; k < maps; ++k) list.push_back(random_affine_map(n, max_condition, rng));
  }

  std::vector<double> center(n, 0.0);
  if (!field.params().center.empty()) center = field.params().center;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  CovarianceReport zero, first, scalar;
  for (const auto& map : list) {
    // Sample x-frame points whose images land in the box around the field center.
    std::vector<std::vector<double>> points(samples);
    for (auto& p : points) {
      std::vector<double> X(n);
      for (std::size_t i = 0; i < n; ++i) X[i] = center[i] + radius * unit(rng);
      p = map.apply_inverse(X);
    }
    auto merge = [](CovarianceReport& acc, const CovarianceReport& r) {
      acc.max_deviation = std::max(acc.max_deviation, r.max_deviation);
      acc.checked += r.checked;
      acc.skipped += r.skipped;
    };
    merge(zero, check_zero_order_covariance(field, map, points, t));
    merge(first, check_first_order_covariance(field, map, points, t));
    merge(scalar, check_contraction_invariance(field, map, points, t));
  }
  auto line = [&](const char* name, const CovarianceReport& r) {
    out << name << " " << format_number(r.max_deviation) << " (checked " << r.checked << ", skipped " << r.skipped
        << ")\n";
  };
  out << "covcheck " << to_string(field.kind()) << " dim " << n << ", " << list.size() << " map(s), " << samples
      << " points each\n";
  line("zero_order_max_rel_deviation", zero);
  line("first_order_max_rel_deviation", first);
  line("contraction_max_rel_deviation", scalar);
  const bool pass =
      zero.max_deviation <= tolerance && first.max_deviation <= tolerance && scalar.max_deviation <= tolerance;
  out << "tolerance " << format_number(tolerance) << "\n" << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int cmd_info(const std::string& in_path, std::ostream& out) {
  const FieldFileHeader h = read_header(in_path);
  out << "magic WVFIELD1\n";
  out << "dim " << int{h.dim} << "\n";
  out << "shape " << join_int<std::uint32_t>(h.shape) << "\n";
  out << "frames " << h.frames << "\n";
  out << "spacing " << join(h.spacing) << "\n";
  out << "origin " << join(h.origin) << "\n";
  out << "t0 " << format_number(h.t0) << "\n";
  out << "dt " << format_number(h.dt) << "\n";
  out << "payload_values " << h.payload_values() << "\n";
  out << "header_bytes " << h.header_bytes() << "\n";
  // Validate the payload as well.
  const SampledField f = read_field(in_path);
  const auto v = f.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  out << "value_range " << format_number(*lo) << "," << format_number(*hi) << "\n";
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"wvtool: local wave velocities of order zero and one for sampled scalar fields"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  // generate
  FieldOptions gen_field;
  std::vector<std::size_t> shape;
  std::vector<double> spacing;
  std::vector<double> origin;
  std::size_t frames = 1;
  double t0 = 0.0;
  double dt = 0.01;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "sample an analytic field into a field file");
  add_field_options(gen, gen_field);
  gen->add_option("--shape", shape, "points per axis")->delimiter(',')->required();
  gen->add_option("--spacing", spacing, "grid step per axis")->delimiter(',')->required();
  gen->add_option("--origin", origin, "grid origin per axis (default 0)")->delimiter(',');
  gen->add_option("--frames", frames, "number of time frames")->check(CLI::PositiveNumber);
  gen->add_option("--t0", t0, "first time stamp");
  gen->add_option("--dt", dt, "time step");
  gen->add_option("--out,-o", gen_out, "output field file")->required();

  // velocity
  std::string vel_in;
  int vel_order = 0;
  std::optional<std::size_t> vel_frame;
  StencilOptions vel_stencil;
  std::string vel_csv;
  auto* vel = app.add_subcommand("velocity", "0-PV or 1-PV over the grid of one frame");
  vel->add_option("--in,-i", vel_in, "field file")->required();
  vel->add_option("--order", vel_order, "velocity order (0 or 1)")->check(CLI::IsMember({0, 1}))->required();
  vel->add_option("--frame", vel_frame, "frame index (default: middle)");
  add_stencil_options(vel, vel_stencil);
  vel->add_option("--csv", vel_csv, "write per-point CSV");

  // scalar
  std::string sc_in;
  std::optional<std::size_t> sc_frame;
  StencilOptions sc_stencil;
  std::string sc_csv;
  auto* sc = app.add_subcommand("scalar", "contraction of the reciprocal 0-PV with the 1-PV");
  sc->add_option("--in,-i", sc_in, "field file")->required();
  sc->add_option("--frame", sc_frame, "frame index (default: middle)");
  add_stencil_options(sc, sc_stencil);
  sc->add_option("--csv", sc_csv, "write per-point CSV");

  // track
  std::string tr_in;
  std::string tr_attr = "gradient";
  double tr_level = 0.0;
  std::vector<double> tr_gradient;
  std::vector<std::size_t> tr_seed;
  double tr_tol = 1e-3;
  StencilOptions tr_stencil;
  auto* tr = app.add_subcommand("track", "track an attribute point across frames and compare velocities");
  tr->add_option("--in,-i", tr_in, "field file")->required();
  tr->add_option("--attribute", tr_attr, "gradient | level")->check(CLI::IsMember({"gradient", "level"}));
  tr->add_option("--level", tr_level, "psi_0 for the level attribute");
  tr->add_option("--gradient", tr_gradient, "gradient targets C_i (default 0)")->delimiter(',');
  tr->add_option("--seed", tr_seed, "seed grid index per axis")->delimiter(',');
  tr->add_option("--tolerance", tr_tol, "maximum accepted deviation");
  add_stencil_options(tr, tr_stencil);

  // covcheck
  FieldOptions cov_field;
  std::string cov_map = "random";
  std::vector<double> cov_matrix;
  std::vector<double> cov_offset;
  std::size_t cov_maps = 1;
  double cov_cond = 50.0;
  std::size_t cov_samples = 100;
  std::uint64_t cov_seed = 1;
  double cov_t = 0.0;
  double cov_radius = 1.0;
  double cov_tol = 1e-11;
  auto* cov = app.add_subcommand("covcheck", "check transformation laws under affine coordinate changes");
  add_field_options(cov, cov_field);
  cov->add_option("--map", cov_map, "identity | mirror | random | matrix")
      ->check(CLI::IsMember({"identity", "mirror", "random", "matrix"}));
  cov->add_option("--matrix", cov_matrix, "Jacobian dX/dx, row-major")->delimiter(',');
  cov->add_option("--offset", cov_offset, "map offset")->delimiter(',');
  cov->add_option("--maps", cov_maps, "number of random maps")->check(CLI::PositiveNumber);
  cov->add_option("--max-cond", cov_cond, "condition number bound for random maps");
  cov->add_option("--samples", cov_samples, "points per map")->check(CLI::PositiveNumber);
  cov->add_option("--seed", cov_seed, "random seed");
  cov->add_option("--t", cov_t, "time");
  cov->add_option("--box", cov_radius, "half-width of the sampling box around the field center");
  cov->add_option("--tolerance", cov_tol, "maximum accepted deviation");

  // info
  std::string info_in;
  auto* info = app.add_subcommand("info", "dump a field file header");
  info->add_option("--in,-i", info_in, "field file")->required();

  try {
    // --config is handled before CLI11 sees the arguments.
    std::vector<std::string> expanded;
    std::optional<std::string> config;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config") {
        if (i + 1 >= args.size()) throw UsageError("--config needs a file name");
        config = args[++i];
      } else if (args[i].rfind("--config=", 0) == 0) {
        config = args[i].substr(9);
      } else {
        expanded.push_back(args[i]);
      }
    }
    if (config) {
      const auto extra = config_tokens(*config, expanded);
      expanded.insert(expanded.end(), extra.begin(), extra.end());
    }
    std::reverse(expanded.begin(), expanded.end());
    app.parse(expanded);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_field, shape, spacing, origin, frames, t0, dt, gen_out, out);
    if (vel->parsed()) return cmd_velocity(vel_in, vel_order, vel_frame, vel_stencil, vel_csv, out, err);
    if (sc->parsed()) return cmd_scalar(sc_in, sc_frame, sc_stencil, sc_csv, out, err);
    if (tr->parsed()) {
      const bool stencil_set =
          tr->count("--stencil-order") > 0 || tr->count("--boundary") > 0 || tr->count("--hessian") > 0;
      if (stencil_set && tr->count("--boundary") == 0) tr_stencil.boundary = "one-sided";
      return cmd_track(tr_in, tr_attr, tr_level, tr_gradient, tr_seed, tr_tol, tr_stencil, stencil_set, out);
    }
    if (cov->parsed()) {
      return cmd_covcheck(cov_field, cov_map, cov_matrix, cov_offset, cov_maps, cov_cond, cov_samples, cov_seed,
                          cov_t, cov_radius, cov_tol, out);
    }
    if (info->parsed()) return cmd_info(info_in, out);
  } catch (const FieldFileError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const TrackingError& e) {
    err << "check failed: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace wavevel
