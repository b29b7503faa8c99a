#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "support.hpp"
#include "wavevel/field.hpp"

using namespace wavevel;
using namespace wavevel::testing;

namespace {

std::vector<AnalyticField> catalog(std::size_t dim) {
  std::vector<AnalyticField> out;
  std::vector<double> k(dim), c(dim), x0(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    k[i] = 1.0 + 0.5 * static_cast<double>(i);
    c[i] = 0.7 - 0.3 * static_cast<double>(i);
    x0[i] = 0.1 * static_cast<double>(i + 1);
  }
  out.push_back(AnalyticField::plane_wave(k, 1.3, 0.2, 1.5));
  out.push_back(AnalyticField::translating_gaussian(c, 0.9, x0, 2.0));
  out.push_back(AnalyticField::static_gaussian(x0, 1.1));
  out.push_back(AnalyticField::expanding_ring(x0, 0.6, 0.4, 0.5));
  std::vector<Monomial> terms;
  std::vector<int> p(dim, 0);
  p[0] = 3;
  terms.push_back({0.5, p, 1});
  if (dim > 1) {
    p.assign(dim, 0);
    p[0] = 1;
    p[1] = 2;
    terms.push_back({-1.25, p, 2});
  }
  p.assign(dim, 2);
  terms.push_back({0.75, p, 0});
  out.push_back(AnalyticField::polynomial(dim, terms));
  return out;
}

// Second-order central differences of evaluate(); independent of analytic_jet2.
Jet2 central_jet(const AnalyticField& f, std::vector<double> x, double t, double h) {
  const std::size_t n = x.size();
  auto ev = [&](const std::vector<double>& y, double s) { return f.evaluate(y, s); };
  Jet2 j(n);
  j.jet1.psi = ev(x, t);
  j.jet1.dpsi_dt = (ev(x, t + h) - ev(x, t - h)) / (2 * h);
  for (std::size_t i = 0; i < n; ++i) {
    auto xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    j.jet1.grad[i] = (ev(xp, t) - ev(xm, t)) / (2 * h);
    j.time_mixed[i] = (ev(xp, t + h) - ev(xp, t - h) - ev(xm, t + h) + ev(xm, t - h)) / (4 * h * h);
    for (std::size_t k = i; k < n; ++k) {
      if (k == i) {
        j.hessian(i, i) = (ev(xp, t) - 2 * ev(x, t) + ev(xm, t)) / (h * h);
        continue;
      }
      auto pp = x, pm = x, mp = x, mm = x;
      pp[i] += h, pp[k] += h;
      pm[i] += h, pm[k] -= h;
      mp[i] -= h, mp[k] += h;
      mm[i] -= h, mm[k] -= h;
      j.hessian(i, k) = (ev(pp, t) - ev(pm, t) - ev(mp, t) + ev(mm, t)) / (4 * h * h);
    }
  }
  return j;
}

std::vector<double> flatten(const Jet2& j) {
  std::vector<double> v = {j.jet1.psi, j.jet1.dpsi_dt};
  v.insert(v.end(), j.jet1.grad.begin(), j.jet1.grad.end());
  v.insert(v.end(), j.hessian.packed().begin(), j.hessian.packed().end());
  v.insert(v.end(), j.time_mixed.begin(), j.time_mixed.end());
  return v;
}

}  // namespace

TEST_CASE("make_grid accepts valid grids") {
  const Grid g = make_grid(2, {64, 64}, {0.1, 0.1}, {0, 0});
  CHECK(g.point_count() == 4096);
  CHECK(g.coordinate(1, 10) == doctest::Approx(1.0));
  const Grid m = make_grid(1, {5}, {1.0}, {0});
  CHECK(m.point_count() == 5);
}

TEST_CASE("make_grid rejects invalid grids") {
  CHECK_THROWS_AS(make_grid(2, {4, 64}, {0.1, 0.1}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(2, {8, 8}, {0.0, 0.1}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(2, {8, 8}, {-0.1, 0.1}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0, {}, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(2, {8}, {0.1}, {0}), std::invalid_argument);
}

TEST_CASE("grid index round trip is row-major") {
  const Grid g({5, 6, 7}, {1, 1, 1}, {0, 0, 0});
  CHECK(g.stride(2) == 1);
  CHECK(g.stride(0) == 42);
  for (std::size_t k = 0; k < g.point_count(); k += 13) CHECK(g.linear_index(g.multi_index(k)) == k);
  const std::size_t bad[] = {5, 0, 0};
  CHECK_THROWS_AS(g.linear_index(bad), std::out_of_range);
}

TEST_CASE("sampled field validates its payload") {
  const Grid g({5}, {1.0}, {0.0});
  CHECK_THROWS_AS(SampledField(g, 0.0, 1.0, 2, std::vector<double>(9)), std::invalid_argument);
  std::vector<double> v(10, 0.0);
  v[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SampledField(g, 0.0, 1.0, 2, v), std::invalid_argument);
  CHECK_THROWS_AS(SampledField(g, 0.0, 0.0, 2, std::vector<double>(10)), std::invalid_argument);
  CHECK_NOTHROW(SampledField(g, 0.0, 0.0, 1, std::vector<double>(5)));
}

TEST_CASE("sample rejects non-increasing or non-uniform times") {
  const Grid g({5}, {1.0}, {0.0});
  const auto f = AnalyticField::static_gaussian({0.0}, 1.0);
  const double back[] = {0.0, -1.0};
  CHECK_THROWS_AS(sample(f, g, back), std::invalid_argument);
  const double uneven[] = {0.0, 1.0, 3.0};
  CHECK_THROWS_AS(sample(f, g, uneven), std::invalid_argument);
}

TEST_CASE("analytic parameters are validated") {
  CHECK_THROWS_AS(AnalyticField::plane_wave({0.0, 0.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(AnalyticField::translating_gaussian({0.7, 0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(AnalyticField::static_gaussian({0.0}, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(AnalyticField::expanding_ring({0.0, 0.0}, 1.0, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(AnalyticField::plane_wave({1.0}, std::numeric_limits<double>::infinity()), std::invalid_argument);
  CHECK_THROWS_AS(parse_field_kind("sawtooth"), std::invalid_argument);
  CHECK(parse_field_kind("translating_gaussian") == FieldKind::translating_gaussian);
  CHECK(parse_field_kind(to_string(FieldKind::expanding_gaussian_ring)) == FieldKind::expanding_gaussian_ring);
}

TEST_CASE("sample: worked values") {
  const auto wave = AnalyticField::plane_wave({2.0, 1.0}, 3.0);
  const double origin[] = {0.0, 0.0};
  CHECK(wave.evaluate(origin, 0.0) == 0.0);
  const auto g = AnalyticField::translating_gaussian({0.7, 0.0}, 1.0);
  const double p[] = {0.1, 0.2};
  CHECK(g.evaluate(p, 0.0) == doctest::Approx(std::exp(-0.05)).epsilon(1e-15));
}

TEST_CASE("static gaussian samples are reflection symmetric on a centered grid") {
  const Grid grid = centered_grid(2, 9, 0.25);
  const auto s = sample(AnalyticField::static_gaussian({0.0, 0.0}, 0.8), grid, std::vector<double>{0.0});
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) {
      const std::size_t a[] = {i, j}, b[] = {8 - i, 8 - j}, c[] = {8 - i, j};
      CHECK(s.at(0, grid.linear_index(a)) == s.at(0, grid.linear_index(b)));
      CHECK(s.at(0, grid.linear_index(a)) == s.at(0, grid.linear_index(c)));
    }
}

TEST_CASE("parallel and serial sampling are bit-identical") {
  const Grid grid = centered_grid(3, 17, 0.1);
  const auto f = AnalyticField::expanding_ring({0.05, 0.0, -0.02}, 0.5, 0.3, 0.2);
  const auto times = uniform_times(0.0, 0.05, 3);
  const auto a = sample(f, grid, times);
  const auto b = reference::sample(f, grid, times);
  REQUIRE(a.values().size() == b.values().size());
  for (std::size_t k = 0; k < a.values().size(); ++k) REQUIRE(a.values()[k] == b.values()[k]);
}

TEST_CASE("analytic_jet2: plane wave worked example") {
  const auto f = AnalyticField::plane_wave({2.0, 1.0}, 3.0);
  const double x[] = {0.3, -0.2};
  const double theta = 2 * 0.3 - 0.2 - 3 * 0.1;
  const Jet2 j = analytic_jet2(f, x, 0.1);
  CHECK(j.jet1.grad[0] == doctest::Approx(2 * std::cos(theta)).epsilon(1e-15));
  CHECK(j.jet1.grad[1] == doctest::Approx(std::cos(theta)).epsilon(1e-15));
  CHECK(j.jet1.dpsi_dt == doctest::Approx(-3 * std::cos(theta)).epsilon(1e-15));
}

TEST_CASE("analytic_jet2: gaussian hessian worked example") {
  const auto f = AnalyticField::translating_gaussian({0.7, 0.0}, 1.0);
  const double x[] = {0.1, 0.2};
  const Jet2 j = analytic_jet2(f, x, 0.0);
  const double psi = std::exp(-0.05), u = 0.1, y = 0.2;
  CHECK(j.hessian(0, 0) == doctest::Approx(psi * (4 * u * u - 2)).epsilon(1e-14));
  CHECK(j.hessian(0, 1) == doctest::Approx(psi * 4 * u * y).epsilon(1e-14));
  CHECK(j.hessian(1, 1) == doctest::Approx(psi * (4 * y * y - 2)).epsilon(1e-14));
}

TEST_CASE("analytic_jet2: static field has no time dependence") {
  std::mt19937_64 rng(5);
  const auto f = AnalyticField::static_gaussian({0.2, -0.1, 0.3}, 0.7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_vector(3, rng);
    const Jet2 j = analytic_jet2(f, x, 1.7);
    CHECK(j.jet1.dpsi_dt == 0.0);
    for (double v : j.time_mixed) CHECK(v == 0.0);
  }
}

TEST_CASE("analytic_jet2: polynomial is exact") {
  // psi = x^2 + 3xy + 2t
  const auto f = AnalyticField::polynomial(2, {{1.0, {2, 0}, 0}, {3.0, {1, 1}, 0}, {2.0, {0, 0}, 1}});
  const double x[] = {0.5, -1.5};
  const Jet2 j = analytic_jet2(f, x, 0.25);
  CHECK(j.jet1.psi == doctest::Approx(0.25 - 2.25 + 0.5));
  CHECK(j.jet1.grad[0] == doctest::Approx(1.0 - 4.5));
  CHECK(j.jet1.grad[1] == doctest::Approx(1.5));
  CHECK(j.jet1.dpsi_dt == 2.0);
  CHECK(j.hessian(0, 0) == 2.0);
  CHECK(j.hessian(0, 1) == 3.0);
  CHECK(j.hessian(1, 1) == 0.0);
}

TEST_CASE("ring derivatives are undefined at the center") {
  const auto f = AnalyticField::expanding_ring({0.0, 0.0}, 0.5, 0.2, 0.3);
  const double c[] = {0.0, 0.0};
  CHECK_THROWS_AS(analytic_jet2(f, c, 0.0), std::domain_error);
}

TEST_CASE("analytic jets converge against central differences of evaluate") {
  std::mt19937_64 rng(21);
  for (std::size_t dim : {1u, 2u, 3u}) {
    for (const auto& f : catalog(dim)) {
      CAPTURE(to_string(f.kind()));
      CAPTURE(dim);
      for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_vector(dim, rng, -1.0, 1.0);
        const double t = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
        if (f.kind() == FieldKind::expanding_gaussian_ring) {
          // The ring profile has a kink at its center; keep the stencil clear of it.
          double r2 = 0.0;
          for (std::size_t i = 0; i < dim; ++i) {
            const double d = x[i] - 0.1 * static_cast<double>(i + 1);
            r2 += d * d;
          }
          if (r2 < 0.01) continue;
        }
        const auto exact = flatten(analytic_jet2(f, x, t));
        const auto e1 = flatten(central_jet(f, x, t, 1e-2));
        const auto e2 = flatten(central_jet(f, x, t, 5e-3));
        const double scale = std::max(1.0, max_abs(exact));
        for (std::size_t c = 0; c < exact.size(); ++c) {
          const double a = std::abs(e1[c] - exact[c]);
          const double b = std::abs(e2[c] - exact[c]);
          if (a < 1e-8 * scale) {
            CHECK(b < 1e-7 * scale);  // exact component (polynomial) or a vanishing error
            continue;
          }
          CHECK(std::log2(a / b) >= 1.9);
        }
      }
    }
  }
}

TEST_CASE("hessian of analytic jets is symmetric as stored") {
  const auto f = catalog(3)[1];
  const double x[] = {0.3, 0.1, -0.4};
  const Jet2 j = analytic_jet2(f, x, 0.2);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k) CHECK(j.hessian(i, k) == j.hessian(k, i));
  const Matrix m = j.hessian.to_matrix();
  CHECK(m(0, 2) == m(2, 0));
}

TEST_CASE("advection identities hold for translating gaussians") {
  std::mt19937_64 rng(99);
  for (std::size_t dim : {1u, 2u, 3u, 4u}) {
    const auto c = random_vector(dim, rng);
    const auto f = AnalyticField::translating_gaussian(c, 0.8, random_vector(dim, rng));
    REQUIRE(f.translation_velocity() == c);
    for (int trial = 0; trial < 200; ++trial) {
      const auto x = random_vector(dim, rng, -1.5, 1.5);
      const Jet2 j = analytic_jet2(f, x, 0.3);
      double s = 0.0, mag = std::abs(j.jet1.dpsi_dt);
      for (std::size_t i = 0; i < dim; ++i) {
        s += c[i] * j.jet1.grad[i];
        mag += std::abs(c[i] * j.jet1.grad[i]);
      }
      CHECK(std::abs(j.jet1.dpsi_dt + s) <= 1e-12 * mag);
      for (std::size_t a = 0; a < dim; ++a) {
        double r = 0.0, m = std::abs(j.time_mixed[a]);
        for (std::size_t i = 0; i < dim; ++i) {
          r += c[i] * j.hessian(a, i);
          m += std::abs(c[i] * j.hessian(a, i));
        }
        CHECK(std::abs(j.time_mixed[a] + r) <= 1e-12 * m);
      }
    }
  }
}
