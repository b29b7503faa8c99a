#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "wavevel/field.hpp"
#include "wavevel/linalg.hpp"

namespace wavevel::testing {

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double rel_diff(std::span<const double> a, std::span<const double> b) {
  const double scale = std::max(max_abs(a), max_abs(b));
  return scale == 0.0 ? max_abs_diff(a, b) : max_abs_diff(a, b) / scale;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Q^T D Q with Gram-Schmidt Q; eigenvalue magnitudes in [0.5, 2] with random signs.
inline Matrix random_well_conditioned_symmetric(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : q[i]) x = g(rng);
    for (std::size_t j = 0; j < i; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < n; ++k) d += q[i][k] * q[j][k];
      for (std::size_t k = 0; k < n; ++k) q[i][k] -= d * q[j][k];
    }
    double norm = 0.0;
    for (double x : q[i]) norm += x * x;
    norm = std::sqrt(norm);
    for (auto& x : q[i]) x /= norm;
  }
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::bernoulli_distribution sign;
  std::vector<double> lambda(n);
  for (auto& l : lambda) l = mag(rng) * (sign(rng) ? 1.0 : -1.0);
  Matrix h(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) h(i, j) += q[k][i] * lambda[k] * q[k][j];
  return h;
}

inline Jet2 random_well_conditioned_jet(std::size_t n, std::mt19937_64& rng) {
  Jet2 jet(n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  jet.jet1.psi = u(rng);
  jet.jet1.dpsi_dt = u(rng);
  jet.jet1.grad = random_vector(n, rng);
  jet.hessian = SymmetricMatrix::from_upper(random_well_conditioned_symmetric(n, rng));
  jet.time_mixed = random_vector(n, rng);
  return jet;
}

inline Grid centered_grid(std::size_t dim, std::size_t extent, double h) {
  const double o = -h * static_cast<double>(extent / 2);
  return Grid(std::vector<std::size_t>(dim, extent), std::vector<double>(dim, h), std::vector<double>(dim, o));
}

}  // namespace wavevel::testing
