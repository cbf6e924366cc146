// Small builders shared by the unit tests.
#pragma once

#include <memory>
#include <vector>

#include "cslab/families.hpp"

namespace cslab::testing {

inline SquareMatrix random_matrix(int n, Rng& rng, double scale = 1.0) {
  SquareMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.complex_uniform(scale);
  return m;
}

inline SquareMatrix diag(std::vector<Complex> d) {
  SquareMatrix m = SquareMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
  return m;
}

inline Connection random_connection(const TorusChart& chart, int rank, int max_mode, double amp, Rng& rng) {
  return Connection(TrigOneForm::random(chart.dim, rank, max_mode, amp, rng).sample(chart));
}

inline SimplexFamily random_affine(const TorusChart& chart, int rank, int r, int max_mode, double amp, Rng& rng) {
  std::vector<Connection> v;
  for (int i = 0; i <= r; ++i) v.push_back(random_connection(chart, rank, max_mode, amp, rng));
  return SimplexFamily::affine(std::move(v));
}

/// Constant commuting (diagonal) flat base, rank 2.
inline Connection diagonal_base(const TorusChart& chart) {
  std::vector<SquareMatrix> c;
  const std::vector<std::vector<Complex>> entries{{0.3, -0.2}, {0.1, 0.4}, {-0.25, 0.0}, {0.05, 0.15}};
  for (int axis = 0; axis < chart.dim; ++axis) c.push_back(diag(entries[static_cast<std::size_t>(axis)]));
  return Connection::constant(chart, c);
}

inline SimplexFamily orbit_family(const TorusChart& chart, int r, double amp, Rng& rng) {
  std::vector<TrigField> gens;
  for (int i = 0; i < r; ++i) gens.push_back(TrigField::random(chart.dim, 2, 1, amp, rng));
  return SimplexFamily::closed_form(std::make_shared<GaugeOrbitFamily>(diagonal_base(chart), gens));
}

/// Abelian closed-form family with seeded coefficients.
inline SimplexFamily abelian_family(const TorusChart& chart, std::vector<Complex> h, int r, Rng& rng) {
  AbelianFamily::Coefficients c;
  for (int axis = 0; axis < chart.dim; ++axis) {
    c.offset.push_back(rng.uniform(-0.5, 0.5));
    c.cosine.emplace_back();
    c.sine.emplace_back();
    for (int i = 0; i < r; ++i) {
      c.cosine.back().push_back(rng.uniform(-0.5, 0.5));
      c.sine.back().push_back(rng.uniform(-0.5, 0.5));
    }
  }
  return SimplexFamily::closed_form(std::make_shared<AbelianFamily>(chart, std::move(h), r, std::move(c)));
}

}  // namespace cslab::testing
