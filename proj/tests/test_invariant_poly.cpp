#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>

#include "cslab/invariant_poly.hpp"

using namespace cslab;
using Catch::Matchers::WithinAbs;

namespace {

SquareMatrix random_matrix(int n, Rng& rng, double scale = 1.0) {
  SquareMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.complex_uniform(scale);
  return m;
}

// Elementary symmetric functions of the eigenvalues.
std::vector<Complex> eigen_oracle(const SquareMatrix& x) {
  Eigen::ComplexEigenSolver<SquareMatrix> es(x);
  const auto& lam = es.eigenvalues();
  std::vector<Complex> e{1.0};
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    e.push_back(0.0);
    for (std::size_t k = e.size() - 1; k >= 1; --k) e[k] += lam(i) * e[k - 1];
  }
  return e;
}

// Coefficients of det(I + lambda x) by interpolation at lambda = 0..n.
std::vector<Complex> determinant_oracle(const SquareMatrix& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXcd v(n + 1, n + 1);
  Eigen::VectorXcd rhs(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) {
    const double lam = static_cast<double>(i);
    for (Eigen::Index k = 0; k <= n; ++k) v(i, k) = std::pow(lam, static_cast<double>(k));
    rhs(i) = (SquareMatrix::Identity(n, n) + lam * x).determinant();
  }
  const Eigen::VectorXcd c = v.fullPivLu().solve(rhs);
  return std::vector<Complex>(c.data(), c.data() + c.size());
}

SquareMatrix diag(std::initializer_list<double> d) {
  SquareMatrix m = SquareMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double v : d) m(i, i) = v, ++i;
  return m;
}

}  // namespace

TEST_CASE("char_coefficients of small fixed matrices") {
  const auto id = char_coefficients(SquareMatrix::Identity(2, 2));
  REQUIRE(id.size() == 3);
  CHECK(id[0] == Complex(1.0));
  CHECK(id[1] == Complex(2.0));
  CHECK(id[2] == Complex(1.0));

  const auto z = char_coefficients(SquareMatrix::Zero(3, 3));
  CHECK(z[0] == Complex(1.0));
  for (std::size_t k = 1; k <= 3; ++k) CHECK(z[k] == Complex(0.0));
  CHECK(z[7] == Complex(0.0));

  const SquareMatrix x = diag({1.0, 2.0});
  const auto got = char_coefficients(x);
  const auto want = determinant_oracle(x);
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(got[k] - want[k]) <= 1e-12);
  CHECK(std::abs(got[1] - 3.0) <= 1e-15);
  CHECK(std::abs(got[2] - 2.0) <= 1e-15);
}

TEST_CASE("char_coefficients matches eigenvalue symmetric functions") {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 2;
    const SquareMatrix x = random_matrix(n, rng);
    const auto got = char_coefficients(x);
    const auto want = eigen_oracle(x);
    CHECK(got[0] == Complex(1.0));
    for (int k = 1; k <= n; ++k)
      CHECK(std::abs(got[static_cast<std::size_t>(k)] - want[static_cast<std::size_t>(k)]) <=
            1e-10 * (1.0 + std::abs(want[static_cast<std::size_t>(k)])));
  }
}

TEST_CASE("polarized examples") {
  Rng rng(7);
  const SquareMatrix x = random_matrix(3, rng);
  CHECK(std::abs(polarized(1, {x}) - x.trace()) <= 1e-14);
  const SquareMatrix a = diag({1.0, 0.0}), b = diag({0.0, 1.0});
  CHECK_THAT(polarized(2, {a, b}).real(), WithinAbs(0.5, 1e-15));
  CHECK_THAT(polarized(2, {a, b}).imag(), WithinAbs(0.0, 1e-15));
  const auto e = char_coefficients(x);
  CHECK(std::abs(polarized(3, {x, x, x}) - e[3]) <= 1e-12 * (1.0 + std::abs(e[3])));
}

TEST_CASE("polarized on the diagonal reproduces E_p for 100 seeded matrices") {
  Rng rng(2024);
  const auto start = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 2;
    const SquareMatrix x = random_matrix(n, rng);
    const auto e = char_coefficients(x);
    for (int p = 1; p <= n; ++p) {
      const Complex pol = polarized(p, std::vector<SquareMatrix>(static_cast<std::size_t>(p), x));
      CHECK(std::abs(pol - e[static_cast<std::size_t>(p)]) <= 1e-10 * (1.0 + std::abs(e[static_cast<std::size_t>(p)])));
    }
  }
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 1.0);
}

TEST_CASE("polarized is exactly symmetric under permutations") {
  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    for (int p = 2; p <= 3; ++p) {
      std::vector<SquareMatrix> args;
      for (int i = 0; i < p; ++i) args.push_back(random_matrix(3, rng));
      const Complex ref = polarized(p, args);
      std::vector<int> perm(static_cast<std::size_t>(p));
      for (int i = 0; i < p; ++i) perm[static_cast<std::size_t>(i)] = i;
      while (std::next_permutation(perm.begin(), perm.end())) {
        std::vector<SquareMatrix> permuted;
        for (int i : perm) permuted.push_back(args[static_cast<std::size_t>(i)]);
        const Complex v = polarized(p, permuted);
        CHECK(v.real() == ref.real());
        CHECK(v.imag() == ref.imag());
      }
    }
  }
}

TEST_CASE("polarized is conjugation invariant") {
  Rng rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    SquareMatrix g = random_matrix(n, rng) + 2.0 * SquareMatrix::Identity(n, n);
    REQUIRE(std::abs(g.determinant()) > 1e-3);
    const SquareMatrix gi = g.inverse();
    for (int p = 1; p <= n; ++p) {
      std::vector<SquareMatrix> args, conj;
      for (int i = 0; i < p; ++i) {
        args.push_back(random_matrix(n, rng));
        conj.push_back(gi * args.back() * g);
      }
      CHECK(std::abs(polarized(p, conj) - polarized(p, args)) <= 1e-9);
    }
  }
}

TEST_CASE("polarized is multilinear in each slot") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3;
    for (int p = 1; p <= 3; ++p) {
      std::vector<SquareMatrix> args;
      for (int i = 0; i < p; ++i) args.push_back(random_matrix(n, rng));
      const SquareMatrix y = random_matrix(n, rng);
      const Complex alpha = rng.complex_uniform(2.0), beta = rng.complex_uniform(2.0);
      for (int slot = 0; slot < p; ++slot) {
        auto mixed = args, only_y = args;
        mixed[static_cast<std::size_t>(slot)] = alpha * args[static_cast<std::size_t>(slot)] + beta * y;
        only_y[static_cast<std::size_t>(slot)] = y;
        const Complex lhs = polarized(p, mixed);
        const Complex rhs = alpha * polarized(p, args) + beta * polarized(p, only_y);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
      }
    }
  }
}

TEST_CASE("polarized rejects bad degrees and shapes") {
  const SquareMatrix x = SquareMatrix::Identity(2, 2);
  CHECK_THROWS_AS(polarized(0, {x}), Error);
  CHECK_THROWS_AS(polarized(3, {x, x, x}), Error);
  CHECK_THROWS_AS(polarized(2, {x}), Error);
  CHECK_THROWS_AS(polarized(2, {x, SquareMatrix::Identity(3, 3)}), Error);
  CHECK_THROWS_AS(char_coefficients(SquareMatrix::Zero(2, 3)), Error);
}

TEST_CASE("power_sums agree with traces of powers") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const SquareMatrix x = random_matrix(3, rng);
    const auto s = power_sums(char_coefficients(x));
    SquareMatrix xp = SquareMatrix::Identity(3, 3);
    for (int k = 1; k <= 3; ++k) {
      xp = xp * x;
      CHECK(std::abs(s[static_cast<std::size_t>(k)] - xp.trace()) <= 1e-11 * (1.0 + std::abs(xp.trace())));
    }
  }
}
