#include <catch_amalgamated.hpp>

#include <cmath>

#include "cslab/transgression.hpp"
#include "support.hpp"

using namespace cslab;
using namespace cslab::testing;

namespace {

// (-1/(2 pi i)) tr(A1 - A0), built directly from the x-components.
MixedForm trace_difference(const Connection& a0, const Connection& a1) {
  return trace(a1.form() - a0.form()) * kChernNormalization;
}

SimplexFamily constant_pencil(const TorusChart& chart, Rng& rng, int r) {
  std::vector<Connection> v;
  for (int i = 0; i <= r; ++i) {
    std::vector<SquareMatrix> c;
    for (int axis = 0; axis < chart.dim; ++axis)
      c.push_back(diag({rng.complex_uniform(1.0), rng.complex_uniform(1.0), rng.complex_uniform(1.0)}));
    v.push_back(Connection::constant(chart, c));
  }
  return SimplexFamily::affine(std::move(v));
}

}  // namespace

TEST_CASE("total curvature structure") {
  Rng rng(41);
  const TorusChart chart(3, 12);
  const SimplexFamily zero = SimplexFamily::affine({Connection::zero(chart, 2), Connection::zero(chart, 2)});
  CHECK(total_curvature(zero, barycenter(1)).max_norm() == 0.0);

  const SimplexFamily aff = random_affine(chart, 2, 2, 1, 2.0, rng);
  const MixedForm f = total_curvature(aff, {0.2, 0.3, 0.5});
  REQUIRE(f.odd_params() == 2);
  for (const auto& [key, field] : f.components()) CHECK(key.gens != 3u);
  for (int i = 1; i <= 2; ++i) {
    const MixedForm want = kChernNormalization * (aff.vertices()[static_cast<std::size_t>(i)].form() - aff.vertices()[0].form());
    const MixedForm got = fiber_extract(f, {i - 1});
    MixedForm mixed(chart, 2, 0, 1);
    for (const auto& [key, field] : got.components())
      if (key.gens == 0) mixed.set(key, field);
    CHECK(max_norm_difference(mixed, want) == 0.0);
  }

  const SimplexFamily orbit = orbit_family(TorusChart(3, 20), 1, 0.5, rng);
  const MixedForm fo = total_curvature(orbit, {0.4, 0.6});
  double pure = 0.0, mixed = 0.0;
  for (const auto& [key, field] : fo.components())
    for (const auto& v : field) (key.gens == 0 ? pure : mixed) = std::max(key.gens == 0 ? pure : mixed, std::abs(v));
  CHECK(pure <= 1e-9);
  CHECK(mixed > 1e-3);
}

TEST_CASE("TP examples") {
  Rng rng(42);
  const TorusChart chart(3, 12);
  const Connection a = random_connection(chart, 2, 1, 2.0, rng);
  CHECK(transgress_tp(SimplexFamily::affine({a, a, a}), 2).max_norm() <= 1e-13);

  const SimplexFamily edge = random_affine(chart, 2, 1, 1, 2.0, rng);
  const MixedForm tp1 = transgress_tp(edge, 1);
  CHECK(tp1.degree() == 1);
  CHECK(max_norm_difference(tp1, trace_difference(edge.vertices()[0], edge.vertices()[1])) <= 1e-10);

  CHECK_THROWS_AS(transgress_tp(random_affine(chart, 2, 3, 1, 1.0, rng), 1), Error);
  CHECK_THROWS_AS(transgress_tp(edge, 3), Error);
  CHECK_THROWS_AS(transgress_tp(edge, 2, simplex_rule(2, 5)), Error);
  // 2p - r = 4 > d = 3: zero form, flagged by degree
  const MixedForm big = transgress_tp(SimplexFamily::affine({a}), 2);
  CHECK(exceeds_chart(big));
  CHECK(big.max_norm() == 0.0);
}

TEST_CASE("Karoubi identity on affine simplices") {
  Rng rng(43);
  const TorusChart t3(3, 12);
  for (int r = 1; r <= 2; ++r) {
    const SimplexFamily fam = random_affine(t3, 2, r, 1, 4.0, rng);
    CHECK(verify_kform(fam, 2) <= 1e-8);
    CHECK(verify_kform(fam, 1) <= 1e-10);
  }
  const Connection a = random_connection(t3, 2, 1, 2.0, rng);
  CHECK(verify_kform(SimplexFamily::affine({a, a}), 2) <= 1e-12);

  // degree-4 case, not vacuous on T^4
  const TorusChart t4(4, 10);
  const SimplexFamily e4 = random_affine(t4, 2, 1, 1, 8.0, rng);
  CHECK(exterior_derivative_x(transgress_tp(e4, 2)).max_norm() > 1e-3);
  CHECK(verify_kform(e4, 2) <= 1e-8);
}

TEST_CASE("Karoubi sign: the alternating sum alone fails at odd r") {
  Rng rng(44);
  const TorusChart chart(3, 12);
  const SimplexFamily edge = random_affine(chart, 2, 1, 1, 4.0, rng);
  MixedForm lhs = exterior_derivative_x(transgress_tp(edge, 1));
  for (int i = 0; i <= 1; ++i) lhs += ipow_sign(i) * transgress_tp(edge.face(i), 1);
  CHECK(lhs.max_norm() > 1e-3);
  CHECK(verify_kform(edge, 1) <= 1e-10);
  // at even r both readings coincide
  const SimplexFamily tri = random_affine(chart, 2, 2, 1, 4.0, rng);
  MixedForm lhs2 = exterior_derivative_x(transgress_tp(tri, 2));
  for (int i = 0; i <= 2; ++i) lhs2 += ipow_sign(i) * transgress_tp(tri.face(i), 2);
  CHECK(lhs2.max_norm() <= 1e-8);
}

TEST_CASE("quadrature refinement is exact for affine families") {
  Rng rng(45);
  const TorusChart chart(3, 12);
  for (int r = 1; r <= 2; ++r) {
    const SimplexFamily fam = random_affine(chart, 2, r, 1, 4.0, rng);
    CHECK(quadrature_refinement_delta(fam, 2) <= 1e-12);
    TransgressionOptions gm;
    gm.rule_kind = SimplexRuleKind::grundmann_moller;
    CHECK(max_norm_difference(transgress_tp(fam, 2, gm), transgress_tp(fam, 2)) <= 1e-12);
  }
}

TEST_CASE("eta forms") {
  Rng rng(46);
  const TorusChart t3(3, 12);
  const SimplexFamily edge = random_affine(t3, 2, 1, 1, 2.0, rng);
  const MixedForm eta1 = eta_form(edge, 1);
  CHECK(max_norm_difference(eta1, trace_difference(edge.vertices()[0], edge.vertices()[1])) <= 1e-10);
  CHECK(max_norm_difference(eta1, eta_form_direct(edge, 1)) <= 1e-10);
  CHECK(max_norm_difference(eta_form(edge, 2), eta_form_direct(edge, 2)) <= 1e-10);

  const Connection a = random_connection(t3, 2, 1, 2.0, rng);
  CHECK(eta_form(SimplexFamily::affine({a, a}), 2).max_norm() <= 1e-13);
  CHECK_THROWS_AS(eta_form(random_affine(t3, 2, 2, 1, 1.0, rng), 1), Error);

  // d eta_p = c_p(A1) - c_p(A0)
  const TorusChart t4(4, 10);
  const SimplexFamily e4 = random_affine(t4, 2, 1, 1, 8.0, rng);
  const MixedForm want = chern_form(e4.vertices()[1], 2) - chern_form(e4.vertices()[0], 2);
  CHECK(want.max_norm() > 1e-3);
  CHECK(max_norm_difference(exterior_derivative_x(eta_form(e4, 2)), want) <= 1e-8);
  const MixedForm want1 = chern_form(edge.vertices()[1], 1) - chern_form(edge.vertices()[0], 1);
  CHECK(max_norm_difference(exterior_derivative_x(eta_form(edge, 1)), want1) <= 1e-8);
}

TEST_CASE("rigidity: eta vanishes on fiberwise-flat paths for p >= 2") {
  Rng rng(47);
  const TorusChart t3(3, 20);
  TransgressionOptions opt;
  opt.closed_form_degree = 13;
  const SimplexFamily pencil = constant_pencil(t3, rng, 1);
  const SimplexFamily loop = abelian_family(t3, {1.0, 2.0, Complex(0, 1)}, 1, rng);
  const SimplexFamily orbit = orbit_family(t3, 1, 0.5, rng);
  for (int p = 2; p <= 3; ++p) {
    CHECK(eta_form(pencil, p, opt).max_norm() <= 1e-11);
    CHECK(eta_form(loop, p, opt).max_norm() <= 1e-11);
  }
  CHECK(eta_form(orbit, 2, opt).max_norm() <= 1e-11);
  // p = 1: zero on the closed loop (needs the finer default rule), nonzero on the pencil
  CHECK(eta_form(loop, 1).max_norm() <= 1e-11);
  CHECK(eta_form(pencil, 1, opt).max_norm() > 1e-3);
}

TEST_CASE("fiberwise-flat vanishing of densities and TP for r < p") {
  Rng rng(48);
  const TorusChart chart(3, 20);
  TransgressionOptions opt;
  opt.closed_form_degree = 13;
  const SimplexFamily loop = abelian_family(chart, {1.0, -2.0}, 1, rng);
  const SimplexFamily orbit = orbit_family(chart, 1, 0.5, rng);
  for (const auto* fam : {&loop, &orbit}) {
    for (const auto& t : default_flatness_samples(1)) CHECK(chern_density(*fam, 2, t).max_norm() <= 1e-11);
    CHECK(transgress_tp(*fam, 2, opt).max_norm() <= 1e-11);
  }
  // structural bound C * eps with C <= 10
  const double eps = fiberwise_flat_residual(orbit, default_flatness_samples(1));
  for (const auto& t : default_flatness_samples(1))
    CHECK(chern_density(orbit, 2, t).max_norm() <= std::max(10.0 * eps, 1e-11));
}

TEST_CASE("omega and Chern-Simons examples") {
  Rng rng(49);
  const TorusChart t3(3, 12);
  CHECK(omega_form(SimplexFamily::affine({Connection::zero(t3, 2), Connection::zero(t3, 2)}), 2).max_norm() == 0.0);
  CHECK(cs_form(Connection::zero(t3, 2), 2).max_norm() == 0.0);

  const Connection a = random_connection(t3, 2, 1, 2.0, rng);
  CHECK(max_norm_difference(cs_form(a, 1), trace(a.form()) * kChernNormalization) <= 1e-14);

  const Connection commuting = diagonal_base(t3);
  CHECK(cs_form(commuting, 2).max_norm() <= 1e-15);

  CHECK_THROWS_AS(omega_form(random_affine(t3, 2, 2, 1, 1.0, rng), 2), Error);
  CHECK_THROWS_AS(omega_form(random_affine(t3, 2, 1, 1, 1.0, rng), 1), Error);
}

TEST_CASE("d(cs) equals the Chern form") {
  Rng rng(50);
  const TorusChart t3(3, 12);
  const Connection a3 = random_connection(t3, 2, 1, 2.0, rng);
  CHECK(max_norm_difference(exterior_derivative_x(cs_form(a3, 1)), chern_form(a3, 1)) <= 1e-9);

  const TorusChart t4(4, 10);
  const Connection a4 = random_connection(t4, 2, 1, 8.0, rng);
  const MixedForm c2 = chern_form(a4, 2);
  CHECK(c2.max_norm() > 1e-3);
  CHECK(max_norm_difference(exterior_derivative_x(cs_form(a4, 2)), c2) <= 1e-9);

  // flat connection on T^3 (vanishes by degree there)
  const GaugeMap g = GaugeMap::exponential(t3, TrigField::random(3, 2, 1, 0.3, rng));
  const Connection flat = gauge_transform(diagonal_base(t3), g);
  CHECK(exterior_derivative_x(cs_form(flat, 2)).max_norm() <= 1e-10);
}

TEST_CASE("omega identity") {
  Rng rng(51);
  const TorusChart t3(3, 12);
  const SimplexFamily edge = random_affine(t3, 2, 1, 1, 4.0, rng);
  CHECK(verify_oform(edge, 2) <= 1e-8);
  CHECK(verify_oform(SimplexFamily::affine({Connection::zero(t3, 2), Connection::zero(t3, 2)}), 2) <= 1e-12);

  TransgressionOptions bent;
  bent.path.bend = random_connection(t3, 2, 1, 2.0, rng);
  CHECK(verify_oform(edge, 2, bent) <= 1e-8);
  CHECK(max_norm_difference(omega_form(edge, 2, bent), omega_form(edge, 2)) > 1e-6);

  // the face sum without the extra (-1)^r leaves a residual
  MixedForm lhs = exterior_derivative_x(omega_form(edge, 2));
  for (int i = 0; i <= 1; ++i) lhs += ipow_sign(i) * omega_form(edge.face(i), 2);
  lhs += ipow_sign(2) * transgress_tp(edge, 2);
  CHECK(lhs.max_norm() > 1e-3);

  TransgressionOptions opt;
  opt.closed_form_degree = 13;
  const SimplexFamily orbit = orbit_family(TorusChart(3, 20), 1, 0.5, rng);
  CHECK(transgress_tp(orbit, 2, opt).max_norm() <= 1e-11);
  CHECK(verify_oform(orbit, 2, opt) <= 1e-8);
  CHECK(omega_refinement_delta(edge, 2) <= 1e-12);
}

TEST_CASE("large gauge transformations shift the p = 1 pairing by integers") {
  Rng rng(52);
  const TorusChart t1(1, 16);
  const Connection a = random_connection(t1, 2, 2, 3.0, rng);
  const Complex base = integrate_cycle(cs_form(a, 1), coordinate_cycle({0}));
  for (const std::vector<int>& w : {std::vector<int>{1, 0}, {3, -1}, {-2, -2}}) {
    const Connection ag = gauge_transform(a, GaugeMap::winding(t1, w, 0));
    const Complex shifted = integrate_cycle(cs_form(ag, 1), coordinate_cycle({0}));
    const Complex delta = shifted - base;
    CHECK(std::abs(delta.real() - std::round(delta.real())) <= 1e-10);
    CHECK(std::abs(delta.imag()) <= 1e-10);
    CHECK(std::abs(delta.real() + (w[0] + w[1])) <= 1e-10);
  }
}
