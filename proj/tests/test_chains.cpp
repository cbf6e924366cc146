#include <catch_amalgamated.hpp>

#include <cmath>

#include "cslab/chains.hpp"
#include "support.hpp"

using namespace cslab;
using namespace cslab::testing;

namespace {

SimplexChain triangle_cycle(const std::vector<Connection>& d) {
  SimplexChain c(1);
  c.add(1, SimplexFamily::affine({d[0], d[1]}));
  c.add(1, SimplexFamily::affine({d[1], d[2]}));
  c.add(1, SimplexFamily::affine({d[2], d[0]}));
  return c;
}

std::vector<CycleSpec> coordinate_two_tori() {
  return {coordinate_cycle({0, 1}), coordinate_cycle({0, 2}), coordinate_cycle({1, 2})};
}

// Off-grid evaluation of a rank-2 trig one-form on T^3 from its modes.
class PointConnection {
 public:
  explicit PointConnection(const TrigOneForm& a) {
    for (const auto& field : a.components) {
      std::vector<std::pair<std::array<int, 3>, Eigen::Matrix2cd>> modes;
      for (const auto& m : field.modes()) modes.push_back({{m.wave[0], m.wave[1], m.wave[2]}, Eigen::Matrix2cd(m.coeff)});
      axes_.push_back(std::move(modes));
    }
  }

  std::array<Eigen::Matrix2cd, 3> operator()(const std::array<double, 3>& x) const {
    std::array<std::array<Complex, 3>, 3> powers{};  // e^{2 pi i k x_j}, k = -1..1
    for (std::size_t j = 0; j < 3; ++j) {
      const Complex e = std::exp(kTwoPiI * x[j]);
      powers[j] = {std::conj(e), 1.0, e};
    }
    std::array<Eigen::Matrix2cd, 3> out;
    for (std::size_t axis = 0; axis < 3; ++axis) {
      out[axis].setZero();
      for (const auto& [wave, coeff] : axes_[axis]) {
        Complex ph = 1.0;
        for (std::size_t j = 0; j < 3; ++j) ph *= powers[j][static_cast<std::size_t>(wave[j] + 1)];
        out[axis] += ph * coeff;
      }
    }
    return out;
  }

 private:
  std::vector<std::vector<std::pair<std::array<int, 3>, Eigen::Matrix2cd>>> axes_;
};

}  // namespace

TEST_CASE("boundary of an edge and of a triangle") {
  Rng rng(61);
  const TorusChart chart(2, 8);
  std::vector<Connection> d;
  for (int i = 0; i < 3; ++i) d.push_back(random_connection(chart, 2, 1, 1.0, rng));

  const SimplexChain bd = boundary(SimplexChain::single(SimplexFamily::affine({d[0], d[1]})));
  REQUIRE(bd.terms().size() == 2);
  CHECK(bd.terms()[0].coeff == 1);
  CHECK(max_norm_difference(bd.terms()[0].family.vertices()[0].form(), d[1].form()) == 0.0);
  CHECK(bd.terms()[1].coeff == -1);
  CHECK(max_norm_difference(bd.terms()[1].family.vertices()[0].form(), d[0].form()) == 0.0);

  CHECK(boundary(triangle_cycle(d)).empty());
  CHECK(is_cycle(triangle_cycle(d)));
  CHECK_FALSE(is_cycle(SimplexChain::single(SimplexFamily::affine({d[0], d[1]}))));

  SimplexChain two(2);
  two.add(2, SimplexFamily::affine({d[0], d[1], d[2]}));
  two.add(-1, SimplexFamily::affine({d[2], d[0], d[1]}));
  CHECK(boundary(boundary(two)).empty());
  SimplexChain orbit2(2);
  orbit2.add(1, orbit_family(TorusChart(2, 8), 2, 0.3, rng));
  CHECK(boundary(boundary(orbit2)).empty());
  CHECK_THROWS_AS(boundary(SimplexChain(0)), Error);
}

TEST_CASE("like terms merge within the comparator tolerance") {
  Rng rng(62);
  const TorusChart chart(2, 8);
  std::vector<Connection> d;
  for (int i = 0; i < 3; ++i) d.push_back(random_connection(chart, 2, 1, 1.0, rng));
  MixedForm bump(chart, 2, 0, 1);
  bump.set(FormKey{0, 1u}, MixedForm::constant_field(chart, SquareMatrix::Constant(2, 2, 1e-11)));
  const Connection d1b(d[1].form() + bump);

  SimplexChain c(1);
  c.add(1, SimplexFamily::affine({d[0], d[1]}));
  c.add(1, SimplexFamily::affine({d1b, d[2]}));
  c.add(1, SimplexFamily::affine({d[2], d[0]}));
  CHECK(is_cycle(c, 1e-10));
  CHECK_FALSE(is_cycle(c));

  SimplexChain e(1);
  e.add(3, SimplexFamily::affine({d[0], d[1]}));
  e.add(-3, SimplexFamily::affine({d[0], d[1]}));
  CHECK(e.empty());
  e.add(0, SimplexFamily::affine({d[0], d[1]}));
  CHECK(e.empty());
  CHECK_THROWS_AS(e.add(1, SimplexFamily::affine({d[0]})), Error);
  e.add(1, SimplexFamily::affine({d[0], d[1]}));
  CHECK_THROWS_AS(e.add(1, SimplexFamily::affine({Connection::zero(chart, 3), Connection::zero(chart, 3)})), Error);
  CHECK_THROWS_AS(e.add(1, SimplexFamily::affine({Connection::zero(TorusChart(2, 12), 2), Connection::zero(TorusChart(2, 12), 2)})), Error);
}

TEST_CASE("mod_reduce") {
  CHECK(mod_reduce(1.25).representative == Complex(0.25, 0.0));
  const ModZValue v = mod_reduce(Complex(-0.1, 2.0));
  CHECK(std::abs(v.representative - Complex(0.9, 2.0)) <= 1e-15);
  CHECK(v.representative.imag() == 2.0);
  CHECK(mod_reduce(3.0).representative == Complex(0.0, 0.0));
  CHECK(mod_reduce(-1e-20).representative.real() == 0.0);

  Rng rng(63);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform(-0.5, 0.5) * 0x1.0p-4;  // dyadic grid: shifts are exact
    const double xr = std::ldexp(std::round(std::ldexp(x, 40)), -40);
    const Complex z{xr, rng.uniform(-1, 1)};
    const int k = static_cast<int>(rng.uniform(-50, 50));
    CHECK(mod_reduce(z + static_cast<double>(k)).representative == mod_reduce(z).representative);
  }
  CHECK(mod_distance(mod_reduce(0.999), mod_reduce(0.001)) == Catch::Approx(0.002).margin(1e-12));
}

TEST_CASE("rho of the zero-connection triangle") {
  const TorusChart chart(3, 8);
  const Connection z = Connection::zero(chart, 2);
  SimplexChain c(1);
  for (int i = 0; i < 3; ++i) c.add(1, SimplexFamily::affine({z, z}));
  const DifferentialCharacter ch = rho(c, chart, 2, coordinate_two_tori());
  CHECK(ch.degree == 3);
  CHECK(ch.form.max_norm() == 0.0);
  CHECK(ch.is_flat_class());
  CHECK_FALSE(ch.mod_lattice);
  for (const auto& pr : ch.pairings) CHECK(pr.value == Complex(0.0, 0.0));
}

TEST_CASE("rho pairings of a non-flat triangle against a Monte Carlo oracle") {
  Rng rng(64);
  const TorusChart chart(3, 16);
  std::vector<TrigOneForm> v;
  std::vector<Connection> d;
  for (int i = 0; i < 3; ++i) {
    v.push_back(TrigOneForm::random(3, 2, 1, 4.0, rng));
    d.push_back(Connection(v.back().sample(chart)));
  }
  const SimplexChain tri = triangle_cycle(d);
  const DifferentialCharacter ch = rho(tri, chart, 2, coordinate_two_tori());
  REQUIRE(ch.form.degree() == 3);

  // <c, edge> = -int_c int_I int_0^1 (ds dt coefficient of E_2 of the prism
  // curvature) = kN^2 int s [tr a ^ tr b - tr(a ^ b)]_{ab} with a = A(t), b = A1 - A0
  const std::array<std::pair<int, int>, 3> edges{{{0, 1}, {1, 2}, {2, 0}}};
  const Complex k2 = kChernNormalization * kChernNormalization;
  const std::array<PointConnection, 3> eval{PointConnection(v[0]), PointConnection(v[1]), PointConnection(v[2])};
  Rng mc(65);
  const int samples = 1000000;
  for (std::size_t ci = 0; ci < 3; ++ci) {
    const auto& cyc = ch.pairings[ci].cycle;
    const int a = cyc.axes[0], b = cyc.axes[1];
    double sum_re = 0, sum_im = 0, sq_re = 0, sq_im = 0;
    for (int n = 0; n < samples; ++n) {
      std::array<double, 3> x{0.0, 0.0, 0.0};
      x[static_cast<std::size_t>(a)] = mc.uniform01();
      x[static_cast<std::size_t>(b)] = mc.uniform01();
      const double s = mc.uniform01(), t = mc.uniform01();
      std::array<std::array<Eigen::Matrix2cd, 3>, 3> at;
      for (std::size_t i = 0; i < 3; ++i) at[i] = eval[i](x);
      Complex f = 0.0;
      for (const auto& [i0, i1] : edges) {
        const auto& p0 = at[static_cast<std::size_t>(i0)];
        const auto& p1 = at[static_cast<std::size_t>(i1)];
        const Eigen::Matrix2cd aa = (1 - t) * p0[static_cast<std::size_t>(a)] + t * p1[static_cast<std::size_t>(a)];
        const Eigen::Matrix2cd ab = (1 - t) * p0[static_cast<std::size_t>(b)] + t * p1[static_cast<std::size_t>(b)];
        const Eigen::Matrix2cd ba = p1[static_cast<std::size_t>(a)] - p0[static_cast<std::size_t>(a)];
        const Eigen::Matrix2cd bb = p1[static_cast<std::size_t>(b)] - p0[static_cast<std::size_t>(b)];
        const Complex w = aa.trace() * bb.trace() - ab.trace() * ba.trace() - (aa * bb - ab * ba).trace();
        f += k2 * s * w;
      }
      sum_re += f.real(), sum_im += f.imag();
      sq_re += f.real() * f.real(), sq_im += f.imag() * f.imag();
    }
    const double mean_re = sum_re / samples, mean_im = sum_im / samples;
    const double se_re = std::sqrt((sq_re / samples - mean_re * mean_re) / samples);
    const double se_im = std::sqrt((sq_im / samples - mean_im * mean_im) / samples);
    const Complex got = ch.pairings[ci].value;
    INFO("cycle " << describe(cyc) << " grid " << got << " mc (" << mean_re << "," << mean_im << ") se " << se_re);
    CHECK(std::abs(got.real() - mean_re) <= 3 * se_re);
    CHECK(std::abs(got.imag() - mean_im) <= 3 * se_im);
    CHECK(std::abs(got) > 10 * std::max(se_re, se_im));
  }
}

TEST_CASE("rho is additive") {
  Rng rng(66);
  const TorusChart chart(3, 12);
  std::vector<Connection> d1, d2;
  for (int i = 0; i < 3; ++i) d1.push_back(random_connection(chart, 2, 1, 3.0, rng));
  for (int i = 0; i < 3; ++i) d2.push_back(random_connection(chart, 2, 1, 3.0, rng));
  const SimplexChain s1 = triangle_cycle(d1), s2 = triangle_cycle(d2);
  const auto cycles = coordinate_two_tori();
  const auto r1 = rho(s1, chart, 2, cycles), r2 = rho(s2, chart, 2, cycles), r12 = rho(s1 + s2, chart, 2, cycles);
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const Complex sum = r1.pairings[i].value + r2.pairings[i].value;
    CHECK(std::abs(r12.pairings[i].value - sum) <= 1e-10 * (1.0 + std::abs(sum)));
  }
  CHECK(max_norm_difference(r12.form, r1.form + r2.form) <= 1e-10);
  const auto r3 = rho(s1 + s1, chart, 2, cycles);
  CHECK(std::abs(r3.pairings[0].value - 2.0 * r1.pairings[0].value) <= 1e-12);
}

TEST_CASE("rho preconditions") {
  Rng rng(67);
  const TorusChart chart(3, 8);
  const SimplexFamily edge = random_affine(chart, 2, 1, 1, 1.0, rng);
  CHECK_THROWS_AS(rho(SimplexChain::single(edge), chart, 2, coordinate_two_tori()), ValidationError);
  std::vector<Connection> d;
  for (int i = 0; i < 3; ++i) d.push_back(random_connection(chart, 2, 1, 1.0, rng));
  const SimplexChain tri = triangle_cycle(d);
  CHECK_THROWS_AS(rho(tri, chart, 2, {coordinate_cycle({0})}), ValidationError);
  CHECK_THROWS_AS(rho(tri, chart, 1, {}), ValidationError);
  CHECK_THROWS_AS(rho(tri, chart, 3, {coordinate_cycle({0, 1, 2})}), ValidationError);
  CHECK_THROWS_AS(rho(tri, TorusChart(3, 12), 2, {}), ValidationError);
  CHECK_THROWS_AS(rho_flat(tri, chart, 2, coordinate_two_tori()), ValidationError);
}

TEST_CASE("rho_flat of a triangle of dx_1-proportional constants vanishes") {
  Rng rng(68);
  const TorusChart chart(3, 8);
  std::vector<Connection> d;
  for (int i = 0; i < 3; ++i) d.push_back(Connection::constant(chart, {random_matrix(2, rng)}));
  const auto vals = rho_flat(triangle_cycle(d), chart, 2, coordinate_two_tori());
  for (const auto& v : vals) CHECK(mod_distance(v.value, mod_reduce(0.0)) <= 1e-12);
}

TEST_CASE("abelian loop: closed-form oracle, large gauge invariance, path choice") {
  const TorusChart chart(2, 8);
  Rng rng(69);
  const std::vector<Complex> h{1.0, 2.0};
  AbelianFamily::Coefficients c;
  for (int axis = 0; axis < 2; ++axis) {
    c.offset.push_back(rng.uniform(-0.5, 0.5));
    c.cosine.push_back({rng.uniform(-1, 1)});
    c.sine.push_back({rng.uniform(-1, 1)});
  }
  const auto coeffs = c;
  const SimplexFamily loop = SimplexFamily::closed_form(std::make_shared<AbelianFamily>(chart, h, 1, c));
  const SimplexChain sigma = SimplexChain::single(loop);
  REQUIRE(is_cycle(sigma));

  // <T^2, loop> = -e_2(H) J / (4 pi^2), J = int_0^1 (c_1 c_2' - c_2 c_1') dt by quadrature
  auto cj = [&](int j, double t) {
    const auto& k = coeffs;
    return k.offset[static_cast<std::size_t>(j)] + k.cosine[static_cast<std::size_t>(j)][0] * std::cos(2 * kPi * t) +
           k.sine[static_cast<std::size_t>(j)][0] * std::sin(2 * kPi * t);
  };
  auto dcj = [&](int j, double t) {
    const auto& k = coeffs;
    return 2 * kPi * (-k.cosine[static_cast<std::size_t>(j)][0] * std::sin(2 * kPi * t) +
                      k.sine[static_cast<std::size_t>(j)][0] * std::cos(2 * kPi * t));
  };
  const LineRule line = gauss_legendre(40);
  Complex j_int = 0.0;
  for (std::size_t q = 0; q < line.nodes.size(); ++q) {
    const double t = line.nodes[q];
    j_int += line.weights[q] * (cj(0, t) * dcj(1, t) - cj(1, t) * dcj(0, t));
  }
  const Complex e2 = h[0] * h[1];
  const Complex oracle = -e2 * j_int / (4 * kPi * kPi);

  const std::vector<CycleSpec> torus{coordinate_cycle({0, 1})};
  const auto flat = rho_flat(sigma, chart, 2, torus);
  CHECK(mod_distance(flat[0].value, mod_reduce(oracle)) <= 1e-8);
  const auto raw = rho(sigma, chart, 2, torus);
  CHECK(std::abs(raw.pairings[0].value - oracle) <= 1e-8);

  const SimplexChain gauged = SimplexChain::single(gauge_transform(loop, GaugeMap::winding(chart, {1, -2}, 0)));
  const auto flat_g = rho_flat(gauged, chart, 2, torus);
  CHECK(mod_distance(flat_g[0].value, flat[0].value) <= 1e-8);
  const Complex shift = rho(gauged, chart, 2, torus).pairings[0].value - raw.pairings[0].value;
  CHECK(std::abs(shift.real() - std::round(shift.real())) <= 1e-8);
  CHECK(std::abs(shift.imag()) <= 1e-8);

  // a bent contraction gives the same class on this flat cycle
  TransgressionOptions bent;
  bent.path.bend = random_connection(chart, 2, 1, 1.0, rng);
  const auto flat_b = rho_flat(sigma, chart, 2, torus, bent);
  CHECK(mod_distance(flat_b[0].value, flat[0].value) <= 1e-8);
}

TEST_CASE("flat descent: boundaries of flat 2-simplices pair to zero") {
  Rng rng(70);
  const TorusChart chart(3, 16);
  TransgressionOptions opt;
  opt.closed_form_degree = 13;
  const SimplexChain bd = boundary(SimplexChain::single(orbit_family(chart, 2, 0.5, rng)));
  REQUIRE(bd.terms().size() == 3);
  const auto ch = rho(bd, chart, 2, coordinate_two_tori(), opt);
  double edge_scale = 0.0;
  for (const auto& t : bd.terms())
    edge_scale = std::max(edge_scale, std::abs(chain_pairing(SimplexChain::single(t.family), 2, coordinate_cycle({0, 1}), opt)));
  for (const auto& pr : ch.pairings) CHECK(std::abs(pr.value) <= 1e-8);
  CHECK(edge_scale > 1e-6);
}

TEST_CASE("coboundary identity") {
  Rng rng(71);
  const TorusChart chart(3, 12);
  const SimplexChain edge = SimplexChain::single(random_affine(chart, 2, 1, 1, 4.0, rng));
  const CycleSpec full = coordinate_cycle({0, 1, 2});
  CHECK(coboundary_residual(edge, chart, 2, full, {}) <= 1e-8);
  CHECK(coboundary_residual(edge, chart, 2, coordinate_cycle({0, 1, 2}, -1), {}) <= 1e-8);
  // both terms are individually nonzero
  CHECK(std::abs(integrate_cycle(chain_tp(edge, chart, 2), full)) > 1e-6);

  CHECK(coboundary_residual(SimplexChain(1), chart, 2, full, {}) == 0.0);

  TransgressionOptions opt;
  opt.closed_form_degree = 13;
  const SimplexChain flat = SimplexChain::single(orbit_family(TorusChart(3, 16), 1, 0.5, rng));
  CHECK(coboundary_residual(flat, TorusChart(3, 16), 2, full, {}, opt) <= 1e-8);

  CHECK_THROWS_AS(coboundary_residual(edge, chart, 2, coordinate_cycle({0, 1}), {}), ValidationError);
  CHECK_THROWS_AS(coboundary_residual(edge, chart, 2, full, {coordinate_cycle({0})}), ValidationError);
}
