// Chern densities of simplex families on Delta^r x X, their fibre integrals
// TP_{p,r}, eta-forms, prism-contraction forms omega_{p,r} (Chern-Simons
// forms for r = 0) and residual checks of the transgression identities.
//
// Conventions (recorded in every run report):
//  * curvatures are normalized by -1/(2 pi i) before E_p is applied;
//  * fibre integration takes the coefficient of g_1 ^ ... ^ g_r placed in
//    front (dt_1 ^ ... ^ dt_r positively oriented), then integrates over t;
//  * the prism I x Delta^r carries generators (ds, dt_1, ..., dt_r) in that
//    order; omega contracts along s -> s A(t) (optionally bent, see
//    ContractionPath) to the zero connection;
//  * face i of a simplex drops vertex i.
// With these conventions
//   d TP_{p,r}    = -(-1)^r sum_i (-1)^i TP(face_i)_{p,r-1}
//   d omega_{p,r} = -(-1)^r sum_i (-1)^i omega(face_i)_{p,r-1} - (-1)^{2p-r-1} TP_{p,r}
// and the residual checkers below test exactly these.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cslab/core.hpp"
#include "cslab/families.hpp"
#include "cslab/forms.hpp"
#include "cslab/quadrature.hpp"

namespace cslab {

/// s -> s A(t) + s (1 - s) B.  B absent means the straight (linear) path.
struct ContractionPath {
  std::optional<Connection> bend;

  std::string describe() const {
    return bend ? "bent: s*A(t) + s*(1-s)*B toward the zero connection"
                : "linear: s*A(t) toward the zero connection";
  }
};

struct TransgressionOptions {
  SimplexRuleKind rule_kind = SimplexRuleKind::collapsed_gauss;
  int affine_degree = -1;        // < 0: 2p + 1
  int closed_form_degree = 21;   // t-integrands of closed-form families are not polynomial
  ContractionPath path{};
};

inline std::string sign_conventions() {
  return "curvature normalized by -1/(2 pi i); fibre integral = coefficient of dt_1..dt_r moved to the front; "
         "prism generators ordered (ds, dt_1..dt_r); face i drops vertex i; "
         "d TP_{p,r} = -(-1)^r sum_i (-1)^i TP_{p,r-1}(face_i); "
         "d omega_{p,r} = -(-1)^r sum_i (-1)^i omega_{p,r-1}(face_i) - (-1)^{2p-r-1} TP_{p,r}";
}

inline int rule_degree(const SimplexFamily& fam, int p, const TransgressionOptions& opt) {
  if (fam.is_affine()) return opt.affine_degree >= 0 ? opt.affine_degree : 2 * p + 1;
  return opt.closed_form_degree;
}

inline QuadratureRule default_rule(const SimplexFamily& fam, int p, const TransgressionOptions& opt = {}) {
  return simplex_rule(fam.dim(), rule_degree(fam, p, opt), opt.rule_kind);
}

inline void check_degree_p(const SimplexFamily& fam, int p) {
  if (p < 1 || p > fam.rank()) throw Error("invariant degree p must satisfy 1 <= p <= rank");
}

namespace detail {

inline std::vector<int> all_generators(int m) {
  std::vector<int> g(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) g[static_cast<std::size_t>(i)] = i;
  return g;
}

/// Place a generator-free form f in the component slots g_gen ^ (.) of a form
/// with `odd_params` generators (f must have no generators itself).
inline void add_generator_times(MixedForm& dst, int gen, const MixedForm& f, Complex scale) {
  for (const auto& [key, field] : f.components()) dst.accumulate(FormKey{key.gens | (1u << gen), key.axes}, field, scale);
}

}  // namespace detail

/// F~(t) = F_x(A(t)) + sum_i g_i ^ dA/dt_i on Delta^r x X (generator i-1 is
/// dt_i), scaled by -1/(2 pi i) when `normalized`.
inline MixedForm total_curvature(const SimplexFamily& fam, const Barycentric& t, bool normalized = true) {
  const FamilySample s = fam.evaluate(t);
  const int r = fam.dim();
  MixedForm f = embed_odd_params(curvature(s.connection), r);
  for (int i = 0; i < r; ++i) detail::add_generator_times(f, i, s.tangents[static_cast<std::size_t>(i)], 1.0);
  if (normalized) f *= kChernNormalization;
  return f;
}

/// Chern density E_p(F~) on Delta^r x X at one parameter point.
inline MixedForm chern_density(const SimplexFamily& fam, int p, const Barycentric& t) {
  check_degree_p(fam, p);
  return graded_invariant(p, total_curvature(fam, t));
}

/// Chern form c_p(A) = E_p(-F/(2 pi i)).
inline MixedForm chern_form(const Connection& a, int p) {
  if (p < 1 || p > a.rank()) throw Error("chern_form: p must satisfy 1 <= p <= rank");
  return graded_invariant(p, curvature(a) * kChernNormalization);
}

/// TP_{p,r} = integral over Delta^r of E_p(F~): a (2p - r)-form on X.  When
/// 2p - r exceeds the chart dimension the zero form is returned (check with
/// exceeds_chart).
inline MixedForm transgress_tp(const SimplexFamily& fam, int p, const QuadratureRule& rule) {
  check_degree_p(fam, p);
  const int r = fam.dim();
  if (r > 2 * p) throw Error("transgress_tp: simplex dimension exceeds 2p");
  if (rule.dim != r) throw Error("transgress_tp: quadrature rule dimension mismatch");
  MixedForm out(fam.chart(), 1, 0, 2 * p - r);
  if (2 * p - r > fam.chart().dim) return out;
  const auto gens = detail::all_generators(r);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const MixedForm density = graded_invariant(p, total_curvature(fam, rule.nodes[q]));
    out += rule.weights[q] * fiber_extract(density, gens);
  }
  return out;
}

inline MixedForm transgress_tp(const SimplexFamily& fam, int p, const TransgressionOptions& opt = {}) {
  return transgress_tp(fam, p, default_rule(fam, p, opt));
}

inline bool exceeds_chart(const MixedForm& f) { return f.degree() > f.chart().dim; }

/// eta_p = p int_0^1 P_p(dA/dt, F_t, ..., F_t) dt, computed as TP_{p,1}.
/// d eta_p = c_p(A(1)) - c_p(A(0)).
inline MixedForm eta_form(const SimplexFamily& path, int p, const TransgressionOptions& opt = {}) {
  if (path.dim() != 1) throw Error("eta_form: path must be a 1-simplex family");
  return transgress_tp(path, p, opt);
}

/// Second route to eta_p: Gauss-Legendre in t of the derivative of E_p along
/// dA/dt, expanded through Newton's identities in the power sums tr(F^k).
inline MixedForm eta_form_direct(const SimplexFamily& path, int p, int nodes = 24) {
  if (path.dim() != 1) throw Error("eta_form_direct: path must be a 1-simplex family");
  check_degree_p(path, p);
  const TorusChart& chart = path.chart();
  const LineRule line = gauss_legendre(nodes);
  MixedForm out(chart, 1, 0, 2 * p - 1);
  for (std::size_t q = 0; q < line.nodes.size(); ++q) {
    const double t = line.nodes[q];
    const FamilySample s = path.evaluate({1.0 - t, t});
    const MixedForm x = curvature(s.connection) * kChernNormalization;
    const MixedForm y = s.tangents[0] * kChernNormalization;
    // power sums s_k = tr(x^k) and their variations ds_k = k tr(x^{k-1} y)
    std::vector<MixedForm> ps{MixedForm()}, dps{MixedForm()};
    MixedForm xpow = identity_form(chart, path.rank());
    for (int k = 1; k <= p; ++k) {
      dps.push_back(static_cast<double>(k) * trace(wedge(xpow, y)));
      xpow = wedge(xpow, x);
      ps.push_back(trace(xpow));
    }
    MixedForm one(chart, 1, 0, 0);
    one.set(FormKey{}, MixedForm::Field(chart.points(), Complex{1.0, 0.0}));
    std::vector<MixedForm> e{one}, de{MixedForm(chart, 1, 0, 0)};
    for (int k = 1; k <= p; ++k) {
      MixedForm ek(chart, 1, 0, 2 * k), dek(chart, 1, 0, 2 * k - 1);
      for (int i = 1; i <= k; ++i) {
        const double sg = ipow_sign(i - 1) / k;
        ek += sg * wedge(e[static_cast<std::size_t>(k - i)], ps[static_cast<std::size_t>(i)]);
        dek += sg * wedge(e[static_cast<std::size_t>(k - i)], dps[static_cast<std::size_t>(i)]);
        if (k - i > 0) dek += sg * wedge(de[static_cast<std::size_t>(k - i)], ps[static_cast<std::size_t>(i)]);
      }
      e.push_back(std::move(ek));
      de.push_back(std::move(dek));
    }
    out += line.weights[q] * de[static_cast<std::size_t>(p)];
  }
  return out;
}

/// omega_{p,r}: fibre integral over the prism I x Delta^r of the Chern
/// density of the contraction A^(s, t) toward the zero connection.
inline MixedForm omega_form(const SimplexFamily& fam, int p, const TransgressionOptions& opt = {}) {
  check_degree_p(fam, p);
  const int r = fam.dim();
  if (!(p > r)) throw Error("omega_form: requires p > r");
  const TorusChart& chart = fam.chart();
  const int n = fam.rank();
  const int m = r + 1;
  MixedForm out(chart, 1, 0, 2 * p - r - 1);
  if (2 * p - r - 1 > chart.dim) return out;

  const bool bent = opt.path.bend.has_value();
  if (bent && (!(opt.path.bend->chart() == chart) || opt.path.bend->rank() != n))
    throw Error("omega_form: bend connection has the wrong shape");
  const QuadratureRule rule = default_rule(fam, p, opt);
  const LineRule sline = gauss_legendre(bent ? 2 * p + 1 : p + 1);
  const auto gens = detail::all_generators(m);

  std::optional<MixedForm> db, bb;
  if (bent) {
    db = embed_odd_params(exterior_derivative_x(opt.path.bend->form()), m);
    bb = embed_odd_params(wedge(opt.path.bend->form(), opt.path.bend->form()), m);
  }

  for (std::size_t q = 0; q < rule.size(); ++q) {
    const FamilySample smp = fam.evaluate(rule.nodes[q]);
    const MixedForm& a = smp.connection.form();
    const MixedForm da = embed_odd_params(exterior_derivative_x(a), m);
    const MixedForm aa = embed_odd_params(wedge(a, a), m);
    std::optional<MixedForm> ab;
    if (bent) ab = embed_odd_params(wedge(a, opt.path.bend->form()) + wedge(opt.path.bend->form(), a), m);

    for (std::size_t k = 0; k < sline.nodes.size(); ++k) {
      const double s = sline.nodes[k];
      const double alpha = s, beta = bent ? s * (1.0 - s) : 0.0, dbeta = bent ? 1.0 - 2.0 * s : 0.0;
      MixedForm f = alpha * da + (alpha * alpha) * aa;
      if (bent) f += beta * *db + (beta * beta) * *bb + (alpha * beta) * *ab;
      detail::add_generator_times(f, 0, a, 1.0);
      if (bent) detail::add_generator_times(f, 0, opt.path.bend->form(), dbeta);
      for (int i = 0; i < r; ++i) detail::add_generator_times(f, i + 1, smp.tangents[static_cast<std::size_t>(i)], alpha);
      f *= kChernNormalization;
      const MixedForm density = graded_invariant(p, f);
      out += (rule.weights[q] * sline.weights[k]) * fiber_extract(density, gens);
    }
  }
  return out;
}

/// Chern-Simons form of a single connection: omega on a 0-simplex.
/// d cs_form(A, p) = c_p(A).
inline MixedForm cs_form(const Connection& a, int p, const TransgressionOptions& opt = {}) {
  return omega_form(SimplexFamily::affine({a}, "point"), p, opt);
}

/// Residual (max norm) of d TP_{p,r} + (-1)^r sum_i (-1)^i TP(face_i)_{p,r-1}.
inline double verify_kform(const SimplexFamily& fam, int p, const TransgressionOptions& opt = {}) {
  const int r = fam.dim();
  if (r < 1) throw Error("verify_kform: requires r >= 1");
  MixedForm lhs = exterior_derivative_x(transgress_tp(fam, p, opt));
  for (int i = 0; i <= r; ++i) lhs += ipow_sign(r + i) * transgress_tp(fam.face(i), p, opt);
  return lhs.max_norm();
}

/// Residual of d omega_{p,r} + (-1)^r sum_i (-1)^i omega(face_i)_{p,r-1}
///             + (-1)^{2p-r-1} TP_{p,r}.
inline double verify_oform(const SimplexFamily& fam, int p, const TransgressionOptions& opt = {}) {
  const int r = fam.dim();
  if (r < 1) throw Error("verify_oform: requires r >= 1");
  if (!(p > r)) throw Error("verify_oform: requires p > r");
  MixedForm lhs = exterior_derivative_x(omega_form(fam, p, opt));
  for (int i = 0; i <= r; ++i) lhs += ipow_sign(r + i) * omega_form(fam.face(i), p, opt);
  lhs += ipow_sign(2 * p - r - 1) * transgress_tp(fam, p, opt);
  return lhs.max_norm();
}

/// Max-norm change of TP when the simplex quadrature degree is doubled.
inline double quadrature_refinement_delta(const SimplexFamily& fam, int p, const TransgressionOptions& opt = {}) {
  const int deg = rule_degree(fam, p, opt);
  const MixedForm a = transgress_tp(fam, p, simplex_rule(fam.dim(), deg, opt.rule_kind));
  const MixedForm b = transgress_tp(fam, p, simplex_rule(fam.dim(), 2 * deg, opt.rule_kind));
  return max_norm_difference(a, b);
}

/// Same for omega (simplex degree doubled; the s-rule is already exact).
inline double omega_refinement_delta(const SimplexFamily& fam, int p, const TransgressionOptions& opt = {}) {
  TransgressionOptions fine = opt;
  const int deg = rule_degree(fam, p, opt);
  fine.affine_degree = 2 * deg;
  fine.closed_form_degree = 2 * deg;
  return max_norm_difference(omega_form(fam, p, opt), omega_form(fam, p, fine));
}

}  // namespace cslab
