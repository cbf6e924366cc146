// Families of connections parametrized by the standard simplex Delta^r.
//
// A family is evaluated at a barycentric point t = (t_0..t_r); it returns the
// connection A(t) and the partials dA/dt_i, i = 1..r, taken in the free
// coordinates t_1..t_r with t_0 = 1 - sum.  Faces restrict to t_i = 0 with
// the remaining coordinates reindexed in order.
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cslab/connections.hpp"
#include "cslab/core.hpp"
#include "cslab/forms.hpp"
#include "cslab/trig_field.hpp"

namespace cslab {

using Barycentric = std::vector<double>;

struct FamilySample {
  Connection connection;
  std::vector<MixedForm> tangents;  // dA/dt_i, i = 1..r
};

/// Closed-form family.  Implementations must be pure: the result depends
/// only on the barycentric argument.
class FamilyEvaluator {
 public:
  virtual ~FamilyEvaluator() = default;
  virtual int simplex_dim() const = 0;
  virtual const TorusChart& chart() const = 0;
  virtual int rank() const = 0;
  virtual FamilySample evaluate(const Barycentric& t) const = 0;
  virtual std::string describe() const = 0;
};

inline void validate_barycentric(const Barycentric& t, int r) {
  if (static_cast<int>(t.size()) != r + 1) throw Error("invalid barycentric point: wrong number of coordinates");
  double sum = 0.0;
  for (double v : t) {
    if (!(v >= -1e-12)) throw Error("invalid barycentric point: negative coordinate");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error("invalid barycentric point: coordinates do not sum to 1");
}

inline Barycentric simplex_vertex(int r, int i) {
  Barycentric t(static_cast<std::size_t>(r) + 1, 0.0);
  t[static_cast<std::size_t>(i)] = 1.0;
  return t;
}

inline Barycentric barycenter(int r) {
  return Barycentric(static_cast<std::size_t>(r) + 1, 1.0 / (r + 1));
}

class SimplexFamily {
 public:
  struct Affine {
    std::vector<Connection> vertices;
  };
  using ClosedForm = std::shared_ptr<const FamilyEvaluator>;

  SimplexFamily() = default;

  static SimplexFamily affine(std::vector<Connection> vertices, std::string label = "affine") {
    if (vertices.empty()) throw Error("SimplexFamily::affine: need at least one vertex");
    for (const auto& v : vertices)
      if (!(v.chart() == vertices.front().chart()) || v.rank() != vertices.front().rank())
        throw Error("SimplexFamily::affine: vertices live on different charts / ranks");
    SimplexFamily f;
    f.r_ = static_cast<int>(vertices.size()) - 1;
    f.chart_ = vertices.front().chart();
    f.rank_ = vertices.front().rank();
    f.impl_ = Affine{std::move(vertices)};
    f.label_ = std::move(label);
    return f;
  }

  static SimplexFamily closed_form(ClosedForm evaluator, std::string label = "") {
    if (!evaluator) throw Error("SimplexFamily::closed_form: null evaluator");
    SimplexFamily f;
    f.r_ = evaluator->simplex_dim();
    f.chart_ = evaluator->chart();
    f.rank_ = evaluator->rank();
    f.label_ = label.empty() ? evaluator->describe() : std::move(label);
    f.impl_ = std::move(evaluator);
    return f;
  }

  int dim() const { return r_; }
  const TorusChart& chart() const { return chart_; }
  int rank() const { return rank_; }
  const std::string& label() const { return label_; }
  bool is_affine() const { return std::holds_alternative<Affine>(impl_); }
  const std::vector<Connection>& vertices() const { return std::get<Affine>(impl_).vertices; }

  /// A(t) and dA/dt_i.  The affine variant gives A = sum t_i A^i and
  /// dA/dt_i = A^i - A^0 exactly.
  FamilySample evaluate(const Barycentric& t) const {
    validate_barycentric(t, r_);
    if (const auto* aff = std::get_if<Affine>(&impl_)) {
      MixedForm a(chart_, rank_, 0, 1);
      for (std::size_t i = 0; i < aff->vertices.size(); ++i)
        if (t[i] != 0.0) a += t[i] * aff->vertices[i].form();
      FamilySample s{Connection(std::move(a)), {}};
      for (std::size_t i = 1; i < aff->vertices.size(); ++i)
        s.tangents.push_back(aff->vertices[i].form() - aff->vertices[0].form());
      return s;
    }
    return std::get<ClosedForm>(impl_)->evaluate(t);
  }

  Connection connection_at(const Barycentric& t) const { return evaluate(t).connection; }

  SimplexFamily face(int i) const;

 private:
  int r_ = 0;
  TorusChart chart_{};
  int rank_ = 1;
  std::variant<Affine, ClosedForm> impl_;
  std::string label_;
};

/// Restriction of a closed-form family to its i-th face, with tangents by the
/// chain rule through the coface map.
class FaceEvaluator final : public FamilyEvaluator {
 public:
  FaceEvaluator(SimplexFamily parent, int index) : parent_(std::move(parent)), index_(index) {}

  int simplex_dim() const override { return parent_.dim() - 1; }
  const TorusChart& chart() const override { return parent_.chart(); }
  int rank() const override { return parent_.rank(); }
  std::string describe() const override { return "face " + std::to_string(index_) + " of " + parent_.label(); }

  FamilySample evaluate(const Barycentric& tf) const override {
    Barycentric t;
    t.reserve(tf.size() + 1);
    for (std::size_t k = 0; k < tf.size(); ++k) {
      if (static_cast<int>(k) == index_) t.push_back(0.0);
      t.push_back(tf[k]);
    }
    if (index_ == static_cast<int>(tf.size())) t.push_back(0.0);
    FamilySample full = parent_.evaluate(t);
    FamilySample out{std::move(full.connection), {}};
    const int rf = simplex_dim();
    for (int k = 1; k <= rf; ++k) {
      if (index_ == 0) {
        out.tangents.push_back(full.tangents[static_cast<std::size_t>(k)] - full.tangents[0]);
      } else {
        const int parent_coord = k < index_ ? k : k + 1;
        out.tangents.push_back(full.tangents[static_cast<std::size_t>(parent_coord - 1)]);
      }
    }
    return out;
  }

 private:
  SimplexFamily parent_;
  int index_;
};

inline SimplexFamily SimplexFamily::face(int i) const {
  if (r_ < 1) throw Error("face: a 0-simplex has no faces");
  if (i < 0 || i > r_) throw Error("face: index " + std::to_string(i) + " out of range");
  const std::string face_label = label_ + ".d" + std::to_string(i);
  if (const auto* aff = std::get_if<Affine>(&impl_)) {
    std::vector<Connection> v;
    for (int k = 0; k <= r_; ++k)
      if (k != i) v.push_back(aff->vertices[static_cast<std::size_t>(k)]);
    return affine(std::move(v), face_label);
  }
  return closed_form(std::make_shared<FaceEvaluator>(*this, i), face_label);
}

inline SimplexFamily face(const SimplexFamily& fam, int i) { return fam.face(i); }

/// Largest curvature over the sample points.
inline double fiberwise_flat_residual(const SimplexFamily& fam, const std::vector<Barycentric>& samples) {
  double worst = 0.0;
  for (const auto& t : samples) {
    validate_barycentric(t, fam.dim());
    worst = std::max(worst, flatness_residual(fam.connection_at(t)));
  }
  return worst;
}

/// Vertices, barycenter and the edge midpoints.
inline std::vector<Barycentric> default_flatness_samples(int r) {
  std::vector<Barycentric> s;
  for (int i = 0; i <= r; ++i) s.push_back(simplex_vertex(r, i));
  if (r >= 1) s.push_back(barycenter(r));
  for (int i = 0; i <= r; ++i)
    for (int j = i + 1; j <= r; ++j) {
      Barycentric t(static_cast<std::size_t>(r) + 1, 0.0);
      t[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(j)] = 0.5;
      s.push_back(t);
    }
  return s;
}

// ---------------------------------------------------------------------------
// Built-in closed-form families

/// Family given only by A(t); tangents by 4th-order central differences in
/// the free coordinates with step 1e-3.  The callable must accept points
/// slightly outside the simplex.
class SampledFamily final : public FamilyEvaluator {
 public:
  using Fn = std::function<Connection(const std::vector<double>& free_coords)>;
  static constexpr double kStep = 1e-3;

  SampledFamily(TorusChart chart, int rank, int r, Fn fn, std::string name)
      : chart_(chart), rank_(rank), r_(r), fn_(std::move(fn)), name_(std::move(name)) {}

  int simplex_dim() const override { return r_; }
  const TorusChart& chart() const override { return chart_; }
  int rank() const override { return rank_; }
  std::string describe() const override { return name_; }

  FamilySample evaluate(const Barycentric& t) const override {
    std::vector<double> x(t.begin() + 1, t.end());
    FamilySample s{fn_(x), {}};
    for (int i = 0; i < r_; ++i) {
      auto shifted = [&](double h) {
        auto y = x;
        y[static_cast<std::size_t>(i)] += h;
        return fn_(y).form();
      };
      const double h = kStep;
      MixedForm d = (-1.0 / (12 * h)) * shifted(2 * h) + (8.0 / (12 * h)) * shifted(h) -
                    (8.0 / (12 * h)) * shifted(-h) + (1.0 / (12 * h)) * shifted(-2 * h);
      s.tangents.push_back(std::move(d));
    }
    return s;
  }

 private:
  TorusChart chart_;
  int rank_;
  int r_;
  Fn fn_;
  std::string name_;
};

/// Gauge orbit g(t)^* D of a flat base D with g(t, x) = exp(sum_i t_i xi_i(x)).
/// Every member is flat; dg and dg/dt_i come from the exact derivative of
/// the exponential, and dA/dt_i = D_A(g^{-1} dg/dt_i) with the x-derivative
/// taken by the chart operator (spectrally convergent, not exact, since g is
/// not a trig polynomial).
class GaugeOrbitFamily final : public FamilyEvaluator {
 public:
  GaugeOrbitFamily(Connection base, std::vector<TrigField> generators)
      : base_(std::move(base)), xi_(std::move(generators)) {
    const TorusChart& c = base_.chart();
    for (const auto& x : xi_) {
      if (x.dim() != c.dim || x.rank() != base_.rank()) throw Error("GaugeOrbitFamily: generator shape mismatch");
      xi_values_.push_back(x.sample(c));
      std::vector<MixedForm::Field> grads;
      for (int axis = 0; axis < c.dim; ++axis) grads.push_back(x.sample(c, axis));
      xi_grads_.push_back(std::move(grads));
    }
  }

  int simplex_dim() const override { return static_cast<int>(xi_.size()); }
  const TorusChart& chart() const override { return base_.chart(); }
  int rank() const override { return base_.rank(); }
  std::string describe() const override { return "gauge_orbit(r=" + std::to_string(xi_.size()) + ")"; }

  FamilySample evaluate(const Barycentric& t) const override {
    const TorusChart& c = chart();
    const int n = rank();
    const std::size_t nn = static_cast<std::size_t>(n * n);
    const std::size_t np = c.points();
    const std::size_t r = xi_.size();
    MixedForm::Field g(np * nn), ginv(np * nn);
    std::vector<MixedForm::Field> dg(static_cast<std::size_t>(c.dim), MixedForm::Field(np * nn));
    std::vector<MixedForm::Field> u(r, MixedForm::Field(np * nn));
    for (std::size_t pt = 0; pt < np; ++pt) {
      SquareMatrix x = SquareMatrix::Zero(n, n);
      for (std::size_t i = 0; i < r; ++i) x += t[i + 1] * SquareMatrix(detail::matrix_at(xi_values_[i], pt, n));
      const SquareMatrix e = x.exp();
      const SquareMatrix einv = e.inverse();
      detail::matrix_at(g, pt, n) = e;
      detail::matrix_at(ginv, pt, n) = einv;
      for (int axis = 0; axis < c.dim; ++axis) {
        SquareMatrix dx = SquareMatrix::Zero(n, n);
        for (std::size_t i = 0; i < r; ++i)
          dx += t[i + 1] * SquareMatrix(detail::matrix_at(xi_grads_[i][static_cast<std::size_t>(axis)], pt, n));
        detail::matrix_at(dg[static_cast<std::size_t>(axis)], pt, n) = exp_directional_derivative(x, dx);
      }
      for (std::size_t i = 0; i < r; ++i)
        detail::matrix_at(u[i], pt, n) =
            einv * exp_directional_derivative(x, SquareMatrix(detail::matrix_at(xi_values_[i], pt, n)));
    }
    MixedForm dgf(c, n, 0, 1);
    for (int axis = 0; axis < c.dim; ++axis) dgf.set(FormKey{0, 1u << axis}, std::move(dg[static_cast<std::size_t>(axis)]));
    const MixedForm gf = MixedForm::zero_form(c, n, std::move(g));
    const MixedForm gi = MixedForm::zero_form(c, n, std::move(ginv));
    Connection a(wedge(gi, dgf) + wedge(wedge(gi, base_.form()), gf));
    FamilySample s{a, {}};
    for (std::size_t i = 0; i < r; ++i)
      s.tangents.push_back(covariant_derivative(a, MixedForm::zero_form(c, n, std::move(u[i]))));
    return s;
  }

  const Connection& base() const { return base_; }
  const std::vector<TrigField>& generators() const { return xi_; }

 private:
  Connection base_;
  std::vector<TrigField> xi_;
  std::vector<MixedForm::Field> xi_values_;
  std::vector<std::vector<MixedForm::Field>> xi_grads_;
};

/// A(t) = sum_j c_j(t) H dx_j with H diagonal and
/// c_j(t) = a_j + sum_i (b_ji cos 2 pi t_i + e_ji sin 2 pi t_i), i over the
/// free coordinates.  Constant in x and abelian, hence flat.  For r = 1 the
/// edge is a closed loop (A(0) = A(1)).
class AbelianFamily final : public FamilyEvaluator {
 public:
  struct Coefficients {
    std::vector<Complex> offset;                 // a_j, one per axis
    std::vector<std::vector<Complex>> cosine;    // b_ji
    std::vector<std::vector<Complex>> sine;      // e_ji
  };

  AbelianFamily(TorusChart chart, std::vector<Complex> diagonal, int r, Coefficients coeffs)
      : chart_(chart), h_(std::move(diagonal)), r_(r), c_(std::move(coeffs)) {
    const std::size_t d = static_cast<std::size_t>(chart_.dim);
    auto check = [&](const std::vector<std::vector<Complex>>& m) {
      if (m.size() != d) throw Error("AbelianFamily: need one coefficient row per axis");
      for (const auto& row : m)
        if (static_cast<int>(row.size()) != r_) throw Error("AbelianFamily: need one coefficient per simplex coordinate");
    };
    if (c_.offset.size() != d) throw Error("AbelianFamily: need one offset per axis");
    check(c_.cosine);
    check(c_.sine);
    if (h_.empty()) throw Error("AbelianFamily: empty diagonal");
  }

  int simplex_dim() const override { return r_; }
  const TorusChart& chart() const override { return chart_; }
  int rank() const override { return static_cast<int>(h_.size()); }
  std::string describe() const override { return "abelian(r=" + std::to_string(r_) + ")"; }

  Complex coefficient(int axis, const std::vector<double>& free) const {
    const std::size_t j = static_cast<std::size_t>(axis);
    Complex v = c_.offset[j];
    for (int i = 0; i < r_; ++i) {
      const double a = 2.0 * kPi * free[static_cast<std::size_t>(i)];
      v += c_.cosine[j][static_cast<std::size_t>(i)] * std::cos(a) + c_.sine[j][static_cast<std::size_t>(i)] * std::sin(a);
    }
    return v;
  }

  Complex coefficient_derivative(int axis, int coord, const std::vector<double>& free) const {
    const std::size_t j = static_cast<std::size_t>(axis);
    const std::size_t i = static_cast<std::size_t>(coord);
    const double a = 2.0 * kPi * free[i];
    return 2.0 * kPi * (-c_.cosine[j][i] * std::sin(a) + c_.sine[j][i] * std::cos(a));
  }

  FamilySample evaluate(const Barycentric& t) const override {
    const std::vector<double> free(t.begin() + 1, t.end());
    auto one_form = [&](auto coeff_of_axis) {
      std::vector<SquareMatrix> m;
      for (int axis = 0; axis < chart_.dim; ++axis) m.push_back(coeff_of_axis(axis) * diagonal());
      return MixedForm::constant_one_form(chart_, m);
    };
    FamilySample s{Connection(one_form([&](int axis) { return coefficient(axis, free); })), {}};
    for (int i = 0; i < r_; ++i)
      s.tangents.push_back(one_form([&](int axis) { return coefficient_derivative(axis, i, free); }));
    return s;
  }

  SquareMatrix diagonal() const {
    SquareMatrix h = SquareMatrix::Zero(rank(), rank());
    for (int i = 0; i < rank(); ++i) h(i, i) = h_[static_cast<std::size_t>(i)];
    return h;
  }
  const std::vector<Complex>& diagonal_entries() const { return h_; }
  const Coefficients& coefficients() const { return c_; }

 private:
  TorusChart chart_;
  std::vector<Complex> h_;
  int r_;
  Coefficients c_;
};

/// Fixed gauge map applied to every member of a family.
class GaugedFamily final : public FamilyEvaluator {
 public:
  GaugedFamily(SimplexFamily parent, GaugeMap g) : parent_(std::move(parent)), g_(std::move(g)) {}

  int simplex_dim() const override { return parent_.dim(); }
  const TorusChart& chart() const override { return parent_.chart(); }
  int rank() const override { return parent_.rank(); }
  std::string describe() const override { return "gauged " + parent_.label(); }

  FamilySample evaluate(const Barycentric& t) const override {
    FamilySample s = parent_.evaluate(t);
    FamilySample out{gauge_transform(s.connection, g_), {}};
    for (const auto& tan : s.tangents) out.tangents.push_back(conjugate(tan, g_));
    return out;
  }

 private:
  SimplexFamily parent_;
  GaugeMap g_;
};

/// g^* applied to a whole family.  Affine families stay affine (the gauge
/// action commutes with affine combinations since sum t_i = 1).
inline SimplexFamily gauge_transform(const SimplexFamily& fam, const GaugeMap& g) {
  if (fam.is_affine()) {
    std::vector<Connection> v;
    for (const auto& c : fam.vertices()) v.push_back(gauge_transform(c, g));
    return SimplexFamily::affine(std::move(v), "gauged " + fam.label());
  }
  return SimplexFamily::closed_form(std::make_shared<GaugedFamily>(fam, g));
}

/// Chain-term comparator: same shape and A(t) within `tol` (max norm) at the
/// vertices and the barycenter.
inline bool families_close(const SimplexFamily& a, const SimplexFamily& b, double tol) {
  if (a.dim() != b.dim() || a.rank() != b.rank() || !(a.chart() == b.chart())) return false;
  if (a.is_affine() && b.is_affine()) {
    for (std::size_t i = 0; i < a.vertices().size(); ++i)
      if (max_norm_difference(a.vertices()[i].form(), b.vertices()[i].form()) > tol) return false;
    return true;
  }
  std::vector<Barycentric> pts;
  for (int i = 0; i <= a.dim(); ++i) pts.push_back(simplex_vertex(a.dim(), i));
  if (a.dim() >= 1) pts.push_back(barycenter(a.dim()));
  for (const auto& t : pts)
    if (max_norm_difference(a.connection_at(t).form(), b.connection_at(t).form()) > tol) return false;
  return true;
}

}  // namespace cslab
