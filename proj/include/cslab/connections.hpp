// Connections d + A in a fixed trivialization, their curvature, gauge maps
// and the gauge action A -> g^{-1} dg + g^{-1} A g.
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cslab/core.hpp"
#include "cslab/forms.hpp"
#include "cslab/trig_field.hpp"

namespace cslab {

using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace detail {
inline Eigen::Map<const RowMatrix> matrix_at(const MixedForm::Field& f, std::size_t pt, int n) {
  return Eigen::Map<const RowMatrix>(f.data() + pt * static_cast<std::size_t>(n * n), n, n);
}
inline Eigen::Map<RowMatrix> matrix_at(MixedForm::Field& f, std::size_t pt, int n) {
  return Eigen::Map<RowMatrix>(f.data() + pt * static_cast<std::size_t>(n * n), n, n);
}
}  // namespace detail

/// Connection 1-form A (single-dx components only, no odd parameters).
class Connection {
 public:
  Connection() = default;
  explicit Connection(MixedForm a) : a_(std::move(a)) {
    if (a_.degree() != 1) throw Error("Connection: form must have degree 1");
    if (a_.odd_params() != 0) throw Error("Connection: form must not carry odd parameters");
  }

  static Connection zero(const TorusChart& chart, int rank) { return Connection(MixedForm(chart, rank, 0, 1)); }
  static Connection constant(const TorusChart& chart, const std::vector<SquareMatrix>& coeffs) {
    return Connection(MixedForm::constant_one_form(chart, coeffs));
  }

  const MixedForm& form() const { return a_; }
  const TorusChart& chart() const { return a_.chart(); }
  int rank() const { return a_.rank(); }

 private:
  MixedForm a_;
};

/// F = dA + A ^ A.
inline MixedForm curvature(const Connection& a) {
  return exterior_derivative_x(a.form()) + wedge(a.form(), a.form());
}

inline double flatness_residual(const Connection& a) { return curvature(a).max_norm(); }

/// Covariant exterior derivative of an adjoint-valued form u: du + [A, u].
inline MixedForm covariant_derivative(const Connection& a, const MixedForm& u) {
  const MixedForm lifted = embed_odd_params(a.form(), u.odd_params());
  return exterior_derivative_x(u) + graded_commutator(lifted, u);
}

/// Derivative of the matrix exponential at X in direction E: the upper-right
/// block of exp([[X, E], [0, X]]).
inline SquareMatrix exp_directional_derivative(const SquareMatrix& x, const SquareMatrix& e) {
  const Eigen::Index n = x.rows();
  SquareMatrix block = SquareMatrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = x;
  block.bottomRightCorner(n, n) = x;
  block.topRightCorner(n, n) = e;
  const SquareMatrix ex = block.exp();
  return ex.topRightCorner(n, n);
}

/// Grid field of invertible matrices.  The differential dg is kept in closed
/// form when the constructor knows it; otherwise it is computed on the grid.
class GaugeMap {
 public:
  GaugeMap(const TorusChart& chart, int rank, MixedForm::Field values, std::optional<MixedForm> differential = {})
      : g_(MixedForm::zero_form(chart, rank, std::move(values))), dg_(std::move(differential)) {
    if (dg_ && (dg_->degree() != 1 || dg_->rank() != rank || !(dg_->chart() == chart)))
      throw Error("GaugeMap: differential has the wrong shape");
    const auto& f = *g_.find(FormKey{});
    double min_det = std::numeric_limits<double>::infinity();
    for (std::size_t pt = 0; pt < chart.points(); ++pt)
      min_det = std::min(min_det, std::abs(detail::matrix_at(f, pt, rank).determinant()));
    if (!(min_det > 1e-8)) throw Error("GaugeMap: not invertible (min |det g| <= 1e-8)");
  }

  static GaugeMap constant(const TorusChart& chart, const SquareMatrix& g) {
    const int n = static_cast<int>(g.rows());
    return GaugeMap(chart, n, MixedForm::constant_field(chart, g), MixedForm(chart, n, 0, 1));
  }

  /// g(x) = exp(2 pi i diag(windings) x_axis): a large gauge transformation.
  static GaugeMap winding(const TorusChart& chart, const std::vector<int>& windings, int axis = 0) {
    const int n = static_cast<int>(windings.size());
    if (axis < 0 || axis >= chart.dim) throw Error("GaugeMap::winding: axis out of range");
    MixedForm::Field g(chart.points() * static_cast<std::size_t>(n * n), Complex{0.0, 0.0});
    MixedForm::Field dg(g.size(), Complex{0.0, 0.0});
    for (std::size_t pt = 0; pt < chart.points(); ++pt) {
      const double x = chart.coordinates(pt)[static_cast<std::size_t>(axis)];
      for (int i = 0; i < n; ++i) {
        const double m = windings[static_cast<std::size_t>(i)];
        const Complex e = std::exp(kTwoPiI * m * x);
        g[pt * static_cast<std::size_t>(n * n) + static_cast<std::size_t>(i * n + i)] = e;
        dg[pt * static_cast<std::size_t>(n * n) + static_cast<std::size_t>(i * n + i)] = kTwoPiI * m * e;
      }
    }
    MixedForm d(chart, n, 0, 1);
    d.set(FormKey{0, 1u << axis}, std::move(dg));
    return GaugeMap(chart, n, std::move(g), std::move(d));
  }

  /// g(x) = exp(xi(x)) for a trig-polynomial xi, with dg from the exact
  /// directional derivative of the exponential.
  static GaugeMap exponential(const TorusChart& chart, const TrigField& xi) {
    const int n = xi.rank();
    const std::size_t nn = static_cast<std::size_t>(n * n);
    MixedForm::Field g(chart.points() * nn);
    MixedForm d(chart, n, 0, 1);
    std::vector<MixedForm::Field> dg(static_cast<std::size_t>(chart.dim), MixedForm::Field(g.size()));
    for (std::size_t pt = 0; pt < chart.points(); ++pt) {
      const auto xa = chart.coordinates(pt);
      const std::span<const double> x(xa.data(), static_cast<std::size_t>(chart.dim));
      const SquareMatrix v = xi.value(x);
      const SquareMatrix e = v.exp();
      detail::matrix_at(g, pt, n) = e;
      for (int axis = 0; axis < chart.dim; ++axis)
        detail::matrix_at(dg[static_cast<std::size_t>(axis)], pt, n) =
            exp_directional_derivative(v, xi.derivative(x, axis));
    }
    for (int axis = 0; axis < chart.dim; ++axis) d.set(FormKey{0, 1u << axis}, std::move(dg[static_cast<std::size_t>(axis)]));
    return GaugeMap(chart, n, std::move(g), std::move(d));
  }

  const TorusChart& chart() const { return g_.chart(); }
  int rank() const { return g_.rank(); }
  const MixedForm& form() const { return g_; }
  bool has_closed_form_differential() const { return dg_.has_value(); }

  MixedForm differential() const { return dg_ ? *dg_ : exterior_derivative_x(g_); }

  MixedForm inverse() const {
    const int n = rank();
    MixedForm::Field inv(g_.field_size());
    const auto& f = *g_.find(FormKey{});
    for (std::size_t pt = 0; pt < chart().points(); ++pt)
      detail::matrix_at(inv, pt, n) = detail::matrix_at(f, pt, n).inverse();
    return MixedForm::zero_form(chart(), n, std::move(inv));
  }

 private:
  MixedForm g_;
  std::optional<MixedForm> dg_;
};

/// A^g = g^{-1} dg + g^{-1} A g.
inline Connection gauge_transform(const Connection& a, const GaugeMap& g) {
  if (!(a.chart() == g.chart()) || a.rank() != g.rank()) throw Error("gauge_transform: shape mismatch");
  const MixedForm ginv = g.inverse();
  return Connection(wedge(ginv, g.differential()) + wedge(wedge(ginv, a.form()), g.form()));
}

/// g^{-1} u g for a form u with values in gl_n.
inline MixedForm conjugate(const MixedForm& u, const GaugeMap& g) {
  const MixedForm ginv = embed_odd_params(g.inverse(), u.odd_params());
  return wedge(wedge(ginv, u), embed_odd_params(g.form(), u.odd_params()));
}

}  // namespace cslab
