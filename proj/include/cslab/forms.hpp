// Matrix-valued mixed-degree differential forms on a periodic chart.
//
// A MixedForm is a homogeneous element of
//     Lambda[g_0 .. g_{m-1}] (x) Lambda[dx_0 .. dx_{d-1}] (x) C^{n x n}-valued grid functions,
// where the g_i are formal anticommuting generators standing for ds / dt_i
// of a parameter space (prism or simplex fibre).  Basis monomials are
// ordered generators first, then coordinate differentials, each ascending.
// Indices of generators and axes are 0-based.
#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cslab/core.hpp"
#include "cslab/invariant_poly.hpp"
#include "cslab/torus.hpp"

namespace cslab {

struct FormKey {
  std::uint32_t gens = 0;  // bitmask over odd generators
  std::uint32_t axes = 0;  // bitmask over coordinate differentials
  auto operator<=>(const FormKey&) const = default;
  int degree() const { return std::popcount(gens) + std::popcount(axes); }
};

inline std::uint32_t axes_mask(std::initializer_list<int> axes) {
  std::uint32_t m = 0;
  for (int a : axes) m |= 1u << a;
  return m;
}

/// Number of pairs (u in a, v in b) with u > v: the sign exponent for merging
/// two ascending index lists into one.
inline int merge_inversions(std::uint32_t a, std::uint32_t b) {
  int count = 0;
  while (b != 0) {
    const int v = std::countr_zero(b);
    b &= b - 1;
    const std::uint32_t above = (v >= 31) ? 0u : ~((2u << v) - 1u);
    count += std::popcount(a & above);
  }
  return count;
}

class MixedForm {
 public:
  using Field = std::vector<Complex>;  // points * rank * rank, point-major, row-major matrices

  MixedForm() = default;
  MixedForm(TorusChart chart, int rank, int odd_params, int degree)
      : chart_(chart), rank_(rank), odd_params_(odd_params), degree_(degree) {
    if (rank < 1) throw Error("MixedForm: rank must be positive");
    if (odd_params < 0 || odd_params > 8) throw Error("MixedForm: odd_params out of range");
    if (degree < 0) throw Error("MixedForm: negative degree");
  }

  static MixedForm zero(const TorusChart& chart, int rank, int odd_params, int degree) {
    return MixedForm(chart, rank, odd_params, degree);
  }

  /// Matrix-valued 0-form from point-major row-major values.
  static MixedForm zero_form(const TorusChart& chart, int rank, Field values, int odd_params = 0) {
    MixedForm f(chart, rank, odd_params, 0);
    f.set(FormKey{}, std::move(values));
    return f;
  }

  /// Constant matrix 1-form sum_j C_j dx_j (C_j may be omitted past the end).
  static MixedForm constant_one_form(const TorusChart& chart, const std::vector<SquareMatrix>& coeffs) {
    if (coeffs.empty()) throw Error("constant_one_form: no coefficients");
    const int n = static_cast<int>(coeffs.front().rows());
    MixedForm f(chart, n, 0, 1);
    for (std::size_t axis = 0; axis < coeffs.size(); ++axis) {
      if (static_cast<int>(axis) >= chart.dim) throw Error("constant_one_form: more coefficients than axes");
      if (coeffs[axis].isZero(0.0)) continue;
      f.set(FormKey{0, 1u << axis}, constant_field(chart, coeffs[axis]));
    }
    return f;
  }

  static Field constant_field(const TorusChart& chart, const SquareMatrix& m) {
    const std::size_t n = static_cast<std::size_t>(m.rows());
    Field out(chart.points() * n * n);
    for (std::size_t pt = 0; pt < chart.points(); ++pt)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          out[(pt * n + i) * n + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
  }

  const TorusChart& chart() const { return chart_; }
  int rank() const { return rank_; }
  int odd_params() const { return odd_params_; }
  int degree() const { return degree_; }
  std::size_t field_size() const {
    return chart_.points() * static_cast<std::size_t>(rank_) * static_cast<std::size_t>(rank_);
  }

  const std::map<FormKey, Field>& components() const { return comps_; }
  bool empty() const { return comps_.empty(); }

  const Field* find(FormKey key) const {
    auto it = comps_.find(key);
    return it == comps_.end() ? nullptr : &it->second;
  }

  Field& component(FormKey key) {
    check_key(key);
    auto [it, inserted] = comps_.try_emplace(key);
    if (inserted) it->second.assign(field_size(), Complex{0.0, 0.0});
    return it->second;
  }

  void set(FormKey key, Field values) {
    check_key(key);
    if (values.size() != field_size()) throw Error("MixedForm::set: field size mismatch");
    comps_[key] = std::move(values);
  }

  void accumulate(FormKey key, const Field& values, Complex scale = 1.0) {
    Field& dst = component(key);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * values[i];
  }

  /// Value of one matrix entry of one component at a grid point (0 if absent).
  Complex at(FormKey key, std::size_t point, int row = 0, int col = 0) const {
    const Field* f = find(key);
    if (f == nullptr) return 0.0;
    const std::size_t n = static_cast<std::size_t>(rank_);
    return (*f)[(point * n + static_cast<std::size_t>(row)) * n + static_cast<std::size_t>(col)];
  }

  MixedForm& operator+=(const MixedForm& other) {
    check_compatible(other, "+");
    for (const auto& [key, field] : other.comps_) accumulate(key, field);
    return *this;
  }
  MixedForm& operator-=(const MixedForm& other) {
    check_compatible(other, "-");
    for (const auto& [key, field] : other.comps_) accumulate(key, field, -1.0);
    return *this;
  }
  MixedForm& operator*=(Complex s) {
    for (auto& [key, field] : comps_)
      for (auto& v : field) v *= s;
    return *this;
  }
  friend MixedForm operator+(MixedForm a, const MixedForm& b) { return a += b; }
  friend MixedForm operator-(MixedForm a, const MixedForm& b) { return a -= b; }
  friend MixedForm operator*(Complex s, MixedForm a) { return a *= s; }
  friend MixedForm operator*(MixedForm a, Complex s) { return a *= s; }

  /// Largest absolute value of any entry of any component.
  double max_norm() const {
    double m = 0.0;
    for (const auto& [key, field] : comps_)
      for (const auto& v : field) m = std::max(m, std::abs(v));
    return m;
  }

  bool same_space(const MixedForm& o) const {
    return chart_ == o.chart_ && rank_ == o.rank_ && odd_params_ == o.odd_params_ && degree_ == o.degree_;
  }

 private:
  void check_key(FormKey key) const {
    if (key.degree() != degree_) throw Error("MixedForm: component degree does not match form degree");
    if (key.gens >> odd_params_ != 0) throw Error("MixedForm: generator index out of range");
    if (key.axes >> chart_.dim != 0) throw Error("MixedForm: axis index out of range");
  }
  void check_compatible(const MixedForm& o, const char* op) const {
    if (!same_space(o)) throw Error(std::string("MixedForm: incompatible operands for ") + op);
  }

  TorusChart chart_{};
  int rank_ = 1;
  int odd_params_ = 0;
  int degree_ = 0;
  std::map<FormKey, Field> comps_;
};

inline double max_norm_difference(const MixedForm& a, const MixedForm& b) { return (a - b).max_norm(); }

/// Same form viewed with `odd_params` generators available (must not shrink
/// below the generators in use).
inline MixedForm embed_odd_params(const MixedForm& a, int odd_params) {
  MixedForm out(a.chart(), a.rank(), odd_params, a.degree());
  for (const auto& [key, field] : a.components()) out.set(key, field);
  return out;
}

/// g_i (x) I: the odd generator i as a constant rank-n form.
inline MixedForm odd_generator(const TorusChart& chart, int rank, int odd_params, int index) {
  if (index < 0 || index >= odd_params) throw Error("odd_generator: index out of range");
  MixedForm g(chart, rank, odd_params, 1);
  g.set(FormKey{1u << index, 0}, MixedForm::constant_field(chart, SquareMatrix::Identity(rank, rank)));
  return g;
}

/// s (x) I for a scalar (rank-1) form s.
inline MixedForm embed_scalar(const MixedForm& s, int rank) {
  if (s.rank() != 1) throw Error("embed_scalar: expected a scalar form");
  MixedForm out(s.chart(), rank, s.odd_params(), s.degree());
  const std::size_t n = static_cast<std::size_t>(rank);
  for (const auto& [key, field] : s.components()) {
    MixedForm::Field f(out.field_size(), Complex{0.0, 0.0});
    for (std::size_t pt = 0; pt < field.size(); ++pt)
      for (std::size_t i = 0; i < n; ++i) f[(pt * n + i) * n + i] = field[pt];
    out.set(key, std::move(f));
  }
  return out;
}

inline MixedForm identity_form(const TorusChart& chart, int rank, int odd_params = 0) {
  MixedForm out(chart, rank, odd_params, 0);
  out.set(FormKey{}, MixedForm::constant_field(chart, SquareMatrix::Identity(rank, rank)));
  return out;
}

/// Wedge product with Koszul signs; matrix factors multiply in order.
inline MixedForm wedge(const MixedForm& a, const MixedForm& b) {
  if (!(a.chart() == b.chart())) throw Error("wedge: chart mismatch");
  if (a.rank() != b.rank()) throw Error("wedge: rank mismatch");
  if (a.odd_params() != b.odd_params()) throw Error("wedge: odd parameter count mismatch");
  MixedForm out(a.chart(), a.rank(), a.odd_params(), a.degree() + b.degree());
  const std::size_t n = static_cast<std::size_t>(a.rank());
  const std::size_t np = a.chart().points();
  for (const auto& [ka, fa] : a.components()) {
    for (const auto& [kb, fb] : b.components()) {
      if ((ka.gens & kb.gens) != 0 || (ka.axes & kb.axes) != 0) continue;
      const int exponent = std::popcount(ka.axes) * std::popcount(kb.gens) +
                           merge_inversions(ka.gens, kb.gens) + merge_inversions(ka.axes, kb.axes);
      const double sign = ipow_sign(exponent);
      auto& dst = out.component(FormKey{ka.gens | kb.gens, ka.axes | kb.axes});
      if (n == 1) {
        for (std::size_t pt = 0; pt < np; ++pt) dst[pt] += sign * fa[pt] * fb[pt];
        continue;
      }
      for (std::size_t pt = 0; pt < np; ++pt) {
        const Complex* x = &fa[pt * n * n];
        const Complex* y = &fb[pt * n * n];
        Complex* z = &dst[pt * n * n];
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t k = 0; k < n; ++k) {
            const Complex xik = sign * x[i * n + k];
            for (std::size_t j = 0; j < n; ++j) z[i * n + j] += xik * y[k * n + j];
          }
      }
    }
  }
  return out;
}

/// Graded commutator [a, b] = a^b - (-1)^{|a||b|} b^a.
inline MixedForm graded_commutator(const MixedForm& a, const MixedForm& b) {
  return wedge(a, b) - ipow_sign(a.degree() * b.degree()) * wedge(b, a);
}

/// Exterior derivative in the coordinate directions; generators are constants.
/// d(f g_T dx_I) = sum_j d_j f dx_j ^ g_T ^ dx_I.
inline MixedForm exterior_derivative_x(const MixedForm& a) {
  MixedForm out(a.chart(), a.rank(), a.odd_params(), a.degree() + 1);
  const int howmany = a.rank() * a.rank();
  for (const auto& [key, field] : a.components()) {
    if (std::popcount(key.axes) == a.chart().dim) continue;
    const auto grad = grid_gradient(a.chart(), field, howmany);
    for (int axis = 0; axis < a.chart().dim; ++axis) {
      const std::uint32_t bit = 1u << axis;
      if (key.axes & bit) continue;
      const int exponent = std::popcount(key.gens) + std::popcount(key.axes & (bit - 1u));
      out.accumulate(FormKey{key.gens, key.axes | bit}, grad[static_cast<std::size_t>(axis)],
                     ipow_sign(exponent));
    }
  }
  return out;
}

/// Pointwise matrix trace; returns a scalar form.
inline MixedForm trace(const MixedForm& a) {
  MixedForm out(a.chart(), 1, a.odd_params(), a.degree());
  const std::size_t n = static_cast<std::size_t>(a.rank());
  for (const auto& [key, field] : a.components()) {
    MixedForm::Field t(a.chart().points(), Complex{0.0, 0.0});
    for (std::size_t pt = 0; pt < t.size(); ++pt)
      for (std::size_t i = 0; i < n; ++i) t[pt] += field[(pt * n + i) * n + i];
    out.set(key, std::move(t));
  }
  return out;
}

/// E_p of a matrix whose entries are even-degree forms (a commutative
/// algebra), by the Faddeev-LeVerrier recurrence with form-valued entries.
inline MixedForm graded_invariant(int p, const MixedForm& m) {
  if (m.degree() % 2 != 0) throw Error("graded_invariant: argument must have even total degree");
  if (p < 1) throw Error("graded_invariant: p must be positive");
  MixedForm zero(m.chart(), 1, m.odd_params(), p * m.degree());
  if (p > m.rank() || p * m.degree() > m.odd_params() + m.chart().dim) return zero;

  const int n = m.rank();
  MixedForm mk = identity_form(m.chart(), n, m.odd_params());
  for (int k = 1;; ++k) {
    MixedForm xm = wedge(m, mk);
    MixedForm c = trace(xm) * Complex(-1.0 / k);
    if (k == p) return c * ipow_sign(k);
    mk = xm + embed_scalar(c, n);
  }
}

/// Coefficient of g_{i1} ^ ... ^ g_{ik} (ascending) after moving those
/// generators to the front.  Remaining generators are renumbered compactly.
inline MixedForm fiber_extract(const MixedForm& a, const std::vector<int>& gens) {
  std::uint32_t sel = 0;
  for (int g : gens) {
    if (g < 0 || g >= a.odd_params()) throw Error("fiber_extract: unknown generator index " + std::to_string(g));
    if (sel & (1u << g)) throw Error("fiber_extract: repeated generator index");
    sel |= 1u << g;
  }
  const int removed = std::popcount(sel);
  MixedForm out(a.chart(), a.rank(), a.odd_params() - removed, a.degree() - removed);
  for (const auto& [key, field] : a.components()) {
    if ((key.gens & sel) != sel) continue;
    const std::uint32_t rest = key.gens & ~sel;
    // moving the selected generators in front of the rest: count (rest < selected) pairs
    const double sign = ipow_sign(merge_inversions(sel, rest));
    std::uint32_t compact = 0;
    int next = 0;
    for (int g = 0; g < a.odd_params(); ++g) {
      if (sel & (1u << g)) continue;
      if (rest & (1u << g)) compact |= 1u << next;
      ++next;
    }
    out.accumulate(FormKey{compact, key.axes}, field, sign);
  }
  return out;
}

/// Coordinate subtorus cycle: the listed axes span it, the remaining axes are
/// held at the given grid indices.
struct CycleSpec {
  std::vector<int> axes;     // strictly increasing, 0-based
  std::vector<int> offsets;  // grid indices for the complementary axes, in axis order
  int orientation = 1;

  int dimension() const { return static_cast<int>(axes.size()); }
  std::uint32_t mask() const {
    std::uint32_t m = 0;
    for (int a : axes) m |= 1u << a;
    return m;
  }

  void validate(const TorusChart& chart) const {
    for (std::size_t i = 0; i < axes.size(); ++i) {
      if (axes[i] < 0 || axes[i] >= chart.dim) throw ValidationError("cycle axis out of range");
      if (i > 0 && axes[i] <= axes[i - 1]) throw ValidationError("cycle axes must be strictly increasing");
    }
    if (orientation != 1 && orientation != -1) throw ValidationError("cycle orientation must be +1 or -1");
    const std::size_t complement = static_cast<std::size_t>(chart.dim) - axes.size();
    if (!offsets.empty() && offsets.size() != complement)
      throw ValidationError("cycle offsets must list one grid index per complementary axis");
    for (int o : offsets)
      if (o < 0 || o >= chart.resolution) throw ValidationError("cycle offset out of range");
  }

  bool operator==(const CycleSpec&) const = default;
};

inline std::string describe(const CycleSpec& c) {
  std::string s = (c.orientation < 0 ? "-T[" : "T[");
  for (std::size_t i = 0; i < c.axes.size(); ++i) s += (i ? "," : "") + std::to_string(c.axes[i]);
  s += "]";
  if (!c.offsets.empty()) {
    s += "@(";
    for (std::size_t i = 0; i < c.offsets.size(); ++i) s += (i ? "," : "") + std::to_string(c.offsets[i]);
    s += ")";
  }
  return s;
}

/// Full coordinate subtorus through the origin.
inline CycleSpec coordinate_cycle(std::vector<int> axes, int orientation = 1) {
  return CycleSpec{std::move(axes), {}, orientation};
}

/// Riemann sum over the subtorus grid (spectrally accurate for smooth
/// periodic integrands), times the orientation.
inline Complex integrate_cycle(const MixedForm& a, const CycleSpec& c) {
  if (a.rank() != 1) throw Error("integrate_cycle: form must be scalar");
  if (a.odd_params() != 0) throw Error("integrate_cycle: form still carries odd parameters");
  if (a.degree() != c.dimension()) throw Error("integrate_cycle: degree does not match cycle dimension");
  const TorusChart& chart = a.chart();
  c.validate(chart);
  const MixedForm::Field* f = a.find(FormKey{0, c.mask()});
  if (f == nullptr) return 0.0;

  std::size_t base = 0;
  std::size_t off = 0;
  for (int axis = 0; axis < chart.dim; ++axis) {
    if (c.mask() & (1u << axis)) continue;
    const int o = c.offsets.empty() ? 0 : c.offsets[off];
    ++off;
    base += static_cast<std::size_t>(o) * chart.axis_stride(axis);
  }
  const std::size_t k = c.axes.size();
  std::size_t count = 1;
  for (std::size_t i = 0; i < k; ++i) count *= static_cast<std::size_t>(chart.resolution);
  std::vector<Complex> samples(count);
  for (std::size_t s = 0; s < count; ++s) {
    std::size_t rem = s;
    std::size_t idx = base;
    for (std::size_t i = k; i-- > 0;) {
      idx += (rem % static_cast<std::size_t>(chart.resolution)) * chart.axis_stride(c.axes[i]);
      rem /= static_cast<std::size_t>(chart.resolution);
    }
    samples[s] = (*f)[idx];
  }
  const double cell = std::pow(1.0 / chart.resolution, static_cast<double>(k));
  return static_cast<double>(c.orientation) * cell * pairwise_sum(samples);
}

}  // namespace cslab
