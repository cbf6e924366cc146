// Matrix-valued trigonometric polynomials on T^d, evaluable in closed form
// anywhere (value and gradient) and sampleable on grid charts.
#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "cslab/core.hpp"
#include "cslab/forms.hpp"
#include "cslab/invariant_poly.hpp"
#include "cslab/torus.hpp"

namespace cslab {

struct TrigMode {
  std::array<int, kMaxChartDim> wave{};
  SquareMatrix coeff;
};

/// f(x) = sum_k C_k exp(2 pi i k.x).
class TrigField {
 public:
  TrigField() = default;
  TrigField(int dim, int rank) : dim_(dim), rank_(rank) {}

  /// Every wave vector in [-K, K]^d with complex coefficient entries drawn
  /// uniformly from the square of half-width amplitude / (#modes).
  static TrigField random(int dim, int rank, int max_mode, double amplitude, Rng& rng) {
    TrigField f(dim, rank);
    int count = 1;
    for (int i = 0; i < dim; ++i) count *= 2 * max_mode + 1;
    const double scale = amplitude / count;
    for (int m = 0; m < count; ++m) {
      TrigMode mode;
      int rem = m;
      for (int axis = dim - 1; axis >= 0; --axis) {
        mode.wave[static_cast<std::size_t>(axis)] = rem % (2 * max_mode + 1) - max_mode;
        rem /= 2 * max_mode + 1;
      }
      mode.coeff = SquareMatrix(rank, rank);
      for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j) mode.coeff(i, j) = rng.complex_uniform(scale);
      f.modes_.push_back(std::move(mode));
    }
    f.max_mode_ = max_mode;
    return f;
  }

  void add_mode(std::array<int, kMaxChartDim> wave, SquareMatrix coeff) {
    for (int axis = 0; axis < dim_; ++axis) max_mode_ = std::max(max_mode_, std::abs(wave[static_cast<std::size_t>(axis)]));
    modes_.push_back(TrigMode{wave, std::move(coeff)});
  }

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  int max_mode() const { return max_mode_; }
  const std::vector<TrigMode>& modes() const { return modes_; }

  SquareMatrix value(std::span<const double> x) const {
    SquareMatrix out = SquareMatrix::Zero(rank_, rank_);
    for (const auto& mode : modes_) out += phase(mode, x) * mode.coeff;
    return out;
  }

  /// d f / d x_axis.
  SquareMatrix derivative(std::span<const double> x, int axis) const {
    SquareMatrix out = SquareMatrix::Zero(rank_, rank_);
    for (const auto& mode : modes_)
      out += kTwoPiI * static_cast<double>(mode.wave[static_cast<std::size_t>(axis)]) * phase(mode, x) * mode.coeff;
    return out;
  }

  /// Grid samples (point-major, row-major); axis >= 0 samples d/dx_axis.
  MixedForm::Field sample(const TorusChart& chart, int axis = -1) const {
    if (chart.dim != dim_) throw Error("TrigField::sample: chart dimension mismatch");
    const std::size_t n = static_cast<std::size_t>(rank_);
    MixedForm::Field out(chart.points() * n * n, Complex{0.0, 0.0});
    for (std::size_t pt = 0; pt < chart.points(); ++pt) {
      const auto x = chart.coordinates(pt);
      const SquareMatrix v = axis < 0 ? value(std::span<const double>(x.data(), static_cast<std::size_t>(dim_)))
                                      : derivative(std::span<const double>(x.data(), static_cast<std::size_t>(dim_)), axis);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          out[(pt * n + i) * n + j] = v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return out;
  }

 private:
  Complex phase(const TrigMode& mode, std::span<const double> x) const {
    double arg = 0.0;
    for (int axis = 0; axis < dim_; ++axis)
      arg += mode.wave[static_cast<std::size_t>(axis)] * x[static_cast<std::size_t>(axis)];
    return std::exp(kTwoPiI * arg);
  }

  int dim_ = 1;
  int rank_ = 1;
  int max_mode_ = 0;
  std::vector<TrigMode> modes_;
};

/// Connection-shaped bundle of trig fields: A = sum_j fields[j] dx_j.
struct TrigOneForm {
  std::vector<TrigField> components;  // one per axis

  int max_mode() const {
    int k = 0;
    for (const auto& c : components) k = std::max(k, c.max_mode());
    return k;
  }

  static TrigOneForm random(int dim, int rank, int max_mode, double amplitude, Rng& rng) {
    TrigOneForm a;
    for (int axis = 0; axis < dim; ++axis) a.components.push_back(TrigField::random(dim, rank, max_mode, amplitude, rng));
    return a;
  }

  MixedForm sample(const TorusChart& chart) const {
    const int rank = components.empty() ? 1 : components.front().rank();
    MixedForm a(chart, rank, 0, 1);
    for (std::size_t axis = 0; axis < components.size(); ++axis)
      a.set(FormKey{0, 1u << axis}, components[axis].sample(chart));
    return a;
  }
};

}  // namespace cslab
