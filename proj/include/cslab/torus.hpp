// Periodic grid charts (flat tori [0,1)^d) and the derivative operators on
// them: spectral (FFTW) or central finite differences of order 2 / 4.
#pragma once

#include <fftw3.h>

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "cslab/core.hpp"

namespace cslab {

enum class DerivativeMode { spectral, fd2, fd4 };

inline std::string to_string(DerivativeMode mode) {
  switch (mode) {
    case DerivativeMode::spectral: return "spectral";
    case DerivativeMode::fd2: return "fd2";
    case DerivativeMode::fd4: return "fd4";
  }
  return "unknown";
}

inline DerivativeMode derivative_mode_from_string(const std::string& name) {
  if (name == "spectral") return DerivativeMode::spectral;
  if (name == "fd2") return DerivativeMode::fd2;
  if (name == "fd4") return DerivativeMode::fd4;
  throw ValidationError("unknown derivative mode '" + name + "' (expected spectral, fd2 or fd4)");
}

inline constexpr int kMaxChartDim = 4;

/// Grid x_j = k/N on each of `dim` axes.  Linear point index is row-major
/// with axis 0 slowest (the FFTW layout).
struct TorusChart {
  int dim = 1;
  int resolution = 8;
  DerivativeMode mode = DerivativeMode::spectral;

  TorusChart() = default;
  TorusChart(int d, int n, DerivativeMode m = DerivativeMode::spectral)
      : dim(d), resolution(n), mode(m) {
    if (d < 1 || d > kMaxChartDim) throw ValidationError("chart dimension must be in 1..4");
    if (n < 4 || n % 2 != 0) throw ValidationError("chart resolution must be even and >= 4");
  }

  std::size_t points() const {
    std::size_t p = 1;
    for (int i = 0; i < dim; ++i) p *= static_cast<std::size_t>(resolution);
    return p;
  }

  std::size_t axis_stride(int axis) const {
    std::size_t s = 1;
    for (int i = axis + 1; i < dim; ++i) s *= static_cast<std::size_t>(resolution);
    return s;
  }

  std::array<int, kMaxChartDim> multi_index(std::size_t linear) const {
    std::array<int, kMaxChartDim> idx{};
    for (int axis = dim - 1; axis >= 0; --axis) {
      idx[static_cast<std::size_t>(axis)] = static_cast<int>(linear % static_cast<std::size_t>(resolution));
      linear /= static_cast<std::size_t>(resolution);
    }
    return idx;
  }

  std::array<double, kMaxChartDim> coordinates(std::size_t linear) const {
    const auto idx = multi_index(linear);
    std::array<double, kMaxChartDim> x{};
    for (int axis = 0; axis < dim; ++axis)
      x[static_cast<std::size_t>(axis)] = static_cast<double>(idx[static_cast<std::size_t>(axis)]) / resolution;
    return x;
  }

  bool operator==(const TorusChart&) const = default;
};

inline std::string describe(const TorusChart& c) {
  return "T^" + std::to_string(c.dim) + " N=" + std::to_string(c.resolution) + " " + to_string(c.mode);
}

namespace detail {

/// Signed frequency of FFT index m on an axis of length n; the Nyquist mode
/// is dropped for first derivatives.
inline int signed_frequency(int m, int n) {
  if (2 * m == n) return 0;
  return (2 * m < n) ? m : m - n;
}

class FftwPlan {
 public:
  FftwPlan(const TorusChart& chart, int howmany, Complex* in, Complex* out, int sign) {
    std::array<int, kMaxChartDim> dims{};
    for (int i = 0; i < chart.dim; ++i) dims[static_cast<std::size_t>(i)] = chart.resolution;
    plan_ = fftw_plan_many_dft(chart.dim, dims.data(), howmany, reinterpret_cast<fftw_complex*>(in),
                               nullptr, howmany, 1, reinterpret_cast<fftw_complex*>(out), nullptr,
                               howmany, 1, sign, FFTW_ESTIMATE);
    if (plan_ == nullptr) throw Error("FFTW planning failed");
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  ~FftwPlan() { fftw_destroy_plan(plan_); }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

}  // namespace detail

/// Partial derivatives along every axis of `howmany` interleaved periodic
/// fields (layout: point-major, `howmany` values per point).  Returns one
/// array per axis with the same layout.
inline std::vector<std::vector<Complex>> grid_gradient(const TorusChart& chart,
                                                       std::span<const Complex> field, int howmany) {
  const std::size_t np = chart.points();
  const std::size_t h = static_cast<std::size_t>(howmany);
  if (field.size() != np * h) throw Error("grid_gradient: field size does not match chart");
  std::vector<std::vector<Complex>> grad(static_cast<std::size_t>(chart.dim));
  const int n = chart.resolution;

  if (chart.mode == DerivativeMode::spectral) {
    std::vector<Complex> spectrum(field.begin(), field.end());
    {
      detail::FftwPlan forward(chart, howmany, spectrum.data(), spectrum.data(), FFTW_FORWARD);
      forward.execute();
    }
    const double inv = 1.0 / static_cast<double>(np);
    for (int axis = 0; axis < chart.dim; ++axis) {
      auto& out = grad[static_cast<std::size_t>(axis)];
      out.resize(np * h);
      for (std::size_t pt = 0; pt < np; ++pt) {
        const int m = chart.multi_index(pt)[static_cast<std::size_t>(axis)];
        const Complex factor = kTwoPiI * static_cast<double>(detail::signed_frequency(m, n)) * inv;
        for (std::size_t c = 0; c < h; ++c) out[pt * h + c] = factor * spectrum[pt * h + c];
      }
      detail::FftwPlan backward(chart, howmany, out.data(), out.data(), FFTW_BACKWARD);
      backward.execute();
    }
    return grad;
  }

  for (int axis = 0; axis < chart.dim; ++axis) {
    auto& out = grad[static_cast<std::size_t>(axis)];
    out.assign(np * h, Complex{0.0, 0.0});
    const std::size_t stride = chart.axis_stride(axis);
    for (std::size_t pt = 0; pt < np; ++pt) {
      const int i = chart.multi_index(pt)[static_cast<std::size_t>(axis)];
      auto shifted = [&](int offset) {
        const int j = ((i + offset) % n + n) % n;
        return pt + (static_cast<std::size_t>(j) - static_cast<std::size_t>(i)) * stride;
      };
      const std::size_t p1 = shifted(1), m1 = shifted(-1);
      if (chart.mode == DerivativeMode::fd2) {
        const double scale = n / 2.0;
        for (std::size_t c = 0; c < h; ++c)
          out[pt * h + c] = scale * (field[p1 * h + c] - field[m1 * h + c]);
      } else {
        const std::size_t p2 = shifted(2), m2 = shifted(-2);
        const double scale = n / 12.0;
        for (std::size_t c = 0; c < h; ++c)
          out[pt * h + c] = scale * (-field[p2 * h + c] + 8.0 * field[p1 * h + c] -
                                     8.0 * field[m1 * h + c] + field[m2 * h + c]);
      }
    }
  }
  return grad;
}

}  // namespace cslab
