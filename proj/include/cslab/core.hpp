// Shared scalar types, error classes, deterministic reductions and the seeded
// generator used throughout cslab.
#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cslab {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kTwoPiI{0.0, 2.0 * std::numbers::pi};

/// Normalization applied to every curvature before an invariant polynomial
/// is evaluated: -1/(2 pi i).  With it, integral periods land in Z.
inline constexpr Complex kChernNormalization = Complex{-1.0, 0.0} / kTwoPiI;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for configuration / precondition problems detectable before any
/// numerical work starts.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Pairwise (tree) summation.  Fixed order regardless of platform so that
/// reductions are reproducible bit-for-bit.
template <typename T>
T pairwise_sum(std::span<const T> values) {
  if (values.empty()) return T{};
  if (values.size() <= 8) {
    T acc = values[0];
    for (std::size_t i = 1; i < values.size(); ++i) acc += values[i];
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& values) {
  return pairwise_sum(std::span<const T>(values));
}

/// Seeded generator.  The engine is std::mt19937_64 (fully specified by the
/// standard); uniforms are derived by hand so that other languages can
/// reproduce the exact stream.
class Rng {
 public:
  static constexpr const char* kAlgorithm =
      "mt19937_64; uniform01 = (x >> 11) * 2^-53; uniform(a,b) = a + (b-a)*uniform01";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  Complex complex_uniform(double scale) {
    const double re = uniform(-scale, scale);
    const double im = uniform(-scale, scale);
    return {re, im};
  }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

inline double ipow_sign(int exponent) { return (exponent % 2 == 0) ? 1.0 : -1.0; }

}  // namespace cslab
