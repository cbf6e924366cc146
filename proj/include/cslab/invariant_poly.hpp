// GL_n-invariant polynomials on complex square matrices: the coefficients
// E_k of det(I + lambda x) and their full polarizations.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cslab/core.hpp"

namespace cslab {

using SquareMatrix = Eigen::MatrixXcd;

/// [E_0, ..., E_n] with E_0 = 1; E_k is the k-th elementary symmetric
/// function of the eigenvalues.
struct InvariantCoeffs {
  std::vector<Complex> values;

  Complex operator[](std::size_t k) const {
    return k < values.size() ? values[k] : Complex{0.0, 0.0};
  }
  std::size_t size() const { return values.size(); }
};

/// Faddeev-LeVerrier: with M_1 = I, c_{n-k} = -tr(x M_k)/k and
/// M_{k+1} = x M_k + c_{n-k} I.  det(lambda I - x) = sum c_j lambda^j, hence
/// E_k(x) = (-1)^k c_{n-k}.
inline InvariantCoeffs char_coefficients(const SquareMatrix& x) {
  if (x.rows() != x.cols()) throw Error("char_coefficients: matrix is not square");
  const Eigen::Index n = x.rows();
  InvariantCoeffs out;
  out.values.assign(static_cast<std::size_t>(n) + 1, Complex{0.0, 0.0});
  out.values[0] = 1.0;
  SquareMatrix m = SquareMatrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    const SquareMatrix xm = x * m;
    const Complex c = -xm.trace() / static_cast<double>(k);
    out.values[static_cast<std::size_t>(k)] = ipow_sign(static_cast<int>(k)) * c;
    m = xm + c * SquareMatrix::Identity(n, n);
  }
  return out;
}

namespace detail {
inline bool entries_less(const SquareMatrix& a, const SquareMatrix& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const Complex x = a(k), y = b(k);
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
  }
  return false;
}
}  // namespace detail

/// Full polarization of E_p, evaluated by subset inclusion-exclusion:
///   (1/p!) sum_{S subset {1..p}} (-1)^{p-|S|} E_p(sum_{i in S} args_i).
/// Arguments are put in a canonical order first, so permuting them gives a
/// bit-identical result.
inline Complex polarized(int p, std::vector<SquareMatrix> args) {
  if (args.empty()) throw Error("polarized: no arguments");
  const Eigen::Index n = args.front().rows();
  if (p < 1 || p > n) throw Error("polarized: degree p must satisfy 1 <= p <= n");
  if (static_cast<int>(args.size()) != p) throw Error("polarized: expected exactly p arguments");
  for (const auto& a : args)
    if (a.rows() != n || a.cols() != n) throw Error("polarized: argument shape mismatch");

  std::stable_sort(args.begin(), args.end(), detail::entries_less);
  double factorial = 1.0;
  for (int i = 2; i <= p; ++i) factorial *= i;

  std::vector<Complex> terms;
  terms.reserve(std::size_t{1} << p);
  for (std::uint32_t mask = 1; mask < (1u << p); ++mask) {
    SquareMatrix sum = SquareMatrix::Zero(n, n);
    int size = 0;
    for (int i = 0; i < p; ++i)
      if (mask & (1u << i)) {
        sum += args[static_cast<std::size_t>(i)];
        ++size;
      }
    terms.push_back(ipow_sign(p - size) * char_coefficients(sum)[static_cast<std::size_t>(p)]);
  }
  return pairwise_sum(terms) / factorial;
}

/// Power sums tr(x^k), k = 1..n, from E_k via Newton's identities
/// (Chern-character helper).
inline std::vector<Complex> power_sums(const InvariantCoeffs& e) {
  const std::size_t n = e.size() - 1;
  std::vector<Complex> s(n + 1, Complex{0.0, 0.0});
  for (std::size_t k = 1; k <= n; ++k) {
    Complex acc = ipow_sign(static_cast<int>(k) - 1) * static_cast<double>(k) * e[k];
    for (std::size_t i = 1; i < k; ++i)
      acc += ipow_sign(static_cast<int>(k + i) - 1) * e[k - i] * s[i];
    s[k] = acc;
  }
  return s;
}

}  // namespace cslab
