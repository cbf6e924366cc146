// Integer chains of simplex families, boundaries and cycles, the character
// map rho on cycles and its C/Z reduction on fiberwise-flat cycles.
#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cslab/core.hpp"
#include "cslab/families.hpp"
#include "cslab/forms.hpp"
#include "cslab/transgression.hpp"

namespace cslab {

inline constexpr double kChainMergeTolerance = 1e-12;
inline constexpr double kFlatClassTolerance = 1e-10;
inline constexpr double kFlatnessGate = 1e-8;
inline constexpr double kFlatVanishingGate = 1e-9;

struct ChainTerm {
  long long coeff = 0;
  SimplexFamily family;
};

class SimplexChain {
 public:
  explicit SimplexChain(int r = 0) : r_(r) {
    if (r < 0) throw Error("SimplexChain: negative dimension");
  }

  static SimplexChain single(SimplexFamily fam, long long coeff = 1) {
    SimplexChain c(fam.dim());
    c.add(coeff, std::move(fam));
    return c;
  }

  int dim() const { return r_; }
  const std::vector<ChainTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Adds coeff * fam, merging with an existing term when the families agree
  /// within `tol`; terms whose coefficient cancels to zero are removed.
  void add(long long coeff, SimplexFamily fam, double tol = kChainMergeTolerance) {
    if (fam.dim() != r_) throw Error("SimplexChain: term has the wrong simplex dimension");
    if (!terms_.empty()) {
      const auto& ref = terms_.front().family;
      if (!(ref.chart() == fam.chart()) || ref.rank() != fam.rank())
        throw Error("SimplexChain: terms must share chart and rank");
    }
    if (coeff == 0) return;
    for (auto it = terms_.begin(); it != terms_.end(); ++it) {
      if (families_close(it->family, fam, tol)) {
        it->coeff += coeff;
        if (it->coeff == 0) terms_.erase(it);
        return;
      }
    }
    terms_.push_back(ChainTerm{coeff, std::move(fam)});
  }

  SimplexChain& operator+=(const SimplexChain& o) {
    if (o.r_ != r_) throw Error("SimplexChain: dimension mismatch");
    for (const auto& t : o.terms_) add(t.coeff, t.family);
    return *this;
  }
  friend SimplexChain operator+(SimplexChain a, const SimplexChain& b) { return a += b; }

 private:
  int r_;
  std::vector<ChainTerm> terms_;
};

/// sum over terms of coeff * sum_i (-1)^i face_i, like terms merged.
inline SimplexChain boundary(const SimplexChain& chain, double tol = kChainMergeTolerance) {
  if (chain.dim() < 1) throw Error("boundary: requires r >= 1");
  SimplexChain out(chain.dim() - 1);
  for (const auto& t : chain.terms())
    for (int i = 0; i <= chain.dim(); ++i)
      out.add((i % 2 == 0 ? 1 : -1) * t.coeff, t.family.face(i), tol);
  return out;
}

inline bool is_cycle(const SimplexChain& chain, double tol = kChainMergeTolerance) {
  if (chain.dim() == 0) return true;
  return boundary(chain, tol).empty();
}

inline double fiberwise_flat_residual(const SimplexChain& chain) {
  double worst = 0.0;
  for (const auto& t : chain.terms())
    worst = std::max(worst, fiberwise_flat_residual(t.family, default_flatness_samples(chain.dim())));
  return worst;
}

// ---------------------------------------------------------------------------

struct ModZValue {
  Complex representative;  // real part in [0, 1)
};

inline ModZValue mod_reduce(Complex z) {
  double re = z.real() - std::floor(z.real());
  if (re >= 1.0) re = 0.0;
  return ModZValue{Complex{re, z.imag()}};
}

/// Distance in C/Z.
inline double mod_distance(const ModZValue& a, const ModZValue& b) {
  double dr = std::abs(a.representative.real() - b.representative.real());
  dr = std::min(dr, 1.0 - dr);
  return std::hypot(dr, a.representative.imag() - b.representative.imag());
}

struct CyclePairing {
  CycleSpec cycle;
  Complex value;
};

struct DifferentialCharacter {
  int degree = 0;
  std::vector<CyclePairing> pairings;
  MixedForm form;
  bool mod_lattice = false;

  bool is_flat_class() const { return form.max_norm() <= kFlatClassTolerance; }
};

/// Sum of coeff * TP(fam)_{p,r} over the chain.
inline MixedForm chain_tp(const SimplexChain& chain, const TorusChart& chart, int p,
                          const TransgressionOptions& opt = {}) {
  MixedForm out(chart, 1, 0, std::max(0, 2 * p - chain.dim()));
  for (const auto& t : chain.terms()) out += static_cast<double>(t.coeff) * transgress_tp(t.family, p, opt);
  return out;
}

/// Sum of coeff * omega(fam)_{p,r} over the chain.
inline MixedForm chain_omega(const SimplexChain& chain, const TorusChart& chart, int p,
                             const TransgressionOptions& opt = {}) {
  MixedForm out(chart, 1, 0, std::max(0, 2 * p - chain.dim() - 1));
  for (const auto& t : chain.terms()) out += static_cast<double>(t.coeff) * omega_form(t.family, p, opt);
  return out;
}

namespace detail {
inline void check_pairing_cycle(const CycleSpec& c, const TorusChart& chart, int expected_dim, const char* who) {
  c.validate(chart);
  if (c.dimension() != expected_dim)
    throw ValidationError(std::string(who) + ": cycle " + describe(c) + " has dimension " +
                          std::to_string(c.dimension()) + ", expected " + std::to_string(expected_dim));
}
}  // namespace detail

/// <c, chain> = - sum coeff * integral_c omega_{p,r}; any chain with p > r.
inline Complex chain_pairing(const SimplexChain& chain, int p, const CycleSpec& c, const TransgressionOptions& opt = {}) {
  if (chain.empty()) return 0.0;
  const TorusChart& chart = chain.terms().front().family.chart();
  detail::check_pairing_cycle(c, chart, 2 * p - chain.dim() - 1, "chain_pairing");
  return -integrate_cycle(chain_omega(chain, chart, p, opt), c);
}

/// rho_{p,r}(sigma) = (<., sigma>, (-1)^{2p-r-1} TP(sigma)_{p,r}) on a cycle.
inline DifferentialCharacter rho(const SimplexChain& chain, const TorusChart& chart, int p,
                                 const std::vector<CycleSpec>& cycles, const TransgressionOptions& opt = {},
                                 double cycle_tol = kChainMergeTolerance) {
  const int r = chain.dim();
  if (!(p > r && r >= 1)) throw ValidationError("rho: requires p > r >= 1");
  if (!chain.empty() && !(chain.terms().front().family.chart() == chart))
    throw ValidationError("rho: chain lives on a different chart");
  if (!chain.empty() && p > chain.terms().front().family.rank())
    throw ValidationError("rho: p exceeds the bundle rank");
  for (const auto& c : cycles) detail::check_pairing_cycle(c, chart, 2 * p - r - 1, "rho");
  if (!is_cycle(chain, cycle_tol)) throw ValidationError("rho: chain is not a cycle");

  DifferentialCharacter ch;
  ch.degree = 2 * p - r;
  ch.form = ipow_sign(2 * p - r - 1) * chain_tp(chain, chart, p, opt);
  const MixedForm omega = chain_omega(chain, chart, p, opt);
  for (const auto& c : cycles) ch.pairings.push_back(CyclePairing{c, -integrate_cycle(omega, c)});
  return ch;
}

struct ModZPairing {
  CycleSpec cycle;
  ModZValue value;
};

/// rho'_r on a fiberwise-flat cycle with r < p: the form part is checked to
/// vanish and the pairings are reduced mod Z.
inline std::vector<ModZPairing> rho_flat(const SimplexChain& chain, const TorusChart& chart, int p,
                                         const std::vector<CycleSpec>& cycles, const TransgressionOptions& opt = {},
                                         double cycle_tol = kChainMergeTolerance) {
  const double flat = fiberwise_flat_residual(chain);
  if (!(flat <= kFlatnessGate))
    throw ValidationError("rho_flat: chain is not fiberwise flat (residual " + std::to_string(flat) + ")");
  const DifferentialCharacter ch = rho(chain, chart, p, cycles, opt, cycle_tol);
  const double tp = ch.form.max_norm();
  if (!(tp <= kFlatVanishingGate)) throw Error("rho_flat: transgression form does not vanish (" + std::to_string(tp) + ")");
  std::vector<ModZPairing> out;
  for (const auto& pr : ch.pairings) out.push_back(ModZPairing{pr.cycle, mod_reduce(pr.value)});
  return out;
}

/// Residual of <c, boundary(chain)> + integral_c TP_{p,r} + (-1)^r <boundary c, chain>,
/// for a (2p - r)-dimensional c whose boundary is listed as `c_boundary_parts`.
inline double coboundary_residual(const SimplexChain& chain, const TorusChart& chart, int p, const CycleSpec& c,
                                  const std::vector<CycleSpec>& c_boundary_parts,
                                  const TransgressionOptions& opt = {}) {
  const int r = chain.dim();
  if (!(p > r && r >= 1)) throw ValidationError("coboundary_residual: requires p > r >= 1");
  detail::check_pairing_cycle(c, chart, 2 * p - r, "coboundary_residual");
  for (const auto& b : c_boundary_parts) detail::check_pairing_cycle(b, chart, 2 * p - r - 1, "coboundary_residual");
  if (chain.empty()) return 0.0;

  const SimplexChain bd = boundary(chain);
  Complex total = bd.empty() ? Complex{0.0, 0.0} : -integrate_cycle(chain_omega(bd, chart, p, opt), c);
  total += integrate_cycle(chain_tp(chain, chart, p, opt), c);
  if (!c_boundary_parts.empty()) {
    const MixedForm omega = chain_omega(chain, chart, p, opt);
    for (const auto& b : c_boundary_parts) total += ipow_sign(r) * -integrate_cycle(omega, b);
  }
  return std::abs(total);
}

}  // namespace cslab
