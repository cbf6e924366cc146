// Quadrature on the unit interval and on the standard simplex
//   Delta^r = { (t_1..t_r) : t_i >= 0, sum t_i <= 1 },  t_0 = 1 - sum t_i,
// with Lebesgue measure dt_1...dt_r (volume 1/r!).  Nodes are barycentric.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cslab/core.hpp"

namespace cslab {

enum class SimplexRuleKind { collapsed_gauss, grundmann_moller };

inline std::string to_string(SimplexRuleKind k) {
  return k == SimplexRuleKind::collapsed_gauss ? "collapsed_gauss" : "grundmann_moller";
}

struct QuadratureRule {
  int dim = 0;
  int degree = 0;  // exact for polynomials in t up to this total degree
  std::string name;
  std::vector<std::vector<double>> nodes;  // barycentric (t_0..t_r)
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre nodes / weights on [0,1].
struct LineRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline LineRule gauss_legendre(int count) {
  if (count < 1) throw Error("gauss_legendre: need at least one node");
  LineRule rule;
  rule.nodes.resize(static_cast<std::size_t>(count));
  rule.weights.resize(static_cast<std::size_t>(count));
  const int n = count;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1,1] -> [0,1]; store ascending
    rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
    rule.weights[static_cast<std::size_t>(i)] = 0.5 * w;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + x);
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
  }
  return rule;
}

/// Duffy collapse of the cube onto the simplex with a Gauss-Legendre tensor
/// rule; all weights positive.
inline QuadratureRule collapsed_gauss_rule(int r, int degree) {
  QuadratureRule rule;
  rule.dim = r;
  rule.degree = degree;
  rule.name = "collapsed_gauss";
  if (r == 0) {
    rule.nodes = {{1.0}};
    rule.weights = {1.0};
    return rule;
  }
  const int q = std::max(1, (degree + r + 1) / 2);
  const LineRule line = gauss_legendre(q);
  std::vector<int> idx(static_cast<std::size_t>(r), 0);
  while (true) {
    std::vector<double> t(static_cast<std::size_t>(r) + 1, 0.0);
    double remaining = 1.0;
    double w = 1.0;
    for (int k = 0; k < r; ++k) {
      const double u = line.nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
      w *= line.weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] *
           std::pow(1.0 - u, static_cast<double>(r - 1 - k));
      t[static_cast<std::size_t>(k) + 1] = remaining * u;
      remaining *= (1.0 - u);
    }
    t[0] = remaining;
    rule.nodes.push_back(std::move(t));
    rule.weights.push_back(w);
    int k = r - 1;
    while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == q) idx[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) break;
  }
  return rule;
}

namespace detail {
inline void compositions(int total, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = total; v >= 0; --v) {
    cur.push_back(v);
    compositions(total - v, parts - 1, cur, out);
    cur.pop_back();
  }
}
inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}
}  // namespace detail

/// Grundmann-Moller rule of odd degree 2s+1 >= `degree` (weights of mixed sign).
inline QuadratureRule grundmann_moller_rule(int r, int degree) {
  QuadratureRule rule;
  rule.dim = r;
  rule.name = "grundmann_moller";
  if (r == 0) {
    rule.degree = degree;
    rule.nodes = {{1.0}};
    rule.weights = {1.0};
    return rule;
  }
  const int s = std::max(0, degree / 2);
  const int d = 2 * s + 1;
  rule.degree = d;
  for (int i = 0; i <= s; ++i) {
    const double denom = d + r - 2 * i;
    const double w = ipow_sign(i) * std::pow(2.0, -2.0 * s) * std::pow(denom, d) /
                     (detail::factorial(i) * detail::factorial(d + r - i));
    std::vector<std::vector<int>> betas;
    std::vector<int> cur;
    detail::compositions(s - i, r + 1, cur, betas);
    for (const auto& beta : betas) {
      std::vector<double> t(static_cast<std::size_t>(r) + 1);
      for (int j = 0; j <= r; ++j) t[static_cast<std::size_t>(j)] = (2.0 * beta[static_cast<std::size_t>(j)] + 1.0) / denom;
      rule.nodes.push_back(std::move(t));
      rule.weights.push_back(w);
    }
  }
  return rule;
}

inline QuadratureRule simplex_rule(int r, int degree, SimplexRuleKind kind = SimplexRuleKind::collapsed_gauss) {
  if (r < 0) throw Error("simplex_rule: negative dimension");
  if (degree < 0) throw Error("simplex_rule: negative degree");
  return kind == SimplexRuleKind::collapsed_gauss ? collapsed_gauss_rule(r, degree)
                                                  : grundmann_moller_rule(r, degree);
}

}  // namespace cslab
