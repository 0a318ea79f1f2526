#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "chebnet/error.hpp"

namespace chebnet {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// (L_n(x), L_n'(x)) via the three-term recurrence; valid for |x| < 1.
inline std::pair<double, double> legendre_with_derivative(std::size_t n, double x) {
  double prev = 1.0, cur = x;
  if (n == 0) return {1.0, 0.0};
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double next = ((2.0 * kk - 1.0) * x * cur - (kk - 1.0) * prev) / kk;
    prev = cur;
    cur = next;
  }
  const double deriv = static_cast<double>(n) * (x * cur - prev) / (x * x - 1.0);
  return {cur, deriv};
}

}  // namespace detail

/// Gauss-Legendre rule on [-1,1] with `n` nodes (Newton iteration on L_n).
inline QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw InvalidInput("gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = detail::legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = detail::legendre_with_derivative(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = x;
    rule.nodes[n - 1 - i] = -x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace chebnet
