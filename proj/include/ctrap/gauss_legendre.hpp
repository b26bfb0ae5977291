#pragma once

#include "ctrap/precision.hpp"

#include <stdexcept>
#include <vector>

namespace ctrap {

/// Gauss–Legendre nodes and weights on [-1, 1].
template <class Scalar>
struct GaussLegendreRule {
  std::vector<Scalar> nodes;
  std::vector<Scalar> weights;
};

/// Newton iteration on P_n starting from the Chebyshev-like initial guess.
template <class Scalar>
GaussLegendreRule<Scalar> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussLegendreRule<Scalar> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const Scalar pi = num::pi<Scalar>();
  const Scalar eps = Scalar(4) * num::epsilon<Scalar>();
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar x = num::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
      const Scalar dx = p1 / dp;
      x -= dx;
      if (num::abs(dx) <= eps) break;
    }
    // Recompute derivative at the converged node.
    Scalar p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? Scalar(1) : n * (x * p1 - p0) / (x * x - 1);
    const Scalar w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Composite Gauss–Legendre integral of f over [a, b] split into `panels` equal panels.
template <class Scalar, class F>
Scalar composite_gauss_legendre(F&& f, Scalar a, Scalar b, int panels,
                                const GaussLegendreRule<Scalar>& rule) {
  Scalar total = 0;
  const Scalar width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const Scalar lo = a + width * p;
    const Scalar mid = lo + width / 2;
    Scalar panel = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      panel += rule.weights[i] * f(mid + width / 2 * rule.nodes[i]);
    }
    total += panel * width / 2;
  }
  return total;
}

}  // namespace ctrap
