#pragma once

// Gauss-Legendre quadrature on [0,1].

#include <cmath>
#include <cstddef>
#include <vector>

namespace sympres {

struct QuadratureRule {
  std::vector<double> nodes;    // in (0,1)
  std::vector<double> weights;  // positive, sum to 1

  explicit QuadratureRule(int points_per_direction = 10) {
    const int n = points_per_direction;
    nodes.resize(n);
    weights.resize(n);
    // Newton iteration on P_n over [-1,1], then map to [0,1].
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / pp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double w = 2.0 / ((1.0 - x * x) * pp * pp);
      nodes[i] = 0.5 * (1.0 - x);
      nodes[n - 1 - i] = 0.5 * (1.0 + x);
      weights[i] = 0.5 * w;
      weights[n - 1 - i] = 0.5 * w;
    }
  }

  int size() const { return static_cast<int>(nodes.size()); }
};

}  // namespace sympres
