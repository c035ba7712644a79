#pragma once

// Operator invariant suite shared by the CLI `verify` command and the tests:
// total weight, partition of unity, row sums, Q-symmetry, semidefiniteness.

#include <random>
#include <string>
#include <vector>

#include "sympres/operators.hpp"

namespace sympres {

struct VerifyItem {
  std::string name;
  double value;  // measured magnitude
  double tol;
  bool pass;
};

struct VerifyReport {
  std::vector<VerifyItem> items;
  bool all_pass() const {
    for (const auto& it : items)
      if (!it.pass) return false;
    return true;
  }
};

inline VerifyReport run_verification(const CurvilinearGrid& grid,
                                     const InterpolationSpline& spline,
                                     uint64_t seed = 12345) {
  VerifyReport rep;
  auto add = [&](const std::string& name, double value, double tol) {
    rep.items.push_back({name, value, tol, value <= tol});
  };

  const auto weights = assemble_weights(grid, spline);
  const auto op = assemble_laplacian(grid, spline, weights);
  const int P = grid.num_points();
  std::mt19937_64 rng(seed);

  add("total_weight_error", std::abs(weights.total() - 1.0), 1e-10);

  {
    GridValues ones(P, 1.0);
    std::uniform_real_distribution<double> u1(0.0, double(grid.n1()));
    std::uniform_real_distribution<double> u2(0.0, double(grid.n2()));
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      Vec2 xi{u1(rng), grid.dimension() == 2 ? u2(rng) : 0.0};
      worst = std::max(worst, std::abs(interpolate(grid, spline, ones, xi) - 1.0));
    }
    add("partition_of_unity", worst, 1e-10);

    const auto a1 = op.apply(ones);
    double rs = 0.0;
    for (double v : a1) rs = std::max(rs, std::abs(v));
    add("row_sum_relative", rs / op.norm(), 1e-10);
  }

  add("qa_asymmetry", check_adjointness(op, 20, rng()), 1e-12);

  {
    std::normal_distribution<double> dist;
    double worst = -1e300;
    GridValues x(P);
    for (int t = 0; t < 50; ++t) {
      for (double& v : x) v = dist(rng);
      double nx = 0.0;
      for (int p = 0; p < P; ++p) nx += x[p] * weights.q[p] * x[p];
      worst = std::max(worst, op.qa_bilinear(x, x) / nx);
    }
    add("max_ritz_value", worst, 1e-12);
  }

  return rep;
}

}  // namespace sympres
