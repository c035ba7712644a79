#pragma once

// Mutually-adjoint interpolation/sampling pair on a periodic grid, the
// diagonal integration weights Q_i = int w_i dV, and the discrete Laplacian
// assembled in weak form: A_ij = -(1/Q_i) int grad(w_i).grad(w_j) dV.
// Storing the symmetric L_ij = int grad(w_i).grad(w_j) makes Q A = -L
// exactly symmetric and negative semidefinite under any quadrature.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "sympres/errors.hpp"
#include "sympres/grid.hpp"
#include "sympres/spline.hpp"

namespace sympres {

using GridValues = std::vector<double>;
using Field = std::function<double(Vec2)>;  // physical-point callable

struct IntegrationWeights {
  std::vector<double> q;

  double total() const {
    double s = 0.0;
    for (double v : q) s += v;
    return s;
  }
};

namespace detail {

// 1D tables of w0 and w0' at each quadrature node, for the 2*n_span basis
// functions overlapping a unit cell. In cell c with node offset g, basis
// a = c - n + 1 + off sees argument g + n - 1 - off, independent of c.
struct BasisTables {
  int n_span;
  int per_cell;                 // 2*n_span
  std::vector<double> value;    // [node * per_cell + off]
  std::vector<double> grad;

  BasisTables(const InterpolationSpline& spline, const QuadratureRule& rule) {
    n_span = spline.params().n_span;
    per_cell = 2 * n_span;
    value.resize(rule.size() * per_cell);
    grad.resize(rule.size() * per_cell);
    for (int a = 0; a < rule.size(); ++a)
      for (int off = 0; off < per_cell; ++off) {
        const double x = rule.nodes[a] + n_span - 1 - off;
        value[a * per_cell + off] = spline.evaluate(x, 0);
        grad[a * per_cell + off] = spline.evaluate(x, 1);
      }
  }
};

}  // namespace detail

inline IntegrationWeights assemble_weights(const CurvilinearGrid& grid,
                                           const InterpolationSpline& spline) {
  const int n = spline.params().n_span;
  const int per = 2 * n;
  detail::BasisTables tab(spline, grid.rule());
  IntegrationWeights w;
  w.q.assign(grid.num_points(), 0.0);

  if (grid.dimension() == 1) {
    const int nq = grid.rule().size();
    for (int c = 0; c < grid.n1(); ++c) {
      auto qps = grid.cell_quadrature(c);
      for (int a = 0; a < nq; ++a)
        for (int off = 0; off < per; ++off) {
          const int i = CurvilinearGrid::wrap(c - n + 1 + off, grid.n1());
          w.q[i] += tab.value[a * per + off] * qps[a].weight;
        }
    }
  } else {
    const int nq = grid.rule().size();
    grid.for_each_cell([&](int c1, int c2) {
      auto qps = grid.cell_quadrature(c1, c2);
      for (int b = 0; b < nq; ++b)
        for (int a = 0; a < nq; ++a) {
          const double qw = qps[b * nq + a].weight;
          for (int o2 = 0; o2 < per; ++o2) {
            const double wy = tab.value[b * per + o2];
            if (wy == 0.0) continue;
            for (int o1 = 0; o1 < per; ++o1) {
              const int p = grid.index(c1 - n + 1 + o1, c2 - n + 1 + o2);
              w.q[p] += tab.value[a * per + o1] * wy * qw;
            }
          }
        }
    });
  }
  for (size_t i = 0; i < w.q.size(); ++i)
    if (w.q[i] <= 0.0)
      throw NonPositiveWeight("Q_" + std::to_string(i) + " = " +
                              std::to_string(w.q[i]));
  return w;
}

// (J g)(xi): interpolation at an array-space point.
inline double interpolate(const CurvilinearGrid& grid,
                          const InterpolationSpline& spline,
                          std::span<const double> g, Vec2 xi) {
  const int n = spline.params().n_span;
  const int k1 = static_cast<int>(std::floor(xi[0]));
  double acc = 0.0;
  if (grid.dimension() == 1) {
    for (int i = k1 - n + 1; i <= k1 + n; ++i)
      acc += g[CurvilinearGrid::wrap(i, grid.n1())] * spline.evaluate(xi[0] - i);
    return acc;
  }
  const int k2 = static_cast<int>(std::floor(xi[1]));
  for (int j = k2 - n + 1; j <= k2 + n; ++j) {
    const double wy = spline.evaluate(xi[1] - j);
    if (wy == 0.0) continue;
    double rowacc = 0.0;
    for (int i = k1 - n + 1; i <= k1 + n; ++i)
      rowacc += g[grid.index(i, j)] * spline.evaluate(xi[0] - i);
    acc += rowacc * wy;
  }
  return acc;
}

// (S f)_i = (1/Q_i) int f w_i dV: adjoint sampling by cell quadrature.
// Distinct from point_sample below; S is the adjoint of the interpolation.
inline GridValues adjoint_sample(const CurvilinearGrid& grid,
                         const InterpolationSpline& spline,
                                 const IntegrationWeights& weights,
                                 const Field& f) {
  const int n = spline.params().n_span;
  const int per = 2 * n;
  detail::BasisTables tab(spline, grid.rule());
  GridValues out(grid.num_points(), 0.0);
  const int nq = grid.rule().size();

  if (grid.dimension() == 1) {
    for (int c = 0; c < grid.n1(); ++c) {
      auto qps = grid.cell_quadrature(c);
      for (int a = 0; a < nq; ++a) {
        const double fv = f(grid.physical_point(qps[a].xi)) * qps[a].weight;
        for (int off = 0; off < per; ++off)
          out[CurvilinearGrid::wrap(c - n + 1 + off, grid.n1())] +=
              tab.value[a * per + off] * fv;
      }
    }
  } else {
    grid.for_each_cell([&](int c1, int c2) {
      auto qps = grid.cell_quadrature(c1, c2);
      for (int b = 0; b < nq; ++b)
        for (int a = 0; a < nq; ++a) {
          const QuadPoint& qp = qps[b * nq + a];
          const double fv = f(grid.physical_point(qp.xi)) * qp.weight;
          for (int o2 = 0; o2 < per; ++o2) {
            const double wy = tab.value[b * per + o2] * fv;
            if (wy == 0.0) continue;
            for (int o1 = 0; o1 < per; ++o1)
              out[grid.index(c1 - n + 1 + o1, c2 - n + 1 + o2)] +=
                  tab.value[a * per + o1] * wy;
          }
        }
    });
  }
  for (int p = 0; p < grid.num_points(); ++p) out[p] /= weights.q[p];
  return out;
}

// Point evaluation at the grid nodes.
inline GridValues point_sample(const CurvilinearGrid& grid, const Field& f) {
  GridValues out(grid.num_points());
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i)
      out[grid.index(i, j)] = f(grid.physical_point({double(i), double(j)}));
  return out;
}

class DiscreteOperator {
 public:
  // A = -diag(Q)^{-1} L with L_ij = int grad(w_i).grad(w_j) dV.
  DiscreteOperator(int dim, int n1, int n2, int n_span,
                   std::vector<double> l_data, IntegrationWeights weights)
      : dim_(dim),
        n1_(n1),
        n2_(n2),
        n_span_(n_span),
        stencil_(4 * n_span - 1),
        l_(std::move(l_data)),
        weights_(std::move(weights)) {
    build_columns();
  }

  int dimension() const { return dim_; }
  int num_points() const { return n1_ * (dim_ == 2 ? n2_ : 1); }
  int stencil_width() const { return stencil_; }
  int stencil_size() const { return dim_ == 2 ? stencil_ * stencil_ : stencil_; }
  const IntegrationWeights& weights() const { return weights_; }

  // y = A x
  void apply(std::span<const double> x, std::span<double> y) const {
    const int P = num_points();
    const int S = stencil_size();
    for (int p = 0; p < P; ++p) {
      double acc = 0.0;
      const double* lrow = l_.data() + size_t(p) * S;
      const int32_t* crow = cols_.data() + size_t(p) * S;
      for (int s = 0; s < S; ++s) acc += lrow[s] * x[crow[s]];
      y[p] = -acc / weights_.q[p];
    }
  }

  GridValues apply(std::span<const double> x) const {
    GridValues y(num_points());
    apply(x, y);
    return y;
  }

  // x^T (QA) y = -x^T L y, evaluated through the stored symmetric L.
  double qa_bilinear(std::span<const double> x, std::span<const double> y) const {
    const int P = num_points();
    const int S = stencil_size();
    double acc = 0.0;
    for (int p = 0; p < P; ++p) {
      const double* lrow = l_.data() + size_t(p) * S;
      const int32_t* crow = cols_.data() + size_t(p) * S;
      double row = 0.0;
      for (int s = 0; s < S; ++s) row += lrow[s] * y[crow[s]];
      acc += x[p] * row;
    }
    return -acc;
  }

  // A_ij; stencil offsets wrapping onto the same column are summed.
  double entry(int i, int j) const {
    const int S = stencil_size();
    const double* lrow = l_.data() + size_t(i) * S;
    const int32_t* crow = cols_.data() + size_t(i) * S;
    double acc = 0.0;
    for (int s = 0; s < S; ++s)
      if (crow[s] == j) acc += lrow[s];
    return -acc / weights_.q[i];
  }

  double l_entry(int i, int j) const {
    const int S = stencil_size();
    const double* lrow = l_.data() + size_t(i) * S;
    const int32_t* crow = cols_.data() + size_t(i) * S;
    double acc = 0.0;
    for (int s = 0; s < S; ++s)
      if (crow[s] == j) acc += lrow[s];
    return acc;
  }

  std::vector<int> row_columns(int i) const {
    const int S = stencil_size();
    const int32_t* crow = cols_.data() + size_t(i) * S;
    std::vector<int> out(crow, crow + S);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // inf-norm of A.
  double norm() const {
    const int P = num_points();
    const int S = stencil_size();
    double best = 0.0;
    for (int p = 0; p < P; ++p) {
      double acc = 0.0;
      for (int s = 0; s < S; ++s) acc += std::abs(l_[size_t(p) * S + s]);
      best = std::max(best, acc / weights_.q[p]);
    }
    return best;
  }

  // Spectral radius estimate by power iteration on A.
  double spectral_radius(int iters = 100, uint64_t seed = 12345) const {
    const int P = num_points();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    GridValues v(P), av(P);
    for (double& x : v) x = dist(rng);
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
      apply(v, av);
      double nrm = 0.0;
      for (double x : av) nrm += x * x;
      nrm = std::sqrt(nrm);
      if (nrm == 0.0) return 0.0;
      lambda = nrm;
      for (int p = 0; p < P; ++p) v[p] = av[p] / nrm;
    }
    return lambda;
  }

  // Test hook: additively perturb one stored stencil entry.
  void perturb_l(int p, int s, double delta) { l_[size_t(p) * stencil_size() + s] += delta; }

  // Coordinate-list export `i j value` plus sidecar of Q values.
  void export_matrix(std::ostream& os, std::ostream& q_os) const {
    char buf[128];
    const int P = num_points();
    for (int i = 0; i < P; ++i)
      for (int j : row_columns(i)) {
        std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i, j, entry(i, j));
        os << buf;
      }
    for (int i = 0; i < P; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", weights_.q[i]);
      q_os << buf;
    }
  }

 private:
  void build_columns() {
    const int P = num_points();
    const int S = stencil_size();
    cols_.resize(size_t(P) * S);
    const int half = stencil_ / 2;
    if (dim_ == 1) {
      for (int p = 0; p < P; ++p)
        for (int s = 0; s < S; ++s)
          cols_[size_t(p) * S + s] = CurvilinearGrid::wrap(p + s - half, n1_);
    } else {
      for (int j = 0; j < n2_; ++j)
        for (int i = 0; i < n1_; ++i) {
          const int p = j * n1_ + i;
          for (int d2 = 0; d2 < stencil_; ++d2)
            for (int d1 = 0; d1 < stencil_; ++d1) {
              const int col = CurvilinearGrid::wrap(j + d2 - half, n2_) * n1_ +
                              CurvilinearGrid::wrap(i + d1 - half, n1_);
              cols_[size_t(p) * S + d2 * stencil_ + d1] = int32_t(col);
            }
        }
    }
  }

  int dim_, n1_, n2_, n_span_, stencil_;
  std::vector<double> l_;
  std::vector<int32_t> cols_;
  IntegrationWeights weights_;
};

// Weak-form assembly, cell by cell; each symmetric pair is accumulated once
// and mirrored so Q A is symmetric to the last bit.
inline DiscreteOperator assemble_laplacian(const CurvilinearGrid& grid,
                                           const InterpolationSpline& spline,
                                           const IntegrationWeights& weights) {
  const int n = spline.params().n_span;
  const int per = 2 * n;
  const int stencil = 4 * n - 1;
  const int half = stencil / 2;
  detail::BasisTables tab(spline, grid.rule());
  const int nq = grid.rule().size();
  const int P = grid.num_points();

  if (grid.dimension() == 1) {
    std::vector<double> l(size_t(P) * stencil, 0.0);
    for (int c = 0; c < grid.n1(); ++c) {
      auto qps = grid.cell_quadrature(c);
      for (int a = 0; a < nq; ++a) {
        const double j11 = grid.jacobian(qps[a].xi)[0][0];
        const double scale = qps[a].weight / (j11 * j11);
        for (int oa = 0; oa < per; ++oa) {
          const double ga = tab.grad[a * per + oa];
          const int pa = CurvilinearGrid::wrap(c - n + 1 + oa, grid.n1());
          for (int ob = oa; ob < per; ++ob) {
            const double v = ga * tab.grad[a * per + ob] * scale;
            const int pb = CurvilinearGrid::wrap(c - n + 1 + ob, grid.n1());
            l[size_t(pa) * stencil + (ob - oa) + half] += v;
            if (ob != oa) l[size_t(pb) * stencil + (oa - ob) + half] += v;
          }
        }
      }
    }
    return DiscreteOperator(1, grid.n1(), 1, n, std::move(l), weights);
  }

  std::vector<double> l(size_t(P) * stencil * stencil, 0.0);
  const int per2 = per * per;
  std::vector<double> gx(per2), gy(per2);
  grid.for_each_cell([&](int c1, int c2) {
    auto qps = grid.cell_quadrature(c1, c2);
    for (int b = 0; b < nq; ++b)
      for (int a = 0; a < nq; ++a) {
        const QuadPoint& qp = qps[b * nq + a];
        const Mat2 J = grid.jacobian(qp.xi);
        const double dj = det(J);
        // rows of J^{-T}: physical gradient = J^{-T} * (d/dxi, d/deta)
        const double it00 = J[1][1] / dj, it01 = -J[1][0] / dj;
        const double it10 = -J[0][1] / dj, it11 = J[0][0] / dj;
        for (int o2 = 0; o2 < per; ++o2)
          for (int o1 = 0; o1 < per; ++o1) {
            const double dxi = tab.grad[a * per + o1] * tab.value[b * per + o2];
            const double det_ = tab.value[a * per + o1] * tab.grad[b * per + o2];
            gx[o2 * per + o1] = it00 * dxi + it01 * det_;
            gy[o2 * per + o1] = it10 * dxi + it11 * det_;
          }
        for (int sa = 0; sa < per2; ++sa) {
          const int a1 = sa % per, a2 = sa / per;
          const int pa = grid.index(c1 - n + 1 + a1, c2 - n + 1 + a2);
          for (int sb = sa; sb < per2; ++sb) {
            const double v = (gx[sa] * gx[sb] + gy[sa] * gy[sb]) * qp.weight;
            const int b1 = sb % per, b2 = sb / per;
            const int pb = grid.index(c1 - n + 1 + b1, c2 - n + 1 + b2);
            const int d1 = b1 - a1, d2 = b2 - a2;
            l[size_t(pa) * stencil * stencil + (d2 + half) * stencil + (d1 + half)] += v;
            if (sb != sa)
              l[size_t(pb) * stencil * stencil + (-d2 + half) * stencil + (-d1 + half)] += v;
          }
        }
      }
  });
  return DiscreteOperator(2, grid.n1(), grid.n2(), n, std::move(l), weights);
}

// max over random x, y of |<x,Ay>_Q - <Ax,y>_Q| / (|x|_Q |y|_Q |A|).
inline double check_adjointness(const DiscreteOperator& op, int trials = 20,
                                uint64_t seed = 777) {
  const int P = op.num_points();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  const auto& q = op.weights().q;
  const double anorm = op.norm();
  GridValues x(P), y(P), ax(P), ay(P);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    for (double& v : x) v = dist(rng);
    for (double& v : y) v = dist(rng);
    op.apply(x, ax);
    op.apply(y, ay);
    double xay = 0.0, axy = 0.0, nx = 0.0, ny = 0.0;
    for (int p = 0; p < P; ++p) {
      xay += x[p] * q[p] * ay[p];
      axy += ax[p] * q[p] * y[p];
      nx += x[p] * q[p] * x[p];
      ny += y[p] * q[p] * y[p];
    }
    const double denom = std::sqrt(nx) * std::sqrt(ny) * anorm;
    if (denom > 0.0) worst = std::max(worst, std::abs(xay - axy) / denom);
  }
  return worst;
}

}  // namespace sympres
