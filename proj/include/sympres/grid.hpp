#pragma once

// Periodic structured curvilinear grids: a smooth array-space -> physical
// mapping x(xi), its analytic Jacobian, and per-unit-cell Gauss-Legendre
// quadrature in array space with physical weights det(J) * gauss weight.

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "sympres/errors.hpp"
#include "sympres/gauss.hpp"

namespace sympres {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

inline double det(const Mat2& j) { return j[0][0] * j[1][1] - j[0][1] * j[1][0]; }

class Mapping {
 public:
  enum class Kind { Uniform, Sinusoidal, Custom };

  static Mapping uniform_1d(int n1) { return Mapping(Kind::Uniform, 1, n1, 1, 0.0); }
  static Mapping uniform_2d(int n1, int n2) {
    return Mapping(Kind::Uniform, 2, n1, n2, 0.0);
  }
  static Mapping sinusoidal_1d(int n1, double amplitude) {
    return Mapping(Kind::Sinusoidal, 1, n1, 1, amplitude);
  }
  // x = xi/N + a sin(2 pi xi/N) sin(2 pi eta/N), same perturbation in y;
  // periodic, unit-square image, det J = (1 + 2 pi a sin(2 pi (xi+eta)/N))/N^2.
  static Mapping sinusoidal_2d(int n1, int n2, double amplitude) {
    return Mapping(Kind::Sinusoidal, 2, n1, n2, amplitude);
  }
  static Mapping custom(int dimension, int n1, int n2,
                        std::function<Vec2(Vec2)> value,
                        std::function<Mat2(Vec2)> jacobian) {
    Mapping m(Kind::Custom, dimension, n1, n2, 0.0);
    m.value_ = std::move(value);
    m.jac_ = std::move(jacobian);
    return m;
  }

  Kind kind() const { return kind_; }
  int dimension() const { return dim_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  double amplitude() const { return amp_; }

  Vec2 operator()(Vec2 xi) const {
    switch (kind_) {
      case Kind::Uniform:
        return {xi[0] / n1_, dim_ == 2 ? xi[1] / n2_ : 0.0};
      case Kind::Sinusoidal: {
        if (dim_ == 1) {
          return {xi[0] / n1_ + amp_ * std::sin(2.0 * M_PI * xi[0] / n1_), 0.0};
        }
        const double s = amp_ * std::sin(2.0 * M_PI * xi[0] / n1_) *
                         std::sin(2.0 * M_PI * xi[1] / n2_);
        return {xi[0] / n1_ + s, xi[1] / n2_ + s};
      }
      case Kind::Custom:
        return value_(xi);
    }
    return {0.0, 0.0};
  }

  Mat2 jacobian(Vec2 xi) const {
    switch (kind_) {
      case Kind::Uniform:
        return {{{1.0 / n1_, 0.0}, {0.0, dim_ == 2 ? 1.0 / n2_ : 0.0}}};
      case Kind::Sinusoidal: {
        if (dim_ == 1) {
          const double d = (1.0 + 2.0 * M_PI * amp_ * std::cos(2.0 * M_PI * xi[0] / n1_)) / n1_;
          return {{{d, 0.0}, {0.0, 0.0}}};
        }
        const double cx = std::cos(2.0 * M_PI * xi[0] / n1_);
        const double sx = std::sin(2.0 * M_PI * xi[0] / n1_);
        const double cy = std::cos(2.0 * M_PI * xi[1] / n2_);
        const double sy = std::sin(2.0 * M_PI * xi[1] / n2_);
        const double du = 2.0 * M_PI * amp_ / n1_ * cx * sy;
        const double dv = 2.0 * M_PI * amp_ / n2_ * sx * cy;
        return {{{1.0 / n1_ + du, dv}, {du, 1.0 / n2_ + dv}}};
      }
      case Kind::Custom:
        return jac_(xi);
    }
    return {};
  }

 private:
  Mapping(Kind kind, int dim, int n1, int n2, double amp)
      : kind_(kind), dim_(dim), n1_(n1), n2_(n2), amp_(amp) {
    if (n1 < 1 || (dim == 2 && n2 < 1)) throw ConfigError("grid sizes must be positive");
  }

  Kind kind_;
  int dim_;
  int n1_, n2_;
  double amp_;
  std::function<Vec2(Vec2)> value_;
  std::function<Mat2(Vec2)> jac_;
};

struct QuadPoint {
  Vec2 xi;        // array-space location
  double weight;  // gauss weight x det J (physical measure)
};

class CurvilinearGrid {
 public:
  CurvilinearGrid(Mapping mapping, int quad_points_per_direction = 10)
      : mapping_(std::move(mapping)), rule_(quad_points_per_direction) {
    // Non-degeneracy check at every quadrature point of every cell.
    for_each_cell([&](int c1, int c2) {
      for (const QuadPoint& qp : cell_quadrature(c1, c2)) {
        (void)qp;
      }
    });
  }

  const Mapping& mapping() const { return mapping_; }
  const QuadratureRule& rule() const { return rule_; }
  int dimension() const { return mapping_.dimension(); }
  int n1() const { return mapping_.n1(); }
  int n2() const { return dimension() == 2 ? mapping_.n2() : 1; }
  int num_points() const { return n1() * n2(); }
  int num_cells() const { return num_points(); }

  int index(int i, int j) const { return wrap(j, n2()) * n1() + wrap(i, n1()); }
  static int wrap(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
  }

  Vec2 physical_point(Vec2 xi) const { return mapping_(xi); }

  Mat2 jacobian(Vec2 xi) const {
    Mat2 j = mapping_.jacobian(xi);
    const double d = dimension() == 2 ? det(j) : j[0][0];
    if (d <= 0.0)
      throw DegenerateMapping("det J <= 0 at (" + std::to_string(xi[0]) + ", " +
                              std::to_string(xi[1]) + ")");
    return j;
  }

  double jacobian_det(Vec2 xi) const {
    Mat2 j = jacobian(xi);
    return dimension() == 2 ? det(j) : j[0][0];
  }

  // Tensor Gauss-Legendre nodes in cell [c1,c1+1) x [c2,c2+1).
  std::vector<QuadPoint> cell_quadrature(int c1, int c2 = 0) const {
    std::vector<QuadPoint> out;
    if (dimension() == 1) {
      out.reserve(rule_.size());
      for (int a = 0; a < rule_.size(); ++a) {
        Vec2 xi{c1 + rule_.nodes[a], 0.0};
        out.push_back({xi, rule_.weights[a] * jacobian_det(xi)});
      }
      return out;
    }
    out.reserve(rule_.size() * rule_.size());
    for (int b = 0; b < rule_.size(); ++b) {
      for (int a = 0; a < rule_.size(); ++a) {
        Vec2 xi{c1 + rule_.nodes[a], c2 + rule_.nodes[b]};
        out.push_back({xi, rule_.weights[a] * rule_.weights[b] * jacobian_det(xi)});
      }
    }
    return out;
  }

  template <class F>
  void for_each_cell(F&& f) const {
    for (int c2 = 0; c2 < n2(); ++c2)
      for (int c1 = 0; c1 < n1(); ++c1) f(c1, c2);
  }

  // CSV dump `i,j,x,y` of the grid points.
  void dump_points(std::ostream& os) const {
    os << "i,j,x,y\n";
    char buf[128];
    for (int j = 0; j < n2(); ++j)
      for (int i = 0; i < n1(); ++i) {
        Vec2 x = physical_point({double(i), double(j)});
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", i, j, x[0], x[1]);
        os << buf;
      }
  }

 private:
  Mapping mapping_;
  QuadratureRule rule_;
};

}  // namespace sympres
