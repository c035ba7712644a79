#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "sympres/operators.hpp"

using namespace sympres;

namespace {

const InterpolationSpline& medium() {
  static InterpolationSpline s = build_spline(SplineParams::preset("medium"), LsqConfig{});
  return s;
}

const InterpolationSpline& coarse() {
  static InterpolationSpline s = build_spline(SplineParams::preset("coarse"), LsqConfig{});
  return s;
}

// Periodic w_i and its derivative on a 1D grid of size N (array space).
double periodic_w(const InterpolationSpline& s, int i, double xi, int N, int deriv = 0) {
  double acc = 0.0;
  for (int k = -1; k <= 1; ++k) acc += s.evaluate(xi - i - k * N, deriv);
  return acc;
}

}  // namespace

TEST_CASE("uniform weights are exactly the cell volume") {
  CurvilinearGrid grid(Mapping::uniform_2d(12, 12));
  auto w = assemble_weights(grid, medium());
  for (double q : w.q) CHECK(q == Catch::Approx(1.0 / 144).margin(1e-12));
}

TEST_CASE("sinusoidal weights sum to the domain measure") {
  CurvilinearGrid grid(Mapping::sinusoidal_2d(20, 20, 0.05));
  auto w = assemble_weights(grid, medium());
  CHECK(w.total() == Catch::Approx(1.0).margin(1e-10));
  for (double q : w.q) CHECK(q > 0.0);
}

TEST_CASE("1D uniform weights match a dense trapezoid integral of w0") {
  CurvilinearGrid grid(Mapping::uniform_1d(10));
  auto w = assemble_weights(grid, coarse());
  // int w0 dx over the support, trapezoid with 1e6 points, scaled by h = 1/10
  const int n = coarse().params().n_span;
  const int pts = 1000000;
  double integral = 0.0;
  for (int k = 0; k <= pts; ++k) {
    const double x = -n + 2.0 * n * k / pts;
    const double f = coarse().evaluate(x);
    integral += (k == 0 || k == pts) ? 0.5 * f : f;
  }
  integral *= 2.0 * n / double(pts) / 10.0;
  for (double q : w.q) CHECK(q == Catch::Approx(integral).margin(1e-10));
  CHECK(integral == Catch::Approx(0.1).margin(1e-9));
}

TEST_CASE("interpolation reproduces constants") {
  CurvilinearGrid grid(Mapping::sinusoidal_2d(10, 10, 0.05));
  GridValues ones(grid.num_points(), 1.0);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int t = 0; t < 100; ++t) {
    const double v = interpolate(grid, medium(), ones, {u(rng), u(rng)});
    CHECK(std::abs(v - 1.0) <= 1e-12);
  }
}

TEST_CASE("interpolation reproduces low-degree polynomials in array space") {
  CurvilinearGrid grid(Mapping::uniform_1d(40));
  auto poly = [](double xi) { return 1.5 - 0.25 * xi + 0.03125 * xi * xi; };
  GridValues g(40);
  for (int i = 0; i < 40; ++i) g[i] = poly(double(i));
  // interior points, far from the periodic seam where the polynomial jumps
  for (double xi : {17.3, 20.0, 20.55, 23.9}) {
    const double v = interpolate(grid, medium(), g, {xi, 0.0});
    CHECK(v == Catch::Approx(poly(xi)).margin(1e-10));
  }
}

TEST_CASE("interpolating a sampled Fourier mode stays within the dispersion bound") {
  const double omega = 0.2 * M_PI;
  CurvilinearGrid grid(Mapping::uniform_1d(40));
  GridValues re(40), im(40);
  for (int i = 0; i < 40; ++i) {
    re[i] = std::cos(omega * i);
    im[i] = std::sin(omega * i);
  }
  const double bound = medium().dispersion_error(omega) + 1e-12;
  // omega*40 is not a multiple of 2*pi, so the sampled mode has a seam
  // mismatch; stay away from the wrap region.
  for (double xi : {10.1, 15.7, 20.0, 25.42}) {
    const double vr = interpolate(grid, medium(), re, {xi, 0.0});
    const double vi = interpolate(grid, medium(), im, {xi, 0.0});
    const double err = std::hypot(vr - std::cos(omega * xi), vi - std::sin(omega * xi));
    CHECK(err <= bound);
  }
}

TEST_CASE("adjoint sampling of a constant field is exact") {
  CurvilinearGrid grid(Mapping::sinusoidal_2d(10, 10, 0.05));
  auto w = assemble_weights(grid, medium());
  auto s = adjoint_sample(grid, medium(), w, [](Vec2) { return 3.7; });
  for (double v : s) CHECK(v == Catch::Approx(3.7).margin(1e-10));
}

TEST_CASE("sampling and interpolation are mutually adjoint (dense oracle)") {
  // 20-point cell quadrature: the default 10-point rule leaves ~1e-7
  // integration error on trig-times-degree-11 integrands, which would mask
  // the adjointness identity itself.
  CurvilinearGrid grid(Mapping::sinusoidal_2d(10, 10, 0.05), 20);
  auto w = assemble_weights(grid, medium());
  std::mt19937_64 rng(31);
  std::normal_distribution<double> dist;
  std::uniform_real_distribution<double> phase(0.0, 2 * M_PI);
  for (int trial = 0; trial < 5; ++trial) {
    // random low-order trigonometric polynomial (periodic on the unit square)
    const double a0 = dist(rng), a1 = dist(rng), a2 = dist(rng);
    const double p1 = phase(rng), p2 = phase(rng);
    auto f = [=](Vec2 x) {
      return a0 + a1 * std::sin(2 * M_PI * x[0] + p1) +
             a2 * std::cos(2 * M_PI * (x[0] + x[1]) + p2);
    };
    GridValues g(grid.num_points());
    for (double& v : g) v = dist(rng);

    auto sf = adjoint_sample(grid, medium(), w, f);
    double lhs = 0.0;  // <S f, g>_Q
    for (int p = 0; p < grid.num_points(); ++p) lhs += sf[p] * w.q[p] * g[p];

    // independent dense quadrature of int f (J g) dV: composite Simpson per
    // cell (the integrand is smooth away from the integer grid lines)
    const int sub = 64;
    auto sw = [sub](int k) {
      if (k == 0 || k == sub) return 1.0 / (3.0 * sub);
      return (k % 2 ? 4.0 : 2.0) / (3.0 * sub);
    };
    double rhs = 0.0;
    grid.for_each_cell([&](int c1, int c2) {
      for (int b = 0; b <= sub; ++b)
        for (int a = 0; a <= sub; ++a) {
          Vec2 xi{c1 + double(a) / sub, c2 + double(b) / sub};
          const double dv = det(grid.mapping().jacobian(xi)) * sw(a) * sw(b);
          rhs += f(grid.physical_point(xi)) * interpolate(grid, medium(), g, xi) * dv;
        }
    });
    CHECK(std::abs(lhs - rhs) <= 1e-8);
  }
}

TEST_CASE("1D adjoint sampling against a dense trapezoid oracle") {
  CurvilinearGrid grid(Mapping::uniform_1d(16));
  auto w = assemble_weights(grid, medium());
  // f(x) = w_5(xi(x)) / Q_5 = s_5; then (S f)_5 = int s_5 w_5 dV / Q_5
  auto f = [&](Vec2 x) {
    const double xi = x[0] * 16.0;
    return periodic_w(medium(), 5, xi, 16) / w.q[5];
  };
  auto sf = adjoint_sample(grid, medium(), w, f);
  const int pts = 400000;
  double integral = 0.0;
  for (int k = 0; k <= pts; ++k) {
    const double xi = 16.0 * k / pts;
    const double v = periodic_w(medium(), 5, xi, 16);
    const double term = v * v / (w.q[5] * w.q[5]) / 16.0;  // s5 * w5/Q5 * dx
    integral += (k == 0 || k == pts) ? 0.5 * term : term;
  }
  integral *= 16.0 / pts;
  CHECK(sf[5] == Catch::Approx(integral).margin(1e-8));
}

TEST_CASE("laplacian row sums vanish and QA is symmetric to round-off") {
  for (auto mk : {0, 1}) {
    CurvilinearGrid grid(mk == 0 ? Mapping::uniform_2d(12, 12)
                                 : Mapping::sinusoidal_2d(12, 12, 0.05));
    auto w = assemble_weights(grid, medium());
    auto op = assemble_laplacian(grid, medium(), w);

    GridValues ones(op.num_points(), 1.0);
    auto a1 = op.apply(ones);
    double rs = 0.0;
    for (double v : a1) rs = std::max(rs, std::abs(v));
    CHECK(rs <= 1e-10 * op.norm());

    std::mt19937_64 rng(101);
    for (int t = 0; t < 500; ++t) {
      const int i = int(rng() % op.num_points());
      const int j = int(rng() % op.num_points());
      CHECK(std::abs(w.q[i] * op.entry(i, j) - w.q[j] * op.entry(j, i)) <=
            1e-13 * op.norm() * w.q[i]);
    }

    CHECK(check_adjointness(op) <= 1e-12);

    // negative semidefinite: Ritz values of QA non-positive
    std::normal_distribution<double> dist;
    GridValues x(op.num_points());
    for (int t = 0; t < 50; ++t) {
      for (double& v : x) v = dist(rng);
      double nx = 0.0;
      for (int p = 0; p < op.num_points(); ++p) nx += x[p] * w.q[p] * x[p];
      CHECK(op.qa_bilinear(x, x) / nx <= 1e-12);
    }

    // constants span the kernel direction seen by <1, A g>_Q
    GridValues g(op.num_points());
    for (double& v : g) v = dist(rng);
    auto ag = op.apply(g);
    double m = 0.0, scale = 0.0;
    for (int p = 0; p < op.num_points(); ++p) {
      m += w.q[p] * ag[p];
      scale += w.q[p] * std::abs(ag[p]);
    }
    CHECK(std::abs(m) <= 1e-12 * scale);
  }
}

TEST_CASE("stencil sparsity bound") {
  CurvilinearGrid grid(Mapping::uniform_2d(16, 16));
  auto w = assemble_weights(grid, medium());
  auto op = assemble_laplacian(grid, medium(), w);
  CHECK(op.stencil_width() == 11);
  for (int i : {0, 37, 255}) CHECK(op.row_columns(i).size() <= 121);
}

TEST_CASE("1D dirichlet form matches a dense quadrature oracle") {
  const int N = 16;
  CurvilinearGrid grid(Mapping::uniform_1d(N));
  auto w = assemble_weights(grid, medium());
  auto op = assemble_laplacian(grid, medium(), w);
  std::mt19937_64 rng(61);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 10; ++trial) {
    GridValues g(N);
    for (double& v : g) v = dist(rng);
    const double lhs = op.qa_bilinear(g, g);  // <g, QA g> = -int |d(Jg)/dx|^2
    const int pts = 200000;
    double rhs = 0.0;
    for (int k = 0; k < pts; ++k) {
      const double xi = N * (k + 0.5) / pts;
      double d = 0.0;
      for (int i = 0; i < N; ++i) d += g[i] * periodic_w(medium(), i, xi, N, 1);
      d *= N;           // d/dx = N d/dxi on the uniform map
      rhs += d * d / (N * pts) * N;  // dx = dxi / N, dxi = N / pts
    }
    CHECK(lhs == Catch::Approx(-rhs).margin(1e-8));
  }
}

TEST_CASE("1D assembled laplacian matches the entrywise dense oracle") {
  const int N = 16;
  // 12-point cells make the degree-20 integrands w_i' w_j' exactly
  // integrated; the default 10-point rule is one point short.
  CurvilinearGrid grid(Mapping::uniform_1d(N), 12);
  auto w = assemble_weights(grid, medium());
  auto op = assemble_laplacian(grid, medium(), w);
  // per-cell composite Simpson (the integrand is smooth between the knots)
  const int sub = 2048;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      double integral = 0.0;
      for (int c = 0; c < N; ++c)
        for (int k = 0; k <= sub; ++k) {
          const double xi = c + double(k) / sub;
          const double sw =
              (k == 0 || k == sub ? 1.0 : (k % 2 ? 4.0 : 2.0)) / (3.0 * sub);
          integral += sw * periodic_w(medium(), i, xi, N, 1) *
                      periodic_w(medium(), j, xi, N, 1);
        }
      integral *= N;  // (N dxi)^2 with dx = dxi / N
      const double expected = -integral / w.q[i];
      CHECK(op.entry(i, j) == Catch::Approx(expected).margin(1e-8));
    }
}

TEST_CASE("adjointness check flags a perturbed operator") {
  CurvilinearGrid grid(Mapping::uniform_2d(10, 10));
  auto w = assemble_weights(grid, medium());
  auto op = assemble_laplacian(grid, medium(), w);
  const int p = 42, s = 3;  // an off-center stencil slot
  op.perturb_l(p, s, 1e-3);
  // direct computation on the perturbed matrix with unit-vector probes
  double worst = 0.0;
  for (int c = 0; c < op.num_points(); ++c) {
    const double asym = std::abs(w.q[p] * op.entry(p, c) - w.q[c] * op.entry(c, p)) /
                        (std::sqrt(w.q[p] * w.q[c]) * op.norm());
    worst = std::max(worst, asym);
  }
  CHECK(worst > 1e-6);
}

TEST_CASE("adjointness of the identity operator is exact") {
  const int N = 8;
  IntegrationWeights w;
  w.q.assign(N, 1.0 / N);
  std::vector<double> l(N * 3, 0.0);
  for (int i = 0; i < N; ++i) l[i * 3 + 1] = -w.q[i];  // center slot: A = I
  DiscreteOperator id(1, N, 1, 1, std::move(l), w);
  GridValues x(N, 2.0);
  auto y = id.apply(x);
  for (double v : y) CHECK(v == Catch::Approx(2.0).margin(1e-15));
  CHECK(check_adjointness(id) == 0.0);
}

TEST_CASE("matrix export round-trips through the text format") {
  CurvilinearGrid grid(Mapping::uniform_1d(8));
  auto w = assemble_weights(grid, coarse());
  auto op = assemble_laplacian(grid, coarse(), w);
  std::ostringstream mat, qs;
  op.export_matrix(mat, qs);
  std::istringstream in(mat.str());
  int i, j;
  double v;
  int rows = 0;
  while (in >> i >> j >> v) {
    CHECK(v == op.entry(i, j));
    ++rows;
  }
  CHECK(rows > 0);
  std::istringstream qin(qs.str());
  double q;
  int qn = 0;
  while (qin >> q) {
    CHECK(q == w.q[qn]);
    ++qn;
  }
  CHECK(qn == 8);
}

TEST_CASE("non-positive weights are diagnosed") {
  // hand-built base function that is negative everywhere on its support
  SplineParams p;
  p.n_span = 1;
  p.n_cont = 0;
  p.order = 1;
  p.n_consist = 1;
  InterpolationSpline bad(p, {{0.0, -1.0}, {-1.0, 1.0}});  // -hat(x)
  CurvilinearGrid grid(Mapping::uniform_1d(6));
  CHECK_THROWS_AS(assemble_weights(grid, bad), NonPositiveWeight);
}
