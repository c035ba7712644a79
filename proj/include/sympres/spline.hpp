#pragma once

// Interpolation base function w0: a compactly supported, even, piecewise
// polynomial that reproduces low-order polynomials exactly and interpolates
// e^{i w x} accurately for grid wavenumbers up to w_max. The free
// coefficients are fixed by an equality-constrained linear least-squares fit.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sympres/errors.hpp"

namespace sympres {

struct SplineParams {
  int n_span = 3;       // support half-width, w0(x)=0 for |x| >= n_span
  int n_cont = 1;       // continuous derivatives (and zero derivatives at +-n_span)
  int order = 11;       // piecewise polynomial degree
  int n_consist = 3;    // monomials 1, x, ..., x^{n_consist-1} reproduced exactly
  double w_max = 0.6;   // accurate-wavenumber target, radians per grid spacing

  void validate() const {
    if (n_span < 1 || order < 1 || n_consist < 1 || n_cont < 0)
      throw ConfigError("spline parameters must be positive");
    if (n_consist > order + 1)
      throw InfeasibleConstraints(
          "n_consist exceeds order + 1: more reproduction constraints than "
          "polynomial degrees of freedom");
    if (n_cont >= order) throw ConfigError("n_cont must be < order");
    if (!(w_max > 0.0 && w_max < M_PI))
      throw ConfigError("w_max must lie in (0, pi)");
  }

  static SplineParams preset(const std::string& name) {
    SplineParams p;
    if (name == "coarse") {
      p.w_max = 0.9;
      p.n_consist = 3;
    } else if (name == "medium") {
      p.w_max = 0.6;
      p.n_consist = 3;
    } else if (name == "fine") {
      p.w_max = 0.5;
      p.n_consist = 4;
    } else {
      throw ConfigError("unknown spline preset: " + name);
    }
    return p;
  }
};

struct LsqConfig {
  int omega_samples = 64;  // uniform on [0, w_max]
  int x_samples = 128;     // uniform on [0,1)
};

class InterpolationSpline {
 public:
  InterpolationSpline() = default;
  InterpolationSpline(SplineParams params, std::vector<std::vector<double>> coeffs)
      : params_(params), coeffs_(std::move(coeffs)) {}

  const SplineParams& params() const { return params_; }

  // Coefficients of the polynomial on [k, k+1), ascending degree in t = x - k.
  const std::vector<double>& piece(int k) const {
    return coeffs_[static_cast<size_t>(k + params_.n_span)];
  }

  int num_pieces() const { return 2 * params_.n_span; }

  // d^deriv w0 / dx^deriv at x; zero outside (-n_span, n_span).
  double evaluate(double x, int deriv = 0) const {
    const int n = params_.n_span;
    if (x <= -n || x >= n) return 0.0;
    if (deriv > params_.order) return 0.0;
    int k = static_cast<int>(std::floor(x));
    if (k < -n) k = -n;
    if (k > n - 1) k = n - 1;
    const std::vector<double>& c = piece(k);
    const double t = x - k;
    // Horner on the derived polynomial.
    double acc = 0.0;
    for (int d = params_.order; d >= deriv; --d) {
      double f = 1.0;
      for (int r = 0; r < deriv; ++r) f *= static_cast<double>(d - r);
      acc = acc * t + f * c[static_cast<size_t>(d)];
    }
    return acc;
  }

  double operator()(double x) const { return evaluate(x, 0); }

  // max over x in [0,1) of |sum_j e^{iwj} w0(x-j) - e^{iwx}|
  double dispersion_error(double omega, int x_samples = 128) const {
    const int n = params_.n_span;
    double worst = 0.0;
    for (int r = 0; r < x_samples; ++r) {
      const double x = static_cast<double>(r) / x_samples;
      std::complex<double> acc(0.0, 0.0);
      for (int j = -n + 1; j <= n; ++j)
        acc += std::polar(evaluate(x - j), omega * j);
      acc -= std::polar(1.0, omega * x);
      worst = std::max(worst, std::abs(acc));
    }
    return worst;
  }

  // max over x in [0,1) of |sum_j j^m w0(x-j) - x^m|
  double reproduction_defect(int m, int x_samples = 128) const {
    const int n = params_.n_span;
    double worst = 0.0;
    for (int r = 0; r < x_samples; ++r) {
      const double x = static_cast<double>(r) / x_samples;
      double acc = 0.0;
      for (int j = -n + 1; j <= n; ++j)
        acc += std::pow(static_cast<double>(j), m) * evaluate(x - j);
      worst = std::max(worst, std::abs(acc - std::pow(x, m)));
    }
    return worst;
  }

  void save(std::ostream& os) const {
    const SplineParams& p = params_;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d %d %d %d %.17g\n", p.n_span, p.n_cont,
                  p.order, p.n_consist, p.w_max);
    os << buf;
    for (int k = -p.n_span; k < p.n_span; ++k) {
      os << k;
      for (double c : piece(k)) {
        std::snprintf(buf, sizeof buf, " %.17g", c);
        os << buf;
      }
      os << "\n";
    }
  }

  void save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open spline file for writing: " + path);
    save(os);
  }

  static InterpolationSpline load(std::istream& is) {
    SplineParams p;
    if (!(is >> p.n_span >> p.n_cont >> p.order >> p.n_consist >> p.w_max))
      throw ConfigError("malformed spline file header");
    p.validate();
    std::vector<std::vector<double>> coeffs(2 * p.n_span,
                                            std::vector<double>(p.order + 1));
    for (int k = -p.n_span; k < p.n_span; ++k) {
      int kk;
      if (!(is >> kk) || kk != k)
        throw ConfigError("malformed spline file: bad interval index");
      for (int d = 0; d <= p.order; ++d)
        if (!(is >> coeffs[k + p.n_span][d]))
          throw ConfigError("malformed spline file: missing coefficient");
    }
    return InterpolationSpline(p, std::move(coeffs));
  }

  static InterpolationSpline load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open spline file: " + path);
    return load(is);
  }

 private:
  SplineParams params_;
  std::vector<std::vector<double>> coeffs_;  // piece k+n_span, ascending degree
};

struct SplineBuildInfo {
  double constraint_residual = 0.0;  // max abs violation over all constraints
  bool rank_deficient = false;       // reduced LSQ system was rank-deficient
  int free_parameters = 0;           // dimension of the constraint null space
};

namespace detail {

inline double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// d-th derivative factor d!/(d-r)!
inline double fall(int d, int r) {
  double f = 1.0;
  for (int i = 0; i < r; ++i) f *= static_cast<double>(d - i);
  return f;
}

}  // namespace detail

// Equality constraints (symmetry, continuity, boundary, polynomial
// reproduction) are eliminated with an orthogonal null-space basis; the
// remaining freedom minimizes the sampled dispersion misfit over
// [0, w_max] x [0,1) through pivoted normal equations.
inline InterpolationSpline build_spline(const SplineParams& params,
                                        const LsqConfig& lsq = LsqConfig{},
                                        SplineBuildInfo* info = nullptr) {
  params.validate();
  const int n = params.n_span;
  const int P = params.order;         // degree
  const int nc = P + 1;               // coefficients per piece
  const int npieces = 2 * n;
  const int nu = npieces * nc;        // unknowns

  auto idx = [&](int k, int d) { return (k + n) * nc + d; };

  const int n_sym = n * nc;
  const int n_cnt = (2 * n - 1) * (params.n_cont + 1);
  const int n_bnd = 2 * (params.n_cont + 1);
  const int n_rep = params.n_consist * nc;
  const int nrows = n_sym + n_cnt + n_bnd + n_rep;

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nrows, nu);
  Eigen::VectorXd d_rhs = Eigen::VectorXd::Zero(nrows);
  int row = 0;

  // Even symmetry: piece on [-k-1,-k) is the mirror of the piece on [k,k+1):
  // p_{-k-1}(t) = p_k(1-t).
  for (int k = 0; k < n; ++k) {
    for (int m = 0; m < nc; ++m) {
      C(row, idx(-k - 1, m)) += 1.0;
      for (int d = m; d < nc; ++d)
        C(row, idx(k, d)) -= detail::binom(d, m) * ((m % 2) ? -1.0 : 1.0);
      ++row;
    }
  }
  // Continuity of value and first n_cont derivatives at interior breakpoints.
  for (int k = -n + 1; k <= n - 1; ++k) {
    for (int r = 0; r <= params.n_cont; ++r) {
      for (int d = r; d < nc; ++d) C(row, idx(k - 1, d)) += detail::fall(d, r);
      C(row, idx(k, r)) -= detail::fall(r, r);
      ++row;
    }
  }
  // Zero value and derivatives at x = +-n_span.
  for (int r = 0; r <= params.n_cont; ++r) {
    for (int d = r; d < nc; ++d) C(row, idx(n - 1, d)) += detail::fall(d, r);
    ++row;
    C(row, idx(-n, r)) += detail::fall(r, r);
    ++row;
  }
  // Reproduction of x^m for m < n_consist, as exact polynomial identities on
  // [0,1): sum_j j^m p_{-j}(t) = t^m, coefficient by coefficient.
  for (int m = 0; m < params.n_consist; ++m) {
    for (int d = 0; d < nc; ++d) {
      for (int j = -n + 1; j <= n; ++j) {
        const double jm = (j == 0) ? (m == 0 ? 1.0 : 0.0)
                                   : std::pow(static_cast<double>(j), m);
        if (jm != 0.0) C(row, idx(-j, d)) += jm;
      }
      d_rhs(row) = (d == m) ? 1.0 : 0.0;
      ++row;
    }
  }

  // Particular solution + feasibility check.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(C);
  Eigen::VectorXd c0 = cod.solve(d_rhs);
  const double feas = (C * c0 - d_rhs).cwiseAbs().maxCoeff();
  if (feas > 1e-8)
    throw InfeasibleConstraints("equality constraints are inconsistent (residual " +
                                std::to_string(feas) + ")");

  // Orthonormal null-space basis of C from a rank-revealing QR of C^T:
  // the trailing columns of Q span the complement of the row space.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C.transpose());
  const int rank = static_cast<int>(qr.rank());
  const int nfree = nu - rank;
  if (nfree <= 0)
    throw InfeasibleConstraints("equality constraints leave no degrees of freedom");
  Eigen::MatrixXd Qfull = qr.householderQ();
  Eigen::MatrixXd Z = Qfull.rightCols(nfree);

  // Dispersion misfit rows: real and imaginary parts of
  // sum_j e^{iwj} w0(x-j) - e^{iwx} at sampled (w, x).
  const int nw = lsq.omega_samples;
  const int nx = lsq.x_samples;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * nw * nx, nu);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * nw * nx);
  int mrow = 0;
  for (int q = 0; q < nw; ++q) {
    const double w = params.w_max * (nw > 1 ? static_cast<double>(q) / (nw - 1) : 1.0);
    for (int r = 0; r < nx; ++r) {
      const double x = static_cast<double>(r) / nx;
      for (int j = -n + 1; j <= n; ++j) {
        double td = 1.0;
        for (int d = 0; d < nc; ++d) {
          M(mrow, idx(-j, d)) += std::cos(w * j) * td;
          M(mrow + 1, idx(-j, d)) += std::sin(w * j) * td;
          td *= x;
        }
      }
      b(mrow) = std::cos(w * x);
      b(mrow + 1) = std::sin(w * x);
      mrow += 2;
    }
  }

  Eigen::MatrixXd B = M * Z;
  // Directions that improve the objective by less than ~1e-6 get truncated:
  // they carry enormous coefficient norm and wreck the constraint residual.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> bcod;
  bcod.setThreshold(1e-6);
  bcod.compute(B);
  Eigen::VectorXd y = bcod.solve(b - M * c0);  // minimum-norm on deficiency
  Eigen::JacobiSVD<Eigen::MatrixXd> bsvd(B);
  const auto& sv = bsvd.singularValues();
  const bool deficient = sv(sv.size() - 1) < 1e-10 * sv(0);
  Eigen::VectorXd u = c0 + Z * y;
  // One refinement pass against the constraints; the correction lies in the
  // row space of C and does not change the least-squares objective.
  u -= cod.solve(C * u - d_rhs);


  std::vector<std::vector<double>> coeffs(npieces, std::vector<double>(nc));
  for (int k = -n; k < n; ++k)
    for (int d = 0; d < nc; ++d) coeffs[k + n][d] = u(idx(k, d));
  InterpolationSpline spline(params, std::move(coeffs));

  if (info) {
    info->constraint_residual = (C * u - d_rhs).cwiseAbs().maxCoeff();
    info->rank_deficient = deficient;
    info->free_parameters = nfree;
  }
  return spline;
}

}  // namespace sympres
