#pragma once

// Conserved-quantity diagnostics: discrete mass M = <1,p>_Q, discrete energy
// E = 1/2 <q,q>_Q - 1/2 <p,Ap>_Q, Q-weighted relative RMS error, and the
// CSV report tables.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "sympres/errors.hpp"
#include "sympres/operators.hpp"

namespace sympres {

struct DiagnosticsRecord {
  double t = 0.0;
  double rms_error_pct = 0.0;
  double mass = 0.0;
  double mass_loss_pct = 0.0;
  double energy = 0.0;
  double energy_loss_pct = 0.0;
};

inline double mass(std::span<const double> p, const IntegrationWeights& weights) {
  double m = 0.0;
  for (size_t i = 0; i < p.size(); ++i) m += weights.q[i] * p[i];
  return m;
}

inline double energy(std::span<const double> p, std::span<const double> q,
                     const DiscreteOperator& op) {
  const auto& w = op.weights().q;
  double kin = 0.0;
  for (size_t i = 0; i < q.size(); ++i) kin += q[i] * w[i] * q[i];
  // -<p, A p>_Q = <p, L p> through the stored symmetric stencil.
  return 0.5 * kin - 0.5 * op.qa_bilinear(p, p);
}

// 100 * ||p - p_ref||_Q / ||p_ref||_Q.
inline double rms_error(std::span<const double> p, std::span<const double> p_ref,
                        const IntegrationWeights& weights) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - p_ref[i];
    num += weights.q[i] * d * d;
    den += weights.q[i] * p_ref[i] * p_ref[i];
  }
  if (den <= 0.0) throw ZeroReference("reference field has zero Q-norm");
  return 100.0 * std::sqrt(num) / std::sqrt(den);
}

// Loss percentages in the report use 2 significant digits, e.g. "6.1E-11".
inline std::string format_loss(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1E", pct);
  return buf;
}

struct RunResult {
  std::string label;
  std::vector<DiagnosticsRecord> records;  // t = 0, and each report time
};

namespace detail {

inline const DiagnosticsRecord* find_time(const RunResult& r, double t) {
  for (const auto& rec : r.records)
    if (std::abs(rec.t - t) < 1e-9) return &rec;
  return nullptr;
}

}  // namespace detail

// RMS errors (percent), one column per run, rows t = 1..t_max.
inline void write_table2(const std::vector<RunResult>& runs, std::ostream& os,
                         int t_max = 10) {
  os << "t";
  for (const auto& r : runs) os << "," << r.label;
  os << "\n";
  char buf[32];
  for (int t = 1; t <= t_max; ++t) {
    os << t;
    for (const auto& r : runs) {
      os << ",";
      if (const auto* rec = detail::find_time(r, t)) {
        std::snprintf(buf, sizeof buf, "%.6g", rec->rms_error_pct);
        os << buf;
      }
    }
    os << "\n";
  }
}

// Mass and energy losses (percent of t=0 values), two columns per run.
inline void write_table3(const std::vector<RunResult>& runs, std::ostream& os,
                         int t_max = 10) {
  os << "t";
  for (const auto& r : runs)
    os << "," << r.label << "_mass_loss_pct," << r.label << "_energy_loss_pct";
  os << "\n";
  for (int t = 1; t <= t_max; ++t) {
    os << t;
    for (const auto& r : runs) {
      os << ",";
      if (const auto* rec = detail::find_time(r, t))
        os << format_loss(rec->mass_loss_pct) << ","
           << format_loss(rec->energy_loss_pct);
      else
        os << ",";
    }
    os << "\n";
  }
}

}  // namespace sympres
