#pragma once

#include <vector>

#include "suspflow/orbits.hpp"
#include "suspflow/roof.hpp"

namespace suspflow {

struct CycleMeans {
  double min_mean = 0.0;
  double max_mean = 0.0;
};

/// Extremal Birkhoff averages f^(n)(x_gamma)/n over prime orbits with n <= n_max.
CycleMeans cycle_mean_extremes(const RoofFunction& f, int n_max, const OrbitOptions& opts = {});

/// rho_p = (1 + (max{p, alpha} - 1)/p) h / 2.
double rho_p(int p, double alpha, double h);

/// ceil(alpha), with alpha within 1e-9 of an integer rounded to it.
int optimal_p(double alpha);

struct ExponentReport {
  double chi_min = 0.0;
  double chi_max = 0.0;
  double chi_bar_min = 0.0;  ///< log ell / y_max
  double chi_bar_max = 0.0;  ///< log ell / y_min
  double h = 0.0;
  double alpha = 0.0;        ///< chi_max / h
  int p_star = 1;
  std::vector<double> rho;      ///< rho[p-1] = rho_p
  std::vector<double> rho_bar;  ///< (rho_p + h) / 2
  double predicted_error_exponent = 0.0;
  int n_used = 0;
  int N_used = 0;

  /// The sandwich chi_bar_min <= chi_min <= h <= chi_max <= chi_bar_max
  /// within `tol`.
  bool sandwich_holds(double tol = 1e-6) const;
};

ExponentReport exponent_report(const RoofFunction& f, int n_max, int N,
                               const OrbitOptions& opts = {});

}  // namespace suspflow
