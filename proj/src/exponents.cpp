#include "suspflow/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "suspflow/errors.hpp"
#include "suspflow/spectral.hpp"

namespace suspflow {

CycleMeans cycle_mean_extremes(const RoofFunction& f, int n_max, const OrbitOptions& opts) {
  if (n_max < 1) throw ValidationError("cycle_mean_extremes: n_max must be >= 1");
  const auto orbits = enumerate_prime_orbits(f, n_max, opts);
  CycleMeans cm{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& g : orbits) {
    const double mean = g.period / g.n;
    cm.min_mean = std::min(cm.min_mean, mean);
    cm.max_mean = std::max(cm.max_mean, mean);
  }
  return cm;
}

double rho_p(int p, double alpha, double h) {
  return 0.5 * (1.0 + (std::max<double>(p, alpha) - 1.0) / p) * h;
}

int optimal_p(double alpha) {
  const double r = std::round(alpha);
  if (std::abs(alpha - r) <= 1e-9) return std::max(1, static_cast<int>(r));
  return std::max(1, static_cast<int>(std::ceil(alpha)));
}

bool ExponentReport::sandwich_holds(double tol) const {
  return chi_bar_min <= chi_min + tol && chi_min <= h + tol && h <= chi_max + tol &&
         chi_max <= chi_bar_max + tol;
}

ExponentReport exponent_report(const RoofFunction& f, int n_max, int N, const OrbitOptions& opts) {
  ExponentReport r;
  const double log_ell = std::log(static_cast<double>(f.ell()));
  const CycleMeans cm = cycle_mean_extremes(f, n_max, opts);
  r.chi_max = log_ell / cm.min_mean;
  r.chi_min = log_ell / cm.max_mean;
  r.chi_bar_min = log_ell / f.bounds().y_max;
  r.chi_bar_max = log_ell / f.bounds().y_min;
  r.h = entropy(f, N);
  r.alpha = r.chi_max / r.h;
  r.p_star = optimal_p(r.alpha);
  const int p_max = std::max(8, r.p_star + 2);
  for (int p = 1; p <= p_max; ++p) {
    r.rho.push_back(rho_p(p, r.alpha, r.h));
    r.rho_bar.push_back(0.5 * (r.rho.back() + r.h));
  }
  r.predicted_error_exponent = (1.0 - 1.0 / (4.0 * r.p_star)) * r.h;
  r.n_used = n_max;
  r.N_used = N;
  return r;
}

}  // namespace suspflow
