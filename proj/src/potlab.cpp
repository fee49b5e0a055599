#include "suspflow/potlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "suspflow/errors.hpp"
#include "suspflow/numerics.hpp"
#include "suspflow/transversality.hpp"

namespace suspflow {

TestFunction::TestFunction(double a, double b) : t0(a), t1(b) {
  if (!(0.0 < a && a < b)) throw ValidationError("TestFunction: need 0 < t0 < t1");
}

double TestFunction::operator()(double t) const {
  if (t <= t0 || t >= t1) return 0.0;
  const double mid = 0.5 * (t0 + t1);
  return chi_bump(1.0 + std::abs(2.0 * (t - mid) / (t1 - t0)));
}

double leading_integral(double h, double T) {
  if (!(T >= 1.0)) throw ValidationError("leading_integral: T must be >= 1");
  return integrate_adaptive([h](double t) { return std::exp(h * t) / t; }, 1.0, T, 1e-13);
}

cplx complex_log_integral(cplx mu, double T) {
  if (!(T >= 1.0)) throw ValidationError("complex_log_integral: T must be >= 1");
  return integrate_adaptive([mu](double t) { return std::exp(mu * t) / t; }, 1.0, T, 1e-13);
}

namespace {

bool is_leading(const Resonance& r, double h) {
  return r.mu.imag() == 0.0 && std::abs(r.mu.real() - h) <= 1e-9;
}

bool has_conjugate(const ResonanceSet& res, const Resonance& r) {
  for (const auto& o : res.entries)
    if (std::abs(o.mu - std::conj(r.mu)) <= 10.0 * std::max(res.tol, 1e-12)) return true;
  return false;
}

}  // namespace

double correction_sum(const ResonanceSet& res, double cutoff, double T,
                      std::vector<std::string>* warnings) {
  if (!(cutoff < res.h)) throw ValidationError("correction_sum: cutoff must be below h");
  CompensatedSum<> acc;
  for (const auto& r : res.entries) {
    if (r.mu.real() <= cutoff || is_leading(r, res.h)) continue;
    if (r.mu.imag() != 0.0 && !has_conjugate(res, r) && warnings) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "resonance %.6g%+.6gi has no conjugate in the window",
                    r.mu.real(), r.mu.imag());
      warnings->push_back(buf);
    }
    acc.add(complex_log_integral(r.mu, T).real());
  }
  return acc.value();
}

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

std::vector<FitWindow> sign_windows(const std::vector<double>& T, const std::vector<double>& R) {
  std::vector<FitWindow> out;
  const std::size_t n = T.size();
  std::size_t i = n / 2;
  while (i < n) {
    const int sign = sign_of(R[i]);
    std::size_t j = i;
    FitWindow w;
    w.T_begin = T[i];
    w.sign = sign;
    while (j < n && sign_of(R[j]) == sign) {
      if (std::abs(R[j]) > w.peak_abs) {
        w.peak_abs = std::abs(R[j]);
        w.peak_T = T[j];
      }
      ++j;
    }
    w.T_end = T[j - 1];
    w.points = static_cast<int>(j - i);
    w.used = sign != 0 && w.points >= kMinWindowPoints;
    out.push_back(w);
    i = j;
  }
  if (!out.empty()) out.front().used = false;
  if (!out.empty()) out.back().used = false;
  return out;
}

double envelope_slope(const std::vector<FitWindow>& windows, int* used) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& w : windows) {
    if (!w.used) continue;
    const double x = w.peak_T, y = std::log(w.peak_abs);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (used) *used = m;
  if (m < 3) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

PotSeries pot_series(std::span<const PrimeOrbit> orbits, int ell,
                     const std::vector<double>& T_grid, const ResonanceSet& res, double cutoff) {
  if (T_grid.empty()) throw ValidationError("pot_series: empty T grid");
  if (!std::is_sorted(T_grid.begin(), T_grid.end()) || T_grid.front() < 1.0)
    throw ValidationError("pot_series: T grid must be increasing and >= 1");
  PotSeries ps;
  ps.T = T_grid;
  ps.pi = pi_series(orbits, T_grid);
  ps.pi_tilde = pi_tilde_series(orbits, ell, T_grid);
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    ps.leading.push_back(leading_integral(res.h, T_grid[i]));
    ps.correction.push_back(
        correction_sum(res, cutoff, T_grid[i], i == 0 ? &ps.warnings : nullptr));
    ps.residual.push_back(ps.pi_tilde[i] - ps.leading[i] - ps.correction[i]);
  }
  ps.windows = sign_windows(ps.T, ps.residual);
  ps.fitted_exponent = envelope_slope(ps.windows, &ps.fit_windows_used);
  return ps;
}

PotSeries pot_series(const RoofFunction& f, const std::vector<double>& T_grid,
                     const ResonanceSet& res, double cutoff, const OrbitOptions& opts) {
  if (T_grid.empty()) throw ValidationError("pot_series: empty T grid");
  const double T_max = *std::max_element(T_grid.begin(), T_grid.end());
  const auto orbits = prime_orbits_below(f, T_max, opts);
  return pot_series(orbits, f.ell(), T_grid, res, cutoff);
}

double flat_trace_orbit_side(std::span<const PrimeOrbit> orbits, int ell,
                             const std::function<double(double)>& phi, double t_max) {
  CompensatedSum<> acc;
  for (const auto& g : orbits) {
    for (int n = 1; n * g.period < t_max; ++n) {
      const double v = phi(n * g.period);
      if (v == 0.0) continue;
      const double inv_E = std::pow(static_cast<double>(ell), -static_cast<double>(n) * g.n);
      acc.add(g.period * v / (1.0 - inv_E));
    }
  }
  return acc.value();
}

double flat_trace_orbit_side(std::span<const PrimeOrbit> orbits, int ell, const TestFunction& phi) {
  return flat_trace_orbit_side(orbits, ell, [&](double t) { return phi(t); }, phi.t1);
}

double flat_trace_orbit_side(const RoofFunction& f, const TestFunction& phi,
                             const OrbitOptions& opts) {
  const auto orbits = prime_orbits_below(f, phi.t1, opts);
  return flat_trace_orbit_side(orbits, f.ell(), phi);
}

double flat_trace_spectral_side(const ResonanceSet& res, const TestFunction& phi, double cutoff) {
  CompensatedSum<> acc;
  for (const auto& r : res.entries) {
    if (r.mu.real() <= cutoff) continue;
    const cplx mu = r.mu;
    const cplx v = integrate_flat_ends([&](double t) { return phi(t) * std::exp(mu * t); },
                                       phi.t0, phi.t1, phi.rel_tol);
    acc.add(v.real());
  }
  return acc.value();
}

}  // namespace suspflow
