#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "suspflow/orbits.hpp"
#include "suspflow/spectral.hpp"

namespace suspflow {

/// Smooth bump on [t0, t1] with peak 1 at the midpoint:
/// phi(t) = chi(1 + |2 (t - mid) / (t1 - t0)|).
struct TestFunction {
  double t0 = 1.0;
  double t1 = 2.0;
  double rel_tol = 1e-13;  ///< quadrature tolerance for integrals against phi

  TestFunction() = default;
  TestFunction(double a, double b);
  double operator()(double t) const;
};

/// int_1^T e^{h t} / t dt.
double leading_integral(double h, double T);

/// int_1^T e^{mu t} / t dt.
cplx complex_log_integral(cplx mu, double T);

/// Real part of the sum over resonances with cutoff < Re mu, other than the
/// leading real one, of int_1^T e^{mu t}/t dt. Unpaired non-real entries are
/// reported through `warnings`.
double correction_sum(const ResonanceSet& res, double cutoff, double T,
                      std::vector<std::string>* warnings = nullptr);

/// Maximal run of the top half of the grid on which the residual keeps one
/// sign, with its peak |R|.
struct FitWindow {
  double T_begin = 0.0;
  double T_end = 0.0;
  int points = 0;
  int sign = 0;
  double peak_T = 0.0;
  double peak_abs = 0.0;
  bool used = false;  ///< interior window with enough points to enter the fit
};

struct PotSeries {
  std::vector<double> T;
  std::vector<long> pi;
  std::vector<double> pi_tilde;
  std::vector<double> leading;
  std::vector<double> correction;
  std::vector<double> residual;
  std::vector<FitWindow> windows;
  /// Least-squares slope of log peak_abs against peak_T over the used
  /// windows; NaN when fewer than 3 windows are usable.
  double fitted_exponent = 0.0;
  int fit_windows_used = 0;
  std::vector<std::string> warnings;
};

/// Windows with fewer points are reported but not fitted.
inline constexpr int kMinWindowPoints = 3;

/// Splits the top half of the grid into sign-stable windows. The first and
/// last windows are cut by the grid ends and never used.
std::vector<FitWindow> sign_windows(const std::vector<double>& T, const std::vector<double>& R);

/// Envelope slope over the used windows (NaN if fewer than 3).
double envelope_slope(const std::vector<FitWindow>& windows, int* used = nullptr);

PotSeries pot_series(const RoofFunction& f, const std::vector<double>& T_grid,
                     const ResonanceSet& res, double cutoff, const OrbitOptions& opts = {});
PotSeries pot_series(std::span<const PrimeOrbit> orbits, int ell,
                     const std::vector<double>& T_grid, const ResonanceSet& res, double cutoff);

/// sum_gamma sum_{n >= 1} |gamma| phi(n |gamma|) / (1 - E_gamma^{-n}).
double flat_trace_orbit_side(const RoofFunction& f, const TestFunction& phi,
                             const OrbitOptions& opts = {});
double flat_trace_orbit_side(std::span<const PrimeOrbit> orbits, int ell, const TestFunction& phi);
/// The same sum for any test function vanishing on [t_max, infinity).
double flat_trace_orbit_side(std::span<const PrimeOrbit> orbits, int ell,
                             const std::function<double(double)>& phi, double t_max);

/// Re sum over resonances with Re mu > cutoff of int phi(t) e^{mu t} dt.
double flat_trace_spectral_side(const ResonanceSet& res, const TestFunction& phi, double cutoff);

}  // namespace suspflow
