#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace suspflow {

/// Declared bounds of the roof class: y_min < f < y_max, |f'|, |f''| < kappa0.
struct ClassBounds {
  double y_min = 0.0;
  double y_max = 0.0;
  double kappa0 = 0.0;
};

/**
 * Positive roof function on the circle R/Z, stored as a finite trigonometric
 * polynomial
 *
 *   f(x) = c0 + sum_{k=1..K} (a_k cos 2 pi k x + b_k sin 2 pi k x),
 *
 * together with the base of the angle-multiplying map tau(x) = ell*x mod 1
 * and the declared class bounds. Immutable after construction.
 */
class RoofFunction {
 public:
  RoofFunction(int ell, double c0, std::vector<double> cos_coeffs,
               std::vector<double> sin_coeffs, ClassBounds bounds);

  static RoofFunction constant(int ell, double c, ClassBounds bounds);

  int ell() const { return ell_; }
  double c0() const { return c0_; }
  std::span<const double> cos_coeffs() const { return cos_; }
  std::span<const double> sin_coeffs() const { return sin_; }
  const ClassBounds& bounds() const { return bounds_; }
  int degree() const { return static_cast<int>(cos_.size()); }
  bool is_constant() const;

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  /// sup |f^(order)| bounded by the coefficient l1 sum sum (2 pi k)^order (|a_k|+|b_k|).
  double derivative_bound(int order) const;
  /// Rigorous lower bound of min f over the circle (grid minimum minus a
  /// Lipschitz correction).
  double lower_bound() const { return lower_bound_; }
  /// Rigorous upper bound of max f over the circle.
  double upper_bound() const { return upper_bound_; }

  /// tau(x) = ell*x mod 1.
  double tau(double x) const;

  /// Lossless text form (17 significant digits); also the hashing input.
  std::string canonical_string() const;
  /// 64-bit FNV-1a of canonical_string(), as 16 hex digits.
  std::string digest() const;

 private:
  void evaluate_all(double x, double& f0, double& f1, double& f2) const;

  int ell_;
  double c0_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  ClassBounds bounds_;
  double lower_bound_ = 0.0;
  double upper_bound_ = 0.0;
};

/// f^(n)(x) = sum_{i<n} f(tau^i x), compensated summation; n = 0 gives 0.
double birkhoff_sum(const RoofFunction& f, double x, long n);

/// d/dx f^(n)(x) = sum_{i<n} ell^i f'(tau^i x).
double birkhoff_derivative(const RoofFunction& f, double x, long n);

/// n(x,t;f) = max{n >= 0 : f^(n)(x) <= t}.
long hitting_count(const RoofFunction& f, double x, double t);

struct ClassCheck {
  bool passed = false;
  double worst_x = 0.0;  ///< grid point with the smallest margin
  double margin = 0.0;   ///< smallest grid margin (negative: violated on the grid)
  double slack = 0.0;    ///< Lipschitz slack the margin must exceed
};

/// Per-inequality result of the class membership test.
struct ClassReport {
  ClassCheck positive;
  ClassCheck value_bounds;       ///< y_min < f < y_max
  ClassCheck first_derivative;   ///< |f'| < kappa0
  ClassCheck second_derivative;  ///< |f''| < kappa0
  int grid_points = 0;
  bool passed() const {
    return positive.passed && value_bounds.passed && first_derivative.passed &&
           second_derivative.passed;
  }
};

/// Checks the class inequalities on a grid of ceil(1024 (K+1)) points. A check
/// passes when the grid margin exceeds the Lipschitz slack, which certifies
/// the inequality between grid points as well.
ClassReport validate_class(const RoofFunction& f);

/// 64-bit FNV-1a digest as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace suspflow
