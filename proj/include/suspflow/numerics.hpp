#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <numbers>
#include <vector>

namespace suspflow {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Neumaier's variant of Kahan summation.
template <typename T = double>
class CompensatedSum {
 public:
  void add(T v) {
    T t = sum_ + v;
    if constexpr (std::is_floating_point_v<T>) {
      if (std::abs(sum_) >= std::abs(v))
        comp_ += (sum_ - t) + v;
      else
        comp_ += (v - t) + sum_;
    } else {
      // complex: compensate componentwise
      comp_ += T(lowbits(sum_.real(), v.real(), t.real()),
                 lowbits(sum_.imag(), v.imag(), t.imag()));
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  static double lowbits(double a, double b, double s) {
    return std::abs(a) >= std::abs(b) ? (a - s) + b : (b - s) + a;
  }
  T sum_{};
  T comp_{};
};

/// x mod 1 in [0,1).
inline double frac(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

/// Distance on the circle R/Z.
inline double circle_distance(double a, double b) {
  double d = std::abs(frac(a) - frac(b));
  return std::min(d, 1.0 - d);
}

/// Integer power for small non-negative exponents, exact in uint64 range.
inline std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a,b]; value type may
/// be real or complex. The subinterval with the largest error estimate is
/// bisected until the summed estimate meets max(abs_tol, rel_tol*|integral|,
/// roundoff of int |fn|) or `max_intervals` is reached.
template <typename F>
auto integrate_adaptive(F&& fn, double a, double b, double rel_tol = 1e-12,
                        double abs_tol = 0.0, int max_intervals = 4000) {
  using V = decltype(fn(a));
  static constexpr double xgk[8] = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wgk[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  struct Piece {
    double lo, hi;
    V value;
    double err, mass;
  };
  auto rule = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    V fc = fn(c);
    V k = fc * wgk[7];
    V g = fc * wg[3];
    double m = std::abs(fc) * wgk[7];
    for (int j = 0; j < 7; ++j) {
      V f1 = fn(c - h * xgk[j]);
      V f2 = fn(c + h * xgk[j]);
      k += (f1 + f2) * wgk[j];
      m += (std::abs(f1) + std::abs(f2)) * wgk[j];
      if (j % 2 == 1) g += (f1 + f2) * wg[j / 2];
    }
    return Piece{lo, hi, k * h, std::abs(k * h - g * h), m * std::abs(h)};
  };
  if (a == b) return V{};
  auto by_error = [](const Piece& x, const Piece& y) { return x.err < y.err; };
  std::vector<Piece> heap;
  constexpr int kPresplit = 8;
  for (int i = 0; i < kPresplit; ++i)
    heap.push_back(rule(a + (b - a) * i / kPresplit, a + (b - a) * (i + 1) / kPresplit));
  std::make_heap(heap.begin(), heap.end(), by_error);
  for (;;) {
    V total{};
    double err = 0.0, mass = 0.0;
    for (const auto& p : heap) {
      total += p.value;
      err += p.err;
      mass += p.mass;
    }
    // Cancelling integrands cannot be resolved below roundoff of int |fn|.
    const double tol = std::max({abs_tol, rel_tol * std::abs(total), 64.0 * 2.2e-16 * mass});
    if (err <= tol || static_cast<int>(heap.size()) >= max_intervals) {
      std::sort(heap.begin(), heap.end(),
                [](const Piece& x, const Piece& y) { return x.lo < y.lo; });
      V sum{};
      for (const auto& p : heap) sum += p.value;
      return sum;
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Piece worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    heap.push_back(rule(worst.lo, mid));
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(rule(mid, worst.hi));
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
}

/// Trapezoid rule with doubling for integrands whose derivatives all vanish
/// at both ends (compactly supported bumps), where it converges faster than
/// any power. Stops when successive values agree to rel_tol times int |fn|.
template <typename F>
auto integrate_flat_ends(F&& fn, double a, double b, double rel_tol = 1e-14,
                         int max_points = 1 << 20) {
  using V = decltype(fn(a));
  int n = 64;
  V sum{};
  double mass = 0.0;
  for (int i = 1; i < n; ++i) {
    const V v = fn(a + (b - a) * i / n);
    sum += v;
    mass += std::abs(v);
  }
  V prev = sum * ((b - a) / n);
  while (n < max_points) {
    for (int i = 1; i < 2 * n; i += 2) {
      const V v = fn(a + (b - a) * i / (2 * n));
      sum += v;
      mass += std::abs(v);
    }
    n *= 2;
    const V cur = sum * ((b - a) / n);
    if (std::abs(cur - prev) <= rel_tol * mass * (b - a) / n) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace suspflow
