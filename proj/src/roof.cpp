#include "suspflow/roof.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>

#include "suspflow/errors.hpp"
#include "suspflow/numerics.hpp"

namespace suspflow {

RoofFunction::RoofFunction(int ell, double c0, std::vector<double> cos_coeffs,
                           std::vector<double> sin_coeffs, ClassBounds bounds)
    : ell_(ell), c0_(c0), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)),
      bounds_(bounds) {
  if (ell_ < 2) throw ValidationError("roof: base ell must be >= 2");
  if (cos_.size() < sin_.size()) cos_.resize(sin_.size(), 0.0);
  if (sin_.size() < cos_.size()) sin_.resize(cos_.size(), 0.0);
  while (!cos_.empty() && cos_.back() == 0.0 && sin_.back() == 0.0) {
    cos_.pop_back();
    sin_.pop_back();
  }
  for (double v : cos_)
    if (!std::isfinite(v)) throw ValidationError("roof: non-finite coefficient");
  for (double v : sin_)
    if (!std::isfinite(v)) throw ValidationError("roof: non-finite coefficient");

  const int grid = 4096 * (degree() + 1);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < grid; ++i) {
    double v = eval(static_cast<double>(i) / grid);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double slack = derivative_bound(1) * 0.5 / grid + 1e-14 * (std::abs(c0_) + 1);
  lower_bound_ = lo - slack;
  upper_bound_ = hi + slack;
  if (lower_bound_ <= 0.0 && lo <= 0.0)
    throw ValidationError("roof: function is not positive");
}

RoofFunction RoofFunction::constant(int ell, double c, ClassBounds bounds) {
  return RoofFunction(ell, c, {}, {}, bounds);
}

bool RoofFunction::is_constant() const { return cos_.empty(); }

void RoofFunction::evaluate_all(double x, double& f0, double& f1, double& f2) const {
  f0 = c0_;
  f1 = 0.0;
  f2 = 0.0;
  if (cos_.empty()) return;
  const std::complex<double> step = std::polar(1.0, kTwoPi * x);
  std::complex<double> z = step;
  for (std::size_t k = 1; k <= cos_.size(); ++k) {
    const double a = cos_[k - 1], b = sin_[k - 1];
    const double w = kTwoPi * static_cast<double>(k);
    f0 += a * z.real() + b * z.imag();
    f1 += w * (-a * z.imag() + b * z.real());
    f2 += -w * w * (a * z.real() + b * z.imag());
    // Re-anchor periodically to keep the recurrence error bounded.
    z = (k % 16 == 15) ? std::polar(1.0, kTwoPi * static_cast<double>(k + 1) * x)
                       : z * step;
  }
}

double RoofFunction::eval(double x) const {
  if (cos_.empty()) return c0_;
  if (cos_.size() == 1) {
    const double th = kTwoPi * x;
    return c0_ + cos_[0] * std::cos(th) + sin_[0] * std::sin(th);
  }
  double f0, f1, f2;
  evaluate_all(x, f0, f1, f2);
  return f0;
}

double RoofFunction::derivative(double x) const {
  double f0, f1, f2;
  evaluate_all(x, f0, f1, f2);
  return f1;
}

double RoofFunction::second_derivative(double x) const {
  double f0, f1, f2;
  evaluate_all(x, f0, f1, f2);
  return f2;
}

double RoofFunction::derivative_bound(int order) const {
  double s = 0.0;
  for (std::size_t k = 1; k <= cos_.size(); ++k)
    s += std::pow(kTwoPi * static_cast<double>(k), order) *
         (std::abs(cos_[k - 1]) + std::abs(sin_[k - 1]));
  return s;
}

double RoofFunction::tau(double x) const { return frac(static_cast<double>(ell_) * x); }

std::string RoofFunction::canonical_string() const {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::string s = "ell=" + std::to_string(ell_) + ";c0=" + num(c0_) + ";cos=";
  for (std::size_t i = 0; i < cos_.size(); ++i) s += (i ? "," : "") + num(cos_[i]);
  s += ";sin=";
  for (std::size_t i = 0; i < sin_.size(); ++i) s += (i ? "," : "") + num(sin_[i]);
  s += ";y_min=" + num(bounds_.y_min) + ";y_max=" + num(bounds_.y_max) +
       ";kappa0=" + num(bounds_.kappa0);
  return s;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RoofFunction::digest() const { return fnv1a_hex(canonical_string()); }

double birkhoff_sum(const RoofFunction& f, double x, long n) {
  CompensatedSum<> acc;
  for (long i = 0; i < n; ++i) {
    acc.add(f(x));
    x = f.tau(x);
  }
  return acc.value();
}

double birkhoff_derivative(const RoofFunction& f, double x, long n) {
  if (f.is_constant()) return 0.0;
  CompensatedSum<> acc;
  double scale = 1.0;
  for (long i = 0; i < n; ++i) {
    acc.add(scale * f.derivative(x));
    scale *= f.ell();
    x = f.tau(x);
  }
  return acc.value();
}

long hitting_count(const RoofFunction& f, double x, double t) {
  CompensatedSum<> acc;
  long n = 0;
  for (;;) {
    CompensatedSum<> next = acc;
    next.add(f(x));
    if (next.value() > t) return n;
    acc = next;
    ++n;
    x = f.tau(x);
  }
}

ClassReport validate_class(const RoofFunction& f) {
  const auto& b = f.bounds();
  ClassReport rep;
  rep.grid_points = 1024 * (f.degree() + 1);
  const double h = 1.0 / rep.grid_points;
  const double d1 = f.derivative_bound(1), d2 = f.derivative_bound(2),
               d3 = f.derivative_bound(3);

  // Between grid points a function with |g'| <= L deviates by at most L*h/2.
  rep.positive.slack = d1 * h / 2;
  rep.value_bounds.slack = std::min(b.kappa0, d1) * h / 2;
  rep.first_derivative.slack = std::min(b.kappa0, d2) * h / 2;
  rep.second_derivative.slack = d3 * h / 2;

  auto track = [](ClassCheck& c, double margin, double x, bool first) {
    if (first || margin < c.margin) {
      c.margin = margin;
      c.worst_x = x;
    }
  };
  for (int i = 0; i < rep.grid_points; ++i) {
    const double x = i * h;
    const double v = f.eval(x), v1 = f.derivative(x), v2 = f.second_derivative(x);
    const bool first = i == 0;
    track(rep.positive, v, x, first);
    track(rep.value_bounds, std::min(v - b.y_min, b.y_max - v), x, first);
    track(rep.first_derivative, b.kappa0 - std::abs(v1), x, first);
    track(rep.second_derivative, b.kappa0 - std::abs(v2), x, first);
  }
  for (ClassCheck* c : {&rep.positive, &rep.value_bounds, &rep.first_derivative,
                        &rep.second_derivative})
    c->passed = c->margin > c->slack;
  return rep;
}

}  // namespace suspflow
