#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "suspflow/exponents.hpp"

using namespace suspflow;

TEST_CASE("cycle means of a constant roof") {
  const auto c = RoofFunction::constant(2, 1.3, {1.0, 2.0, 1.0});
  const auto m = cycle_mean_extremes(c, 8);
  CHECK(m.min_mean == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(m.max_mean == doctest::Approx(1.3).epsilon(1e-15));
  const auto rep = exponent_report(c, 8, 16);
  CHECK(rep.chi_min == doctest::Approx(std::log(2.0) / 1.3).epsilon(1e-14));
  CHECK(rep.chi_max == doctest::Approx(std::log(2.0) / 1.3).epsilon(1e-14));
}

TEST_CASE("cycle means match every periodic point up to length 12") {
  const auto f = fixtures::standard_roof();
  const auto m = cycle_mean_extremes(f, 12);
  double lo = 1e300, hi = -1e300;
  for (int n = 1; n <= 12; ++n) {
    const std::uint64_t den = oracle::power(2, n) - 1;
    for (std::uint64_t j = 0; j < den; ++j) {
      double s = 0.0;
      std::uint64_t num = j;
      for (int i = 0; i < n; ++i) {
        s += f(static_cast<double>(num) / den);
        num = (2 * num) % den;
      }
      lo = std::min(lo, s / n);
      hi = std::max(hi, s / n);
    }
  }
  CHECK(m.min_mean == doctest::Approx(lo).epsilon(1e-13));
  CHECK(m.max_mean == doctest::Approx(hi).epsilon(1e-13));
  CHECK(m.min_mean >= f.bounds().y_min);
  CHECK(m.max_mean <= f.bounds().y_max);
}

TEST_CASE("cycle means extremize further with depth") {
  std::mt19937_64 rng(99);
  const auto f = fixtures::random_class_roof(rng);
  double lo = 1e300, hi = -1e300;
  for (int n = 1; n <= 10; ++n) {
    const auto m = cycle_mean_extremes(f, n);
    CHECK(m.min_mean <= lo);
    CHECK(m.max_mean >= hi);
    lo = m.min_mean;
    hi = m.max_mean;
  }
}

TEST_CASE("rho formula") {
  CHECK(optimal_p(2.5) == 3);
  CHECK(rho_p(3, 2.5, 1.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(optimal_p(1.0) == 1);
  CHECK(optimal_p(2.0 + 1e-12) == 2);
  CHECK(optimal_p(2.0 + 1e-6) == 3);
  CHECK(rho_p(1, 1.0, 0.8) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("constant roof report") {
  const auto c = fixtures::unit_roof();
  const auto rep = exponent_report(c, 8, 16);
  const double h = std::log(2.0);
  CHECK(rep.alpha == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.p_star == 1);
  CHECK(rep.rho[0] == doctest::Approx(h / 2).epsilon(1e-12));
  CHECK(rep.rho_bar[0] == doctest::Approx(0.75 * h).epsilon(1e-12));
  CHECK(rep.rho.size() == 8);
}

TEST_CASE("standard roof report") {
  const auto f = fixtures::standard_roof();
  const auto rep = exponent_report(f, 12, 32);
  CHECK(rep.sandwich_holds());
  CHECK(rep.alpha > 1.0);
  CHECK(rep.alpha <= 2.0);
  CHECK(rep.p_star == 2);
  CHECK(rep.predicted_error_exponent == doctest::Approx(0.875 * rep.h).epsilon(1e-14));
  CHECK(rep.rho[0] == doctest::Approx(rep.chi_max / 2).epsilon(1e-12));
  CHECK(rep.n_used == 12);
  CHECK(rep.N_used == 32);
}

TEST_CASE("report inequalities on random class roofs") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 20; ++i) {
    const auto f = fixtures::random_class_roof(rng);
    REQUIRE(validate_class(f).passed());
    const auto rep = exponent_report(f, 10, 24);
    CHECK(rep.sandwich_holds(1e-6));
    CHECK(rep.alpha >= 1.0 - 1e-9);
    CHECK(std::abs(rep.rho[0] - rep.chi_max / 2) <= 1e-12);
    const int ps = rep.p_star;
    CHECK(rep.rho[ps - 1] <= (1.0 - 1.0 / (2.0 * ps)) * rep.h + 1e-9);
    CHECK(static_cast<int>(rep.rho.size()) >= std::max(8, ps + 2));
    double best = rep.rho[0];
    for (double r : rep.rho) best = std::min(best, r);
    CHECK(best <= rep.rho[ps - 1]);
    for (std::size_t p = 0; p < rep.rho.size(); ++p)
      CHECK(rep.rho_bar[p] == doctest::Approx((rep.rho[p] + rep.h) / 2).epsilon(1e-15));
  }
}
