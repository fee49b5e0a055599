#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "suspflow/errors.hpp"
#include "suspflow/semiflow.hpp"
#include "suspflow/spectral.hpp"

using namespace suspflow;

namespace {

FlowPoint random_point(const RoofFunction& f, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double x = U(rng);
  return FlowPoint{x, U(rng) * f(x)};
}

}  // namespace

TEST_CASE("flow basics") {
  const auto f = fixtures::standard_roof();
  const FlowPoint z{0.3, 0.4};
  const FlowPoint z0 = flow(f, z, 0.0);
  CHECK(z0.x == z.x);
  CHECK(z0.y == z.y);
  const FlowPoint z1 = flow(f, z, f(0.3) - 0.4);
  CHECK(z1.x == doctest::Approx(f.tau(0.3)).epsilon(1e-15));
  CHECK(z1.y == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("flow is a semigroup") {
  const auto f = fixtures::standard_roof();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> T(0.0, 8.0);
  for (int i = 0; i < 200; ++i) {
    const FlowPoint z = random_point(f, rng);
    const double s = T(rng), t = T(rng);
    const FlowPoint a = flow(f, z, s + t);
    const FlowPoint b = flow(f, flow(f, z, s), t);
    CHECK(flow_distance(f, a, b) < 1e-10);
  }
}

TEST_CASE("cocycle") {
  const auto f = fixtures::standard_roof();
  const CocycleData none = cocycle(f, FlowPoint{0.3, 0.1}, 0.5);
  CHECK(none.E == 1.0);
  CHECK(none.F == 0.0);
  CHECK(none.S == 0.0);

  const auto c = fixtures::unit_roof();
  const CocycleData cc = cocycle(c, FlowPoint{0.3, 0.2}, 5.0);
  CHECK(cc.F == 0.0);
  CHECK(cc.S == 0.0);
  CHECK(cc.E == 32.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> T(0.0, 6.0);
  for (int i = 0; i < 300; ++i) {
    const FlowPoint z = random_point(f, rng);
    const double s = T(rng), t = T(rng);
    const CocycleData ab = cocycle(f, z, s + t);
    const CocycleData a = cocycle(f, z, s);
    const CocycleData b = cocycle(f, flow(f, z, s), t);
    CHECK(ab.E == b.E * a.E);
    CHECK(std::abs(ab.F - (b.F * a.E + a.F)) <= 1e-9 * std::max(1.0, std::abs(ab.F)));
    CHECK(ab.S == doctest::Approx(-ab.F / ab.E).epsilon(1e-15));
  }
}

TEST_CASE("backward orbit of the constant roof") {
  const auto c = fixtures::unit_roof();
  const FlowPoint z{0.37, 0.25};
  const double t = 3.6;
  const auto br = backward_orbit(c, z, t);
  // k = min{d : d >= t - y} = 4.
  REQUIRE(br.size() == 16);
  for (const auto& b : br) {
    CHECK(b.k == 4);
    CHECK(b.cocycle.E == 16.0);
    const auto s = crossing_times(c, z, b, t);
    REQUIRE(s.size() == 4);
    for (int j = 0; j < 4; ++j) CHECK(s[j] == doctest::Approx(t - z.y - j).epsilon(1e-14));
  }
  CHECK(count_backward(c, z, t) == 16);
}

TEST_CASE("backward branches flow forward to z") {
  const auto f = fixtures::standard_roof();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> T(2.0, 9.0);
  for (int i = 0; i < 40; ++i) {
    const FlowPoint z = random_point(f, rng);
    const double t = T(rng);
    const auto br = backward_orbit(f, z, t);
    CHECK(br.size() == count_backward(f, z, t));
    for (const auto& b : br) {
      CHECK(flow_distance(f, flow(f, b.w, t), z) < 1e-10);
      CHECK(b.k >= std::floor(t / 1.25));
      CHECK(b.k <= std::ceil(t / 0.75));
      const auto s = b.crossing_times;
      REQUIRE(static_cast<int>(s.size()) == b.k);
      for (std::size_t j = 0; j + 1 < s.size(); ++j) CHECK(s[j] > s[j + 1]);
      if (b.k == 1) CHECK(s[0] == doctest::Approx(t - z.y).epsilon(1e-14));
      for (double sj : s) {
        CHECK(sj > 0.0);
        CHECK(sj <= t);
        const FlowPoint p = flow(f, b.w, sj);
        CHECK(std::min(p.y, f(p.x) - p.y) < 1e-10);
      }
    }
  }
}

TEST_CASE("backward branch count at t = 10 lies in the crossing bounds") {
  const auto f = fixtures::standard_roof();
  const auto n = count_backward(f, FlowPoint{0.2, 0.1}, 10.0);
  CHECK(n >= (1u << 8));
  CHECK(n <= (1u << 13));
}

TEST_CASE("crossing times reject foreign branches") {
  const auto f = fixtures::standard_roof();
  const FlowPoint z{0.2, 0.3};
  auto br = backward_orbit(f, z, 4.0);
  REQUIRE(!br.empty());
  CHECK_THROWS_AS(crossing_times(f, FlowPoint{0.6, 0.3}, br.front(), 4.0), ValidationError);
  CHECK_THROWS_AS(crossing_times(f, z, br.front(), 4.5), ValidationError);
}

TEST_CASE("backward enumeration equals a grid scan of candidate preimages") {
  const auto f = fixtures::standard_roof();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> T(1.0, 6.0);
  for (int trial = 0; trial < 6; ++trial) {
    const FlowPoint z = random_point(f, rng);
    const double t = T(rng);
    // Scan base coordinates at step 1e-4 for each crossing count k, refine to
    // the exact preimage of x under tau^k, and keep those whose height lands
    // in [0, f).
    std::vector<FlowPoint> found;
    if (z.y >= t) found.push_back(FlowPoint{z.x, z.y - t});
    for (int k = 1; k <= static_cast<int>(std::ceil(t / 0.75)); ++k) {
      const double M = std::pow(2.0, k);
      std::set<long> seen;
      for (int g = 0; g < 10000; ++g) {
        const double xg = g * 1e-4;
        const long m = std::lround(M * xg - z.x);
        const double xr = (z.x + m) / M;
        if (xr < 0.0 || xr >= 1.0 || !seen.insert(m).second) continue;
        const double y = z.y + birkhoff_sum(f, xr, k) - t;
        if (y >= 0.0 && y < f(xr)) found.push_back(FlowPoint{xr, y});
      }
    }
    const auto br = backward_orbit(f, z, t);
    REQUIRE(br.size() == found.size());
    for (const auto& p : found) {
      bool match = false;
      for (const auto& b : br)
        if (std::abs(b.w.x - p.x) < 1e-6 && std::abs(b.w.y - p.y) < 1e-6) match = true;
      CHECK(match);
    }
  }
}

TEST_CASE("cone invariance of S along backward branches") {
  const auto f = fixtures::standard_roof();
  const double gamma0 = 0.75;
  const double theta0 = f.bounds().kappa0 / (gamma0 * f.ell() - 1.0);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    const auto br = backward_orbit(f, random_point(f, rng), 7.0);
    for (const auto& b : br)
      if (b.k >= 1) CHECK(std::abs(b.cocycle.S) <= gamma0 * theta0);
  }
}

TEST_CASE("backward counting rate is close to the entropy") {
  const auto f = fixtures::standard_roof();
  const double h = entropy(f, 32);
  for (double t : {15.0, 18.0, 21.0}) {
    const double n = static_cast<double>(count_backward(f, FlowPoint{0.3, 0.2}, t));
    CHECK(std::abs(std::log(n) / t - h) <= 0.2);
  }
}
