#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "suspflow/errors.hpp"
#include "suspflow/spectral.hpp"
#include "suspflow/transversality.hpp"

using namespace suspflow;

namespace {

struct Tiny {
  RoofFunction f = fixtures::standard_roof();
  ConeParams cone = make_cone(f, 0.75, 2.0);
  FlowPoint z{0.3141, 0.5};
  double t = 6.0;
  double a = 0.4, b = 1.2;
  int n = 3;
  std::vector<BackwardBranch> B = filter_B(f, z, t, a, b);

  std::vector<oracle::RawBranch> raw() const {
    std::vector<oracle::RawBranch> out;
    for (const auto& w : B) out.push_back(oracle::raw_branch(f, z.x, w.w.x, w.k, n));
    return out;
  }
};

std::set<long> as_set(const ExceptionalSet& e) { return {e.begin(), e.end()}; }

}  // namespace

TEST_CASE("bump and bracket") {
  CHECK(chi_bump(0.5) == 1.0);
  CHECK(chi_bump(3.0) == 0.0);
  CHECK(chi_bump(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  for (double t = 0.9; t < 2.1; t += 0.01) CHECK(chi_bump(t) == doctest::Approx(oracle::chi(t)).epsilon(1e-15));
  CHECK(angle_bracket(0.3) == 1.0);
  CHECK(angle_bracket(-5.0) == 5.0);
  CHECK(angle_bracket(5.0) == 5.0);
  CHECK(angle_bracket(1.5) > 1.0);
  CHECK(angle_bracket(1.5) < 1.5);
  CHECK(angle_bracket(-1.5) == angle_bracket(1.5));
}

TEST_CASE("cone parameters") {
  const auto f = fixtures::standard_roof();
  const auto cone = make_cone(f, 0.75, 2.0);
  CHECK(cone.theta0 == doctest::Approx(8.0 / 0.5).epsilon(1e-15));
  CHECK_THROWS_AS(make_cone(f, 0.4, 2.0), ValidationError);
  CHECK_THROWS_AS(make_cone(f, 0.75, 1.5), ValidationError);
}

TEST_CASE("tuple S and E") {
  Tiny T;
  REQUIRE(T.B.size() >= 2);
  const auto one = tuple_SE(T.B, {0});
  CHECK(one.S == T.B[0].cocycle.S);
  CHECK(one.E == T.B[0].cocycle.E);
  BackwardBranch u, v;
  u.cocycle.E = 4.0;
  v.cocycle.E = 4.0;
  CHECK(tuple_SE({u, v}, {0, 1}).E == 2.0);
  const auto c = fixtures::unit_roof();
  const auto Bc = backward_orbit(c, FlowPoint{0.2, 0.1}, 4.0);
  CHECK(tuple_SE(Bc, {0, 1, 2}).S == 0.0);
}

TEST_CASE("W_r") {
  const ConeParams cone{0.75, 2.0, 3.0};
  CHECK(W_r(0.4, 8.0, cone, 0.8, 2.0) == 1.0);
  // E |xi - S eta| / (theta0 <eta>) = 5 at eta = 2.
  CHECK(W_r(0.0, 1.0, cone, 20.0, 2.0) == doctest::Approx(125.0).epsilon(1e-14));
  CHECK(W_r(0.0, 3.0, cone, 11.0, 4.0) == doctest::Approx(W_r(0.0, 3.0, cone, 5.5, 2.0)).epsilon(1e-15));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    const double S = U(rng) / 10, E = std::exp(std::abs(U(rng))), xi = U(rng);
    const double w = W_r(S, E, cone, xi, 2.0);
    CHECK(w >= 1.0);
    const bool in_cone = E * std::abs(xi - 2 * S) <= cone.theta0 * 2.0;
    if (in_cone) CHECK(w == 1.0);
    if (E * std::abs(xi - 2 * S) > cone.theta0 * 2.0 * 1.1) CHECK(w > 1.0);
  }
  CHECK_THROWS_AS(W_r(0.0, 0.0, cone, 1.0, 2.0), ValidationError);
}

TEST_CASE("filter_B") {
  Tiny T;
  const auto all = backward_orbit(T.f, T.z, T.t);
  const double chib_min = std::log(2.0) / 1.25, chib_max = std::log(2.0) / 0.75;
  CHECK(filter_B(all, T.t, chib_min * 0.99, chib_max * 1.01).size() == all.size());
  CHECK(filter_B(all, T.t, 0.01, std::log(std::pow(2.0, std::floor(T.t / 1.25)) * 0.9) / T.t).empty());
  // Disjoint J covering the sandwich partition the branch set.
  const std::vector<double> cuts{chib_min * 0.99, 0.6, 0.7, 0.8, chib_max * 1.01};
  std::size_t total = 0;
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = i == 0 ? cuts[i] : std::nextafter(cuts[i], 10.0);
    for (const auto& w : filter_B(all, T.t, lo, cuts[i + 1])) {
      CHECK(seen.insert(w.j * 64 + w.k).second);
      ++total;
    }
  }
  CHECK(total == all.size());
}

TEST_CASE("sum_star basics") {
  Tiny T;
  std::vector<std::uint64_t> every;
  for (std::uint64_t k = 0; k < 8; ++k) every.push_back(k);
  bool all_keyed = true;
  for (const auto& w : T.B) all_keyed = all_keyed && exclusion_key(w, T.n, 2).has_value();
  REQUIRE(all_keyed);
  CHECK(sum_star(T.B, 2, T.cone, 0.3, every, T.n, 2) == 0.0);

  const auto c = fixtures::unit_roof();
  const auto cone = make_cone(c, 0.75, 5.0);
  const auto Bc = filter_B(c, FlowPoint{0.2, 0.1}, 6.0, 0.1, 2.0);
  CHECK(sum_star(Bc, 1, cone, 0.0, {}, 3, 2) == doctest::Approx(static_cast<double>(Bc.size())).epsilon(1e-15));

  SumStarOptions tight;
  tight.max_tuples = 10;
  CHECK_THROWS_AS(sum_star(T.B, 2, T.cone, 0.0, {}, T.n, 2, tight), BudgetError);
}

TEST_CASE("sum_star equals the naive recomputation") {
  Tiny T;
  REQUIRE(T.B.size() <= 64);
  REQUIRE(T.B.size() >= 8);
  const auto raw = T.raw();
  for (std::size_t i = 0; i < T.B.size(); ++i) {
    CHECK(T.B[i].cocycle.S == doctest::Approx(raw[i].S).epsilon(1e-12));
    CHECK(static_cast<long>(*exclusion_key(T.B[i], T.n, 2)) == raw[i].key);
  }
  std::mt19937_64 rng(12);
  for (int p : {1, 2}) {
    for (int trial = 0; trial < 10; ++trial) {
      ExceptionalSet E;
      for (std::uint64_t k = 0; k < 8; ++k)
        if (rng() % 3 == 0) E.push_back(k);
      const double xi = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
      long tuples = 0;
      const double want = oracle::naive_sum_star(raw, p, T.cone.theta0, T.cone.r, xi, as_set(E), &tuples);
      const double got = sum_star(T.B, p, T.cone, xi, E, T.n, 2);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("exclusion is monotone along random chains") {
  Tiny T;
  std::mt19937_64 rng(5);
  for (int chain = 0; chain < 50; ++chain) {
    std::vector<std::uint64_t> order{0, 1, 2, 3, 4, 5, 6, 7};
    std::shuffle(order.begin(), order.end(), rng);
    const int p = 1 + chain % 2;
    const double xi = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    ExceptionalSet E;
    double prev = sum_star(T.B, p, T.cone, xi, E, T.n, 2);
    for (auto k : order) {
      E.push_back(k);
      const double cur = sum_star(T.B, p, T.cone, xi, E, T.n, 2);
      CHECK(cur <= prev);
      prev = cur;
    }
  }
}

TEST_CASE("relabeling the branch list changes nothing") {
  Tiny T;
  auto shuffled = T.B;
  std::mt19937_64 rng(3);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const ExceptionalSet E{1, 6};
  for (int p : {1, 2}) {
    CHECK(sum_star(shuffled, p, T.cone, 0.7, E, T.n, 2) ==
          doctest::Approx(sum_star(T.B, p, T.cone, 0.7, E, T.n, 2)).epsilon(1e-13));
    CHECK(sup_sum_star(shuffled, p, T.cone, E, T.n, 2).value ==
          doctest::Approx(sup_sum_star(T.B, p, T.cone, E, T.n, 2).value).epsilon(1e-13));
  }
  const int q = 2;
  CHECK(exceptional_set_greedy(T.f, T.z, T.t, T.a, shuffled, 2, q, T.cone, T.n) ==
        exceptional_set_greedy(T.f, T.z, T.t, T.a, T.B, 2, q, T.cone, T.n));
}

TEST_CASE("sup over the xi grid") {
  Tiny T;
  for (int p : {1, 2}) {
    const auto grid = xi_grid(T.B, p, T.cone);
    CHECK(grid.size() == 512);
    CHECK(grid.front() <= -p * T.cone.theta0);
    CHECK(grid.back() >= p * T.cone.theta0);
    const auto raw = T.raw();
    double best = 0.0;
    for (double xi : grid) best = std::max(best, oracle::naive_sum_star(raw, p, T.cone.theta0, T.cone.r, xi, {}));
    const auto sup = sup_sum_star(T.B, p, T.cone, {}, T.n, 2);
    CHECK(sup.value >= best * (1 - 1e-12));
    CHECK(sup.value == doctest::Approx(oracle::naive_sum_star(raw, p, T.cone.theta0, T.cone.r, sup.xi, {})).epsilon(1e-12));
  }
}

TEST_CASE("transversal branches separate at p = 1") {
  const ConeParams cone{0.75, 2.0, 3.0};
  // Slopes further apart than 4 theta0 / E leave at most one term near 1.
  std::vector<BackwardBranch> sep(6);
  for (std::size_t i = 0; i < sep.size(); ++i) {
    sep[i].cocycle.E = 1000.0;
    sep[i].cocycle.S = 0.05 * static_cast<double>(i) - 0.1;
  }
  REQUIRE(0.05 > 4 * cone.theta0 / 1000.0);
  for (double xi : xi_grid(sep, 1, cone)) {
    int big = 0;
    for (const auto& w : sep)
      if (1.0 / W_r(w.cocycle.S, w.cocycle.E, cone, xi, 2.0) > std::pow(0.5, cone.r)) ++big;
    CHECK(big <= 1);
  }
}

TEST_CASE("greedy exceptional set") {
  Tiny T;
  for (int p : {1, 2})
    for (int q : {1, 2, 3}) {
      const auto E = exceptional_set_greedy(T.f, T.z, T.t, T.a, T.B, p, q, T.cone, T.n);
      CHECK(E.size() <= static_cast<std::size_t>(p * q));
      CHECK(std::is_sorted(E.begin(), E.end()));
      for (auto k : E) CHECK(k < 8);
    }
  // Saturation: q large enough covers every point that carries a branch.
  const auto E = exceptional_set_greedy(T.f, T.z, T.t, T.a, T.B, 1, 8, T.cone, T.n);
  std::set<std::uint64_t> keys;
  for (const auto& w : T.B) keys.insert(*exclusion_key(w, T.n, 2));
  CHECK(std::set<std::uint64_t>(E.begin(), E.end()) == keys);
  CHECK_THROWS_AS(exceptional_set_greedy(T.f, T.z, T.t, T.a, T.B, 2, 5, T.cone, T.n), ValidationError);

  // Constant roof: all scores tie, so the leading tuples in canonical order win.
  const auto c = fixtures::unit_roof();
  const auto cone = make_cone(c, 0.75, 5.0);
  const FlowPoint z{0.2, 0.1};
  const auto Bc = filter_B(c, z, 6.0, 0.1, 2.0);
  const auto scores = tuple_scores(c, z, 6.0, 0.1, Bc, 1, cone, 0.0, 3);
  for (std::size_t i = 1; i < scores.size(); ++i) {
    CHECK(scores[i].score == scores[0].score);
    CHECK(scores[i - 1].keys < scores[i].keys);
  }
  CHECK(exceptional_set_greedy(c, z, 6.0, 0.1, Bc, 1, 3, cone, 3) == ExceptionalSet{0, 1, 2});
}

TEST_CASE("Per_delta membership") {
  CHECK(per_delta_member(2, 2, 1e-15, 1.0 / 3.0));
  CHECK(per_delta_member(2, 3, 1.0 / 13.0, 0.123));
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double x = U(rng);
    CHECK(per_delta_member(2, 4, 1.0 / 30.0 + 1e-12, x));
  }
  const double d = oracle::distance_to_periodic(2, 3, 0.123456);
  CHECK(per_delta_member(2, 3, 1e-4, 0.123456) == (d < 1e-4));
  for (double delta : {1e-4, 1e-3, 0.01, 0.02, 0.05}) {
    for (int i = 0; i < 50; ++i) {
      const double x = U(rng);
      CHECK(per_delta_member(3, 4, delta, x) == (oracle::distance_to_periodic(3, 4, x) < delta));
    }
  }
}

TEST_CASE("generic condition report") {
  CHECK(generic_threshold(0.7, 10.0, 0.5, 0.5, 1, 0.1) == doctest::Approx(std::exp(0.3 * 10)).epsilon(1e-14));
  CHECK(generic_threshold(0.3, 10.0, 0.5, 0.5, 1, 0.1) == doctest::Approx(std::exp(0.1 * 10)).epsilon(1e-14));

  Tiny T;
  const std::vector<FlowPoint> zs{T.z, FlowPoint{1.0 / 3.0, 0.2}};
  // q = ceil(10 a / eps) = 14 components must fit in tau^{-4}(x).
  const auto reps = check_generic_condition(T.f, zs, T.t, T.a, T.b, 1, 0.3, 4, T.cone);
  REQUIRE(reps.size() == 2);
  CHECK_FALSE(reps[0].skipped);
  CHECK(reps[1].skipped);
  CHECK(!reps[1].notice.empty());
  const auto& r = reps[0];
  CHECK(r.q == 14);
  CHECK(r.branch_count == T.B.size());
  CHECK(r.exceptional.size() <= static_cast<std::size_t>(r.p * r.q));
  CHECK(r.threshold == generic_threshold(entropy(T.f, 32), T.t, T.a, T.b, 1, 0.3));
  const auto sup = sup_sum_star(T.B, 1, T.cone, r.exceptional, 4, 2);
  CHECK(r.sup_value == sup.value);
  CHECK(r.pass == (r.sup_value <= r.threshold));
  CHECK(r.log_margin == doctest::Approx(std::log(r.threshold / r.sup_value)).epsilon(1e-12));
  CHECK_THROWS_AS(check_generic_condition(T.f, zs, T.t, T.a, T.b, 1, 0.5, T.n, T.cone), ValidationError);
}
