#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "suspflow/aniso.hpp"
#include "suspflow/transversality.hpp"

using namespace suspflow;
using cplx = std::complex<double>;

namespace {

std::vector<cplx> sample(const Grid2D& g, const std::function<cplx(double, double)>& fn) {
  std::vector<cplx> u(static_cast<std::size_t>(g.nx) * g.ny);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) u[static_cast<std::size_t>(i) * g.ny + j] = fn(g.x(i), g.y(j));
  return u;
}

cplx gabor(double x, double y, double sx, double sy, double xi0, double eta0) {
  return std::exp(-0.5 * (x * x / (sx * sx) + y * y / (sy * sy))) * std::polar(1.0, xi0 * x + eta0 * y);
}

}  // namespace

TEST_CASE("dyadic partition") {
  CHECK(lp_chi_m(0, 0.5) == 1.0);
  for (int M : {0, 3, 7})
    for (double t = -std::ldexp(1.0, M); t <= std::ldexp(1.0, M); t += std::ldexp(1.0, M) / 97) {
      double s = 0.0;
      for (int m = 0; m <= M; ++m) s += lp_chi_m(m, t);
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  for (int m = 1; m <= 6; ++m)
    for (double t = 0.0; t < 300.0; t += 0.173) {
      const bool inside = t >= std::ldexp(1.0, m - 1) && t <= std::ldexp(1.0, m + 1);
      if (!inside) CHECK(lp_chi_m(m, t) == 0.0);
      CHECK(lp_chi_m(m, t) >= 0.0);
      CHECK(lp_chi_m(m, -t) == lp_chi_m(m, t));
    }
}

TEST_CASE("eta partition") {
  for (int N : {2, 4, 8})
    for (double x = -(N - 1.0) * (N - 1.0); x <= (N - 1.0) * (N - 1.0); x += 0.0371) {
      double s = 0.0;
      for (int n = -N; n <= N; ++n) s += rho_n(n, x);
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  for (int n = -8; n <= 8; ++n) {
    const Interval I = rho_support(n);
    for (double x = -90.0; x <= 90.0; x += 0.0173)
      if (x < I.lo || x > I.hi) CHECK(rho_n(n, x) == 0.0);
    if (std::abs(n) >= 2) {
      const double at = (n > 0 ? 1.0 : -1.0) * n * n;
      // Direct two-chi evaluation at u = |n|.
      CHECK(rho_n(n, at) == doctest::Approx(oracle::chi(1.0) - oracle::chi(2.0)).epsilon(1e-15));
      CHECK(rho_n(n, at) == 1.0);
    }
  }
  CHECK(rho_support(0).lo == -1.0);
  CHECK(rho_support(0).hi == 1.0);
}

TEST_CASE("cell partition") {
  const double theta0 = 0.7;
  const int N = 6, M = 5;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> X(-theta0 * std::ldexp(1.0, M), theta0 * std::ldexp(1.0, M));
  std::uniform_real_distribution<double> Y(-(N - 1.0) * (N - 1.0), (N - 1.0) * (N - 1.0));
  for (int i = 0; i < 400; ++i) {
    const double xi = X(rng), eta = Y(rng);
    double s = 0.0;
    for (int n = -N; n <= N; ++n)
      for (int m = 0; m <= M; ++m) s += chi_nm(n, m, xi, eta, theta0);
    CHECK(std::abs(s - 1.0) <= 1e-12);
    for (int n = -N; n <= N; ++n)
      for (int m = 0; m <= M; ++m)
        CHECK(chi_nm_SE(n, m, 0.0, 1.0, xi, eta, theta0) == chi_nm(n, m, xi, eta, theta0));
  }
  // Support box for m >= 1.
  for (int n : {-3, 0, 2, 5})
    for (int m = 1; m <= 4; ++m) {
      const double bn = angle_bracket(n);
      const Interval I = rho_support(n);
      for (int i = 0; i < 2000; ++i) {
        const double xi = X(rng) * 4, eta = Y(rng);
        if (chi_nm(n, m, xi, eta, theta0) == 0.0) continue;
        CHECK(eta >= I.lo);
        CHECK(eta <= I.hi);
        CHECK(std::abs(xi) >= std::ldexp(theta0 * bn * bn, m - 1));
        CHECK(std::abs(xi) <= std::ldexp(theta0 * bn * bn, m + 1));
      }
    }
}

TEST_CASE("norm of zero and of a single Fourier mode") {
  PartitionParams P{0.5, 1.5, 2, Grid2D{32, 64, 32.0, 64.0}};
  const auto zero = std::vector<cplx>(32 * 64, 0.0);
  CHECK(brp_norm(zero, P).value == 0.0);

  const int kx = 3, ky = 9;
  const double xi = P.grid.xi(kx), eta = P.grid.eta(ky);
  const auto u = sample(P.grid, [&](double x, double y) { return std::polar(1.0, xi * x + eta * y); });
  double acc = 0.0;
  for (int n = -10; n <= 10; ++n)
    for (int m = 0; m <= 12; ++m) {
      const double w = std::ldexp(1.0, 0) * std::pow(2.0, P.r * m) * std::abs(chi_nm(n, m, xi, eta, P.theta0));
      acc += std::pow(w, 2 * P.p);
    }
  const double want = std::pow(acc * P.grid.Lx * P.grid.Ly, 1.0 / (2 * P.p));
  const auto res = brp_norm(u, P);
  CHECK(res.value == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("norm homogeneity and worker independence") {
  PartitionParams P{0.5, 2.0, 2, Grid2D{64, 128, 64.0, 256.0}};
  const auto u = sample(P.grid, [](double x, double y) { return gabor(x, y, 3.0, 20.0, 1.0, 0.5); });
  const cplx c(2.0, -3.0);
  std::vector<cplx> cu(u);
  for (auto& v : cu) v *= c;
  const auto a = brp_norm(u, P);
  const auto b = brp_norm(cu, P);
  CHECK(b.value == doctest::Approx(std::abs(c) * a.value).epsilon(1e-12));
  const auto a4 = brp_norm(u, P, {}, 4);
  CHECK(a4.value == a.value);
  REQUIRE(a4.cells.size() == a.cells.size());
  CHECK(a.warnings.empty());
}

TEST_CASE("Plancherel agreement at r = 0, p = 1") {
  // Spectrum concentrated where a single cell multiplier is close to 1.
  PartitionParams P{0.5, 0.0, 1, Grid2D{512, 512, 128.0, 128.0}};
  for (auto [n, m] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{-2, 0}}) {
    const double bn = angle_bracket(n);
    const double xi0 = m == 0 ? 0.0 : std::ldexp(P.theta0 * bn * bn, m);
    const double eta0 = (n > 0 ? 1.0 : -1.0) * n * n;
    const auto u = sample(P.grid, [&](double x, double y) { return gabor(x, y, 8.0, 8.0, xi0, eta0); });
    const auto res = brp_norm(u, P);
    CHECK(res.warnings.empty());
    CHECK(res.value == doctest::Approx(l2_norm(u, P.grid)).epsilon(0.02));
  }
}

TEST_CASE("frame consistency") {
  // The frame stretches cell kernels in x; the box must hold them without wrapping.
  const Grid2D g{512, 256, 256.0, 256.0};
  const double S = 0.1, E = 2.0;
  for (int p : {1, 2}) {
    PartitionParams P{0.5, 1.0, p, g};
    auto u_fn = [](double x, double y) { return gabor(x, y, 6.0, 30.0, 0.8, 0.6); };
    const auto u = sample(g, u_fn);
    const auto v = sample(g, [&](double x, double y) { return u_fn(E * x, S * E * x + y); });
    const double lhs = std::pow(E, 1.0 / (2 * p)) * brp_norm(v, P).value;
    const double rhs = brp_norm(u, P, Frame{S, E}).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
  }
}

TEST_CASE("Nyquist warning") {
  PartitionParams P{0.5, 0.0, 1, Grid2D{32, 32, 32.0, 32.0}};
  const auto u = sample(P.grid, [&](double x, double y) {
    return std::polar(1.0, P.grid.xi(15) * x + P.grid.eta(3) * y);
  });
  CHECK(!brp_norm(u, P).warnings.empty());
}

TEST_CASE("cell kernels are uniformly bounded in L1") {
  double lo = 1e300, hi = 0.0;
  for (int n = -8; n <= 8; ++n)
    for (int m = 0; m <= 6; ++m) {
      const auto rep = fxnm_decay_check(n, m, 2.0, 0.5);
      CHECK(std::isfinite(rep.envelope_C));
      CHECK(rep.envelope_C > 0.0);
      lo = std::min(lo, rep.l1);
      hi = std::max(hi, rep.l1);
    }
  CHECK(hi / lo < 10.0);
  const auto base = fxnm_decay_check(0, 0, 2.0, 0.5);
  CHECK(base.max_imag < 1e-10);
  CHECK(base.max_odd < 1e-10);
}
