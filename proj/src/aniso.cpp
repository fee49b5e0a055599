#include "suspflow/aniso.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>

#include "suspflow/errors.hpp"
#include "suspflow/numerics.hpp"
#include "suspflow/parallel.hpp"
#include "suspflow/transversality.hpp"

namespace suspflow {

using cplx = std::complex<double>;

double lp_chi_m(int m, double t) {
  if (m < 0) throw ValidationError("lp_chi_m: m must be >= 0");
  const double a = std::abs(t);
  if (m == 0) return chi_bump(a);
  return chi_bump(std::ldexp(a, -m)) - chi_bump(std::ldexp(a, 1 - m));
}

double rho_n(int n, double x) {
  if (n < 0) return rho_n(-n, -x);
  const double root = std::sqrt(std::abs(x));
  if (n == 0) return chi_bump(root + 1.0);
  const double u = x < 0.0 ? -root : root;
  return chi_bump(u - n + 1.0) - chi_bump(u - n + 2.0);
}

Interval rho_support(int n) {
  if (n == 0) return {-1.0, 1.0};
  const double a = std::abs(n);
  const double lo = (a - 1) * (a - 1), hi = (a + 1) * (a + 1);
  return n > 0 ? Interval{lo, hi} : Interval{-hi, -lo};
}

double chi_nm(int n, int m, double xi, double eta, double theta0) {
  const double bn = angle_bracket(n);
  return rho_n(n, eta) * lp_chi_m(m, xi / (theta0 * bn * bn));
}

double chi_nm_SE(int n, int m, double S, double E, double xi, double eta, double theta0) {
  return chi_nm(n, m, E * xi + S * E * eta, eta, theta0);
}

namespace {

double dft_frequency(int k, int count, double length) {
  const int kk = k < (count + 1) / 2 ? k : k - count;
  return kTwoPi * kk / length;
}

std::mutex planner_mutex;

struct FftwBuffer {
  fftw_complex* data;
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  cplx* get() { return reinterpret_cast<cplx*>(data); }
};

struct Plan2D {
  fftw_plan plan;
  Plan2D(int nx, int ny, int sign) {
    FftwBuffer tmp(static_cast<std::size_t>(nx) * ny);
    std::lock_guard lock(planner_mutex);
    plan = fftw_plan_dft_2d(nx, ny, tmp.data, tmp.data, sign, FFTW_ESTIMATE);
    if (!plan) throw ValidationError("fftw: plan creation failed");
  }
  ~Plan2D() {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  Plan2D(const Plan2D&) = delete;
  Plan2D& operator=(const Plan2D&) = delete;
  void run(FftwBuffer& buf) const { fftw_execute_dft(plan, buf.data, buf.data); }
};

}  // namespace

double Grid2D::xi(int k) const { return dft_frequency(k, nx, Lx); }
double Grid2D::eta(int k) const { return dft_frequency(k, ny, Ly); }
double Grid2D::xi_nyquist() const { return std::numbers::pi * nx / Lx; }
double Grid2D::eta_nyquist() const { return std::numbers::pi * ny / Ly; }

double l2_norm(const std::vector<cplx>& u, const Grid2D& grid) {
  CompensatedSum<> acc;
  for (const auto& v : u) acc.add(std::norm(v));
  return std::sqrt(acc.value() * (grid.Lx / grid.nx) * (grid.Ly / grid.ny));
}

NormResult brp_norm(const std::vector<cplx>& u, const PartitionParams& params, const Frame& frame,
                    int workers) {
  const Grid2D& g = params.grid;
  const std::size_t total = static_cast<std::size_t>(g.nx) * g.ny;
  if (g.nx < 2 || g.ny < 2 || !(g.Lx > 0.0) || !(g.Ly > 0.0))
    throw ValidationError("brp_norm: invalid grid");
  if (u.size() != total) throw ValidationError("brp_norm: sample count does not match the grid");
  if (params.p < 1) throw ValidationError("brp_norm: p must be >= 1");
  if (!(params.theta0 > 0.0) || !(frame.E > 0.0))
    throw ValidationError("brp_norm: theta0 and E must be positive");

  NormResult out;
  Plan2D forward(g.nx, g.ny, FFTW_FORWARD), backward(g.nx, g.ny, FFTW_BACKWARD);
  FftwBuffer spectrum(total);
  std::copy(u.begin(), u.end(), spectrum.get());
  forward.run(spectrum);

  {
    const double xi_edge = 0.9 * g.xi_nyquist(), eta_edge = 0.9 * g.eta_nyquist();
    double all = 0.0, edge = 0.0;
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        const double w = std::norm(spectrum.get()[static_cast<std::size_t>(i) * g.ny + j]);
        all += w;
        if (std::abs(g.xi(i)) > xi_edge || std::abs(g.eta(j)) > eta_edge) edge += w;
      }
    if (all > 0.0 && edge > 1e-10 * all) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "spectral mass fraction %.3g within 10%% of the Nyquist boundary", edge / all);
      out.warnings.push_back(buf);
    }
  }

  // Cells that can meet the frequency box.
  const double eta_max = g.eta_nyquist();
  const double xi_max = frame.E * g.xi_nyquist() + std::abs(frame.S) * frame.E * eta_max;
  const int n_lim = static_cast<int>(std::ceil(std::sqrt(eta_max))) + 2;
  std::vector<std::pair<int, int>> cells;
  for (int n = -n_lim; n <= n_lim; ++n) {
    const double bn = angle_bracket(n);
    const double scale = params.theta0 * bn * bn;
    for (int m = 0; m == 0 || std::ldexp(scale, m - 1) <= xi_max; ++m) cells.emplace_back(n, m);
  }

  const double cell_area = (g.Lx / g.nx) * (g.Ly / g.ny);
  const int two_p = 2 * params.p;
  std::vector<double> norms(cells.size(), -1.0);
  parallel_for(cells.size(), workers, [&](std::size_t c) {
    const auto [n, m] = cells[c];
    FftwBuffer buf(total);
    cplx* v = buf.get();
    const cplx* s = spectrum.get();
    bool any = false;
    for (int i = 0; i < g.nx; ++i) {
      const double xi = g.xi(i);
      for (int j = 0; j < g.ny; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * g.ny + j;
        const double w =
            chi_nm_SE(n, m, frame.S, frame.E, xi, g.eta(j), params.theta0);
        if (w != 0.0) any = true;
        v[idx] = w * s[idx];
      }
    }
    if (!any) return;
    backward.run(buf);
    CompensatedSum<> acc;
    const double inv = 1.0 / static_cast<double>(total);
    for (std::size_t idx = 0; idx < total; ++idx) acc.add(std::pow(std::abs(v[idx]) * inv, two_p));
    norms[c] = std::pow(acc.value() * cell_area, 1.0 / two_p);
  });

  CompensatedSum<> acc;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (norms[c] < 0.0) continue;
    out.cells.push_back(CellNorm{cells[c].first, cells[c].second, norms[c]});
    acc.add(std::pow(std::pow(2.0, params.r * cells[c].second) * norms[c],
                     two_p));
  }
  out.value = std::pow(acc.value(), 1.0 / two_p);
  return out;
}

FxnmReport fxnm_decay_check(int n, int m, double nu, double theta0, int resolution) {
  if (m < 0) throw ValidationError("fxnm_decay_check: m must be >= 0");
  if (resolution < 64 || resolution % 2 != 0)
    throw ValidationError("fxnm_decay_check: resolution must be even and >= 64");
  const int M = resolution;
  const double bn = angle_bracket(n);
  // Affine rescaling of the cell onto [-1, 1]^2; the L^1 norm of the kernel is
  // unchanged and the envelope is evaluated in the original coordinates.
  const double Xi = std::ldexp(theta0 * bn * bn, m + 1);
  const Interval I = rho_support(n);
  const double c = 0.5 * (I.lo + I.hi), H = 0.5 * (I.hi - I.lo);
  const double dk = 4.0 / M;               // rescaled frequency box [-2, 2)
  const double dx = kTwoPi / (M * dk);     // rescaled spatial spacing

  FftwBuffer buf(static_cast<std::size_t>(M) * M);
  cplx* v = buf.get();
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      const double xs = (a - M / 2) * dk, ys = (b - M / 2) * dk;
      const double sign = ((a + b) % 2 == 0) ? 1.0 : -1.0;
      v[static_cast<std::size_t>(a) * M + b] = sign * chi_nm(n, m, Xi * xs, c + H * ys, theta0);
    }
  {
    Plan2D backward(M, M, FFTW_BACKWARD);
    backward.run(buf);
  }
  const double out_sign = ((M / 2) % 2 == 0) ? 1.0 : -1.0;
  const double norm = dk * dk / (kTwoPi * kTwoPi);
  double peak = 0.0;
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      cplx& w = v[static_cast<std::size_t>(a) * M + b];
      w *= out_sign * (((a + b) % 2 == 0) ? 1.0 : -1.0) * norm;
      peak = std::max(peak, std::abs(w));
    }

  FxnmReport rep;
  rep.n = n;
  rep.m = m;
  rep.nu = nu;
  rep.resolution = M;
  CompensatedSum<> l1;
  const double scale_x = std::ldexp(bn * bn, m), pref = std::ldexp(bn * bn * bn, m);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      const cplx w = v[static_cast<std::size_t>(a) * M + b];
      l1.add(std::abs(w) * dx * dx);
      const double x = (a - M / 2) * dx / Xi, y = (b - M / 2) * dx / H;
      const double env = pref * std::pow(angle_bracket(scale_x * std::abs(x)), -nu) *
                         std::pow(angle_bracket(bn * std::abs(y)), -nu);
      // |kernel(x, y)| = Xi H |rescaled kernel|.
      rep.envelope_C = std::max(rep.envelope_C, Xi * H * std::abs(w) / env);
      rep.max_imag = std::max(rep.max_imag, std::abs(w.imag()));
      if (a > 0 && b > 0) {
        const cplx mirror = v[static_cast<std::size_t>(M - a) * M + (M - b)];
        rep.max_odd = std::max(rep.max_odd, std::abs(w - mirror));
      }
    }
  rep.l1 = l1.value();
  if (peak > 0.0) {
    rep.max_imag /= peak;
    rep.max_odd /= peak;
  }
  return rep;
}

}  // namespace suspflow
