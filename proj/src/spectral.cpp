#include "suspflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Eigenvalues>

#include "suspflow/errors.hpp"
#include "suspflow/numerics.hpp"
#include "suspflow/orbits.hpp"
#include "suspflow/parallel.hpp"

namespace suspflow {

namespace {

cplx unit(double turns) { return std::polar(1.0, kTwoPi * turns); }

std::string describe(const char* what, cplx s, int N) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s did not converge (s = %.6g%+.6gi, N = %d)", what, s.real(),
                s.imag(), N);
  return buf;
}

struct EigenPairs {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
};

EigenPairs eigen_pairs(const RoofFunction& f, cplx s, int N) {
  const TransferMatrix M = build_matrix(f, s, N);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(M.entries, true);
  if (solver.info() != Eigen::Success) throw ConvergenceError(describe("eigensolver", s, N));
  EigenPairs ep{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < ep.vectors.cols(); ++c) ep.vectors.col(c).normalize();
  return ep;
}

Eigen::Index best_overlap(const EigenPairs& ep, const Eigen::VectorXcd& v) {
  Eigen::Index best = 0;
  double score = -1.0;
  for (Eigen::Index c = 0; c < ep.vectors.cols(); ++c) {
    const double o = std::abs(v.dot(ep.vectors.col(c)));
    if (o > score) {
      score = o;
      best = c;
    }
  }
  return best;
}

Eigen::Index nearest(const Eigen::VectorXcd& values, cplx target) {
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < values.size(); ++c)
    if (std::abs(values[c] - target) < std::abs(values[best] - target)) best = c;
  return best;
}

struct NewtonResult {
  bool converged = false;
  bool degenerate = false;
  cplx mu;
  double residual = 0.0;
};

// Newton iteration on lambda_j(s) - 1 = 0 for the eigenvalue branch selected
// near `lambda0` at `s0`; the branch is followed by eigenvector overlap. With
// `real_only` the iterate stays on the real axis.
NewtonResult newton(const RoofFunction& f, cplx s0, cplx lambda0, int N, double tol,
                    int max_iter, bool real_only) {
  NewtonResult res;
  cplx s = s0;
  EigenPairs ep = eigen_pairs(f, s, N);
  Eigen::Index j = nearest(ep.values, lambda0);
  Eigen::VectorXcd v = ep.vectors.col(j);
  cplx lambda = ep.values[j];
  double prev_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const cplx r = lambda - 1.0;
    if (std::abs(r) <= tol) {
      res.converged = true;
      break;
    }
    const double h = 1e-6 * (1.0 + std::abs(s));
    const EigenPairs plus = eigen_pairs(f, s + h, N);
    const EigenPairs minus = eigen_pairs(f, s - h, N);
    const cplx dlambda =
        (plus.values[best_overlap(plus, v)] - minus.values[best_overlap(minus, v)]) / (2.0 * h);
    if (std::abs(dlambda) < 1e-10) {
      res.degenerate = true;
      break;
    }
    cplx step = r / dlambda;
    if (real_only) step = step.real();
    if (std::abs(step) > 0.5) step *= 0.5 / std::abs(step);
    s -= step;
    ep = eigen_pairs(f, s, N);
    j = best_overlap(ep, v);
    v = ep.vectors.col(j);
    lambda = ep.values[j];
    // Stagnation with a non-vanishing residual signals a multiple root.
    if (it > 8 && std::abs(step) > 0.9 * prev_step && std::abs(step) < 1e-6) {
      res.degenerate = true;
      break;
    }
    prev_step = std::abs(step);
  }
  if (!res.converged && std::abs(lambda - 1.0) <= tol) res.converged = true;
  res.mu = s;
  const TransferMatrix M = build_matrix(f, s, N);
  const double defect = (M.entries * v - v).norm() / v.norm();
  res.residual = std::abs(lambda - 1.0) + defect;
  return res;
}

}  // namespace

int quadrature_size(const RoofFunction& f, int N) {
  return std::max(256, 8 * (N + f.degree()));
}

TransferMatrix build_matrix(const RoofFunction& f, cplx s, int N) {
  if (N < 4) throw ValidationError("build_matrix: N must be >= 4");
  const int ell = f.ell();
  const int Q = quadrature_size(f, N);
  const int dim = 2 * N + 1;

  // G(q, k) = sum_i exp(-s f(y_iq)) exp(2 pi i k y_iq),  y_iq = (q/Q + i)/ell.
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(Q, dim);
  for (int i = 0; i < ell; ++i) {
    for (int q = 0; q < Q; ++q) {
      const double y = (static_cast<double>(q) / Q + i) / ell;
      const cplx weight = std::exp(-s * f(y));
      for (int k = -N; k <= N; ++k) {
        const long num = static_cast<long>(k) * (q + static_cast<long>(i) * Q);
        const long den = static_cast<long>(ell) * Q;
        long r = num % den;
        if (r < 0) r += den;
        G(q, k + N) += weight * unit(static_cast<double>(r) / static_cast<double>(den));
      }
    }
  }
  Eigen::MatrixXcd D(dim, Q);
  for (int m = -N; m <= N; ++m)
    for (int q = 0; q < Q; ++q) {
      long r = (static_cast<long>(-m) * q) % Q;
      if (r < 0) r += Q;
      D(m + N, q) = unit(static_cast<double>(r) / Q) / static_cast<double>(Q);
    }
  TransferMatrix M;
  M.s = s;
  M.N = N;
  M.Q = Q;
  M.entries = D * G;
  return M;
}

Eigen::VectorXcd transfer_eigenvalues(const RoofFunction& f, cplx s, int N) {
  const TransferMatrix M = build_matrix(f, s, N);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(M.entries, false);
  if (solver.info() != Eigen::Success) throw ConvergenceError(describe("eigensolver", s, N));
  return solver.eigenvalues();
}

double leading_eigenvalue(const RoofFunction& f, double s, int N) {
  const Eigen::VectorXcd ev = transfer_eigenvalues(f, s, N);
  double r = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) r = std::max(r, std::abs(ev[i]));
  return r;
}

double entropy(const RoofFunction& f, int N, double tol) {
  const double log_ell = std::log(static_cast<double>(f.ell()));
  double lo = log_ell / f.bounds().y_max, hi = log_ell / f.bounds().y_min;
  double flo = leading_eigenvalue(f, lo, N) - 1.0;
  double fhi = leading_eigenvalue(f, hi, N) - 1.0;
  if (std::abs(flo) <= tol) return lo;
  if (std::abs(fhi) <= tol) return hi;
  if (!(flo > 0.0 && fhi < 0.0))
    throw ValidationError(
        "entropy: no sign change of lambda(s) - 1 on [log ell / y_max, log ell / y_min]; "
        "the roof violates its declared class bounds");
  // Bisection down to a narrow bracket, then Illinois-type regula falsi.
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    const double fm = leading_eigenvalue(f, mid, N) - 1.0;
    if (std::abs(fm) <= tol) return mid;
    (fm > 0.0 ? lo : hi) = mid;
    (fm > 0.0 ? flo : fhi) = fm;
  }
  int side = 0;
  for (int it = 0; it < 100; ++it) {
    const double s = (lo * fhi - hi * flo) / (fhi - flo);
    const double fs = leading_eigenvalue(f, s, N) - 1.0;
    if (std::abs(fs) <= tol || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi)
      return s;
    if (fs > 0.0) {
      lo = s;
      flo = fs;
      if (side == 1) fhi *= 0.5;
      side = 1;
    } else {
      hi = s;
      fhi = fs;
      if (side == -1) flo *= 0.5;
      side = -1;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

std::vector<double> periodic_sums(const RoofFunction& f, int n) {
  check_word_budget(f.ell(), n, kDefaultWordBudget, "pressure_periodic");
  const std::uint64_t den = ipow(f.ell(), n) - 1;
  std::vector<double> values(den);
  for (std::uint64_t j = 0; j < den; ++j) values[j] = f(static_cast<double>(j) / den);
  std::vector<double> sums(den);
  for (std::uint64_t j = 0; j < den; ++j) {
    CompensatedSum<> acc;
    std::uint64_t num = j;
    for (int i = 0; i < n; ++i) {
      acc.add(values[num]);
      num = (num * f.ell()) % den;
    }
    sums[j] = acc.value();
  }
  return sums;
}

double pressure_from_sums(const std::vector<double>& sums, double s, int n) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : sums) peak = std::max(peak, -s * v);
  CompensatedSum<> acc;
  for (double v : sums) acc.add(std::exp(-s * v - peak));
  return (peak + std::log(acc.value())) / n;
}

}  // namespace

double pressure_periodic(const RoofFunction& f, double s, int n) {
  if (n < 1) throw ValidationError("pressure_periodic: n must be >= 1");
  return pressure_from_sums(periodic_sums(f, n), s, n);
}

double pressure_root(const RoofFunction& f, int n, double tol) {
  const auto sums = periodic_sums(f, n);
  double lo = 0.0, hi = 2.0 * std::log(static_cast<double>(f.ell())) / f.lower_bound();
  if (!(pressure_from_sums(sums, hi, n) < 0.0))
    throw ValidationError("pressure_root: no sign change");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (pressure_from_sums(sums, mid, n) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ResonanceSet resonances(const RoofFunction& f, const Window& window, int N, double tol,
                        const ResonanceOptions& opts) {
  if (!(window.re_min < window.re_max) || !(window.im_max >= 0.0))
    throw ValidationError("resonances: empty window");
  const double h = entropy(f, N);
  if (window.re_max > h + 0.1)
    throw ValidationError("resonances: window must satisfy Re s <= h + 0.1");

  ResonanceSet out;
  out.window = window;
  out.tol = tol;
  out.h = h;

  struct Seed {
    cplx s;
    cplx lambda;
  };
  // Seeds come from the closed upper half of the window; the lower half
  // follows by conjugation.
  std::vector<cplx> grid;
  const int nre = std::max(1, static_cast<int>(std::ceil((window.re_max - window.re_min) / opts.grid_step)));
  const int nim = std::max(1, static_cast<int>(std::ceil(window.im_max / opts.grid_step)));
  for (int a = 0; a <= nre; ++a)
    for (int b = 0; b <= nim; ++b)
      grid.emplace_back(window.re_min + (window.re_max - window.re_min) * a / nre,
                        window.im_max * b / nim);
  std::vector<std::vector<Seed>> seed_parts(grid.size());
  parallel_for(grid.size(), opts.workers, [&](std::size_t i) {
    const Eigen::VectorXcd ev = transfer_eigenvalues(f, grid[i], N);
    for (Eigen::Index c = 0; c < ev.size(); ++c)
      if (std::abs(ev[c] - 1.0) < opts.seed_radius) seed_parts[i].push_back(Seed{grid[i], ev[c]});
  });
  std::vector<Seed> raw;
  for (auto& p : seed_parts) raw.insert(raw.end(), p.begin(), p.end());
  // First-order prediction lambda(s) ~ lambda0 exp(-c0 (s - s0)); seeds whose
  // predicted roots nearly coincide share one Newton run.
  std::vector<cplx> predicted;
  std::vector<Seed> seeds;
  for (const auto& sd : raw) {
    const cplx guess = sd.s + std::log(sd.lambda) / f.c0();
    bool covered = false;
    for (std::size_t k = 0; k < seeds.size() && !covered; ++k)
      if (std::abs(predicted[k] - guess) < opts.merge_radius) {
        covered = true;
        if (std::abs(sd.lambda - 1.0) < std::abs(seeds[k].lambda - 1.0)) {
          seeds[k] = sd;
          predicted[k] = guess;
        }
      }
    if (!covered) {
      seeds.push_back(sd);
      predicted.push_back(guess);
    }
  }

  std::vector<NewtonResult> results(seeds.size());
  parallel_for(seeds.size(), opts.workers, [&](std::size_t i) {
    results[i] = newton(f, seeds[i].s, seeds[i].lambda, N, tol, opts.max_newton, false);
  });

  const double edge = 10.0 * tol;
  auto inside = [&](cplx mu) {
    return mu.real() >= window.re_min - edge && mu.real() <= window.re_max + edge &&
           std::abs(mu.imag()) <= window.im_max + edge;
  };
  std::vector<Resonance> found;
  for (std::size_t i = 0; i < results.size(); ++i) {
    NewtonResult r = results[i];
    if (!r.converged) {
      out.unconverged_seeds.push_back(seeds[i].s);
      continue;
    }
    if (std::abs(r.mu.imag()) < 1e-7) {
      // Polish on the real axis, where the operator is real.
      NewtonResult rr = newton(f, cplx(r.mu.real(), 0.0), 1.0, N, tol, opts.max_newton, true);
      if (rr.converged) r = rr;
      r.mu = cplx(r.mu.real(), 0.0);
    }
    if (r.mu.imag() < 0.0) r.mu = std::conj(r.mu);
    if (!inside(r.mu)) continue;
    found.push_back(Resonance{r.mu, r.residual, N, r.degenerate});
  }
  // Deduplicate within 10 tol, keeping the smallest residual.
  std::sort(found.begin(), found.end(), [](const Resonance& a, const Resonance& b) {
    return a.mu.real() != b.mu.real() ? a.mu.real() > b.mu.real() : a.mu.imag() < b.mu.imag();
  });
  std::vector<Resonance> unique;
  for (const auto& r : found) {
    bool merged = false;
    for (auto& u : unique)
      if (std::abs(u.mu - r.mu) <= 10.0 * tol) {
        if (r.residual < u.residual) u = r;
        merged = true;
        break;
      }
    if (!merged) unique.push_back(r);
  }
  for (const auto& r : unique) {
    out.entries.push_back(r);
    if (r.mu.imag() != 0.0) {
      Resonance c = r;
      c.mu = std::conj(r.mu);
      out.entries.push_back(c);
    }
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const Resonance& a, const Resonance& b) {
    return a.mu.real() != b.mu.real() ? a.mu.real() > b.mu.real() : a.mu.imag() < b.mu.imag();
  });
  for (const auto& r : out.entries)
    if (r.mu.imag() == 0.0) {
      out.h = r.mu.real();
      break;
    }
  return out;
}

}  // namespace suspflow
