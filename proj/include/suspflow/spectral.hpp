#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "suspflow/roof.hpp"

namespace suspflow {

using cplx = std::complex<double>;

/**
 * Truncation of L_s u(x) = sum_{tau y = x} exp(-s f(y)) u(y) to Fourier modes
 * -N..N. Column k holds the Fourier coefficients of L_s e_k, computed by a
 * size-Q discrete transform of sampled values.
 */
struct TransferMatrix {
  cplx s;
  int N = 0;
  int Q = 0;
  Eigen::MatrixXcd entries;

  /// Entry for output mode m and input mode k, both in [-N, N].
  cplx entry(int m, int k) const { return entries(m + N, k + N); }
};

/// Quadrature size max(256, 8 (N + K)).
int quadrature_size(const RoofFunction& f, int N);

TransferMatrix build_matrix(const RoofFunction& f, cplx s, int N);

/// Spectral radius of the truncated L_s for real s.
double leading_eigenvalue(const RoofFunction& f, double s, int N);

/// Root of leading_eigenvalue(s) = 1 inside [log ell / y_max, log ell / y_min].
double entropy(const RoofFunction& f, int N, double tol = 1e-14);

/// (1/n) log sum_{tau^n x = x} exp(-s f^(n)(x)) over all ell^n - 1 points.
double pressure_periodic(const RoofFunction& f, double s, int n);

/// Zero of s -> pressure_periodic(f, s, n), by bisection on the same bracket
/// as entropy().
double pressure_root(const RoofFunction& f, int n, double tol = 1e-13);

struct Window {
  double re_min = 0.0;
  double re_max = 1.0;
  double im_max = 10.0;  ///< window is [re_min, re_max] x [-im_max, im_max]
};

struct Resonance {
  cplx mu;
  double residual = 0.0;
  int N = 0;
  bool degenerate = false;  ///< Newton stagnated with a vanishing derivative
};

struct ResonanceSet {
  std::vector<Resonance> entries;  ///< sorted by (Re desc, Im asc)
  double h = 0.0;                  ///< leading real resonance
  Window window;
  double tol = 0.0;
  std::vector<cplx> unconverged_seeds;
};

struct ResonanceOptions {
  double grid_step = 0.25;    ///< seed grid spacing in both directions
  double seed_radius = 0.35;  ///< eigenvalues within this distance of 1 seed Newton
  double merge_radius = 0.02;  ///< seeds with predicted roots this close share a Newton run
  int max_newton = 40;
  int workers = 1;
};

/// All s in the window at which some eigenvalue of the truncated L_s equals 1.
ResonanceSet resonances(const RoofFunction& f, const Window& window, int N, double tol,
                        const ResonanceOptions& opts = {});

/// Eigenvalues of the truncated L_s.
Eigen::VectorXcd transfer_eigenvalues(const RoofFunction& f, cplx s, int N);

}  // namespace suspflow
