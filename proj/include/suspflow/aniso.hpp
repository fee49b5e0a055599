#pragma once

#include <complex>
#include <string>
#include <vector>

namespace suspflow {

/// Dyadic pieces: chi(|t|) for m = 0, chi(2^-m |t|) - chi(2^{1-m} |t|) for m >= 1.
double lp_chi_m(int m, double t);

/// Partition of the eta-axis into pieces supported on I_n, with
/// rho_n(x) = chi(u - n + 1) - chi(u - n + 2), u = sgn(x) sqrt|x|, for n >= 1,
/// rho_0(x) = chi(sqrt|x| + 1) and rho_n(x) = rho_{-n}(-x) for n <= -1.
double rho_n(int n, double x);

/// Support interval I_n of rho_n.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
Interval rho_support(int n);

/// rho_n(eta) chi_m(xi / (theta0 <n>^2)).
double chi_nm(int n, int m, double xi, double eta, double theta0);

/// chi_nm composed with (xi, eta) -> (E xi + S E eta, eta).
double chi_nm_SE(int n, int m, double S, double E, double xi, double eta, double theta0);

/// Periodic box [-Lx/2, Lx/2) x [-Ly/2, Ly/2) sampled on nx x ny points.
/// Samples are stored row-major with x as the slow index: u[i * ny + j].
struct Grid2D {
  int nx = 64;
  int ny = 64;
  double Lx = 64.0;
  double Ly = 64.0;

  double x(int i) const { return -0.5 * Lx + Lx * i / nx; }
  double y(int j) const { return -0.5 * Ly + Ly * j / ny; }
  /// Angular frequency of DFT index k along x (resp. y).
  double xi(int k) const;
  double eta(int k) const;
  double xi_nyquist() const;
  double eta_nyquist() const;
};

struct PartitionParams {
  double theta0 = 1.0;
  double r = 0.0;
  int p = 1;
  Grid2D grid;
};

struct Frame {
  double S = 0.0;
  double E = 1.0;
};

struct CellNorm {
  int n = 0;
  int m = 0;
  double norm = 0.0;  ///< L^{2p} norm of the cell projection (without 2^{rm})
};

struct NormResult {
  double value = 0.0;
  std::vector<CellNorm> cells;  ///< cells whose multiplier is nonzero somewhere on the grid
  std::vector<std::string> warnings;
};

/// Anisotropic norm of grid samples; with a frame the cells are chi_nm_SE.
NormResult brp_norm(const std::vector<std::complex<double>>& u, const PartitionParams& params,
                    const Frame& frame = {}, int workers = 1);

/// Discrete L^2 norm (Riemann sum) of grid samples.
double l2_norm(const std::vector<std::complex<double>>& u, const Grid2D& grid);

struct FxnmReport {
  int n = 0;
  int m = 0;
  double nu = 2.0;
  double l1 = 0.0;        ///< discrete L^1 norm of the kernel
  double envelope_C = 0.0;  ///< smallest C with |kernel| <= C * envelope on the grid
  double max_imag = 0.0;  ///< max |Im| relative to max |kernel| (0 for real kernels)
  double max_odd = 0.0;   ///< max |k(x,y) - k(-x,-y)| relative to max |kernel|
  int resolution = 0;
};

/// Convolution kernel of the cell (n, m) multiplier, its L^1 norm and the
/// envelope constant for C 2^m <n>^3 <2^m <n>^2 |x>^-nu <<n> |y|>^-nu.
FxnmReport fxnm_decay_check(int n, int m, double nu, double theta0, int resolution = 512);

}  // namespace suspflow
