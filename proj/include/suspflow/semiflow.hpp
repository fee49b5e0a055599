#pragma once

#include <cstdint>
#include <vector>

#include "suspflow/roof.hpp"

namespace suspflow {

/// Point (x, y) of X_f = {0 <= y < f(x)}.
struct FlowPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Canonical representative of (x, y) for arbitrary y >= 0: climbs the
/// suspension until 0 <= y < f(x).
FlowPoint normalize(const RoofFunction& f, FlowPoint z);

/// Distance on X_f that identifies (x, f(x)) with (tau x, 0).
double flow_distance(const RoofFunction& f, FlowPoint a, FlowPoint b);

/// Differential data of T^t at a point: DT = [[E, 0], [F, 1]], S = -F/E.
struct CocycleData {
  double E = 1.0;
  double F = 0.0;
  double S = 0.0;
  long crossings = 0;  ///< log_ell E
};

/// Forward semiflow T^t(z).
FlowPoint flow(const RoofFunction& f, FlowPoint z, double t);

/// Cocycle of DT^t at z (one-sided limit convention on the base).
CocycleData cocycle(const RoofFunction& f, FlowPoint z, double t);

/**
 * One element w of (T^t)^{-1}(z). The base coordinate is
 * x_w = (x + j) / ell^k where j encodes the backward digits, first digit in
 * the lowest place: x_{-d} = (x + (j mod ell^d)) / ell^d.
 */
struct BackwardBranch {
  FlowPoint w;
  int k = 0;             ///< number of base crossings along the segment
  std::uint64_t j = 0;   ///< backward digit path
  std::vector<double> crossing_times;  ///< s_1 > s_2 > ... > s_k
  CocycleData cocycle;
};

/// Forward-check tolerance used to decide membership of (T^t)^{-1}(z).
inline constexpr double kForwardCheckTol = 1e-10;

/// Complete enumeration of (T^t)^{-1}(z), sorted by (k, j).
std::vector<BackwardBranch> backward_orbit(const RoofFunction& f, FlowPoint z, double t,
                                           int workers = 1);

/// Number of backward branches, without materializing them.
std::uint64_t count_backward(const RoofFunction& f, FlowPoint z, double t);

/// Times 0 < s_k < ... < s_1 <= t at which T^s(w) crosses the base;
/// T^{s_i}(w) = (x_{-(i-1)}, 0). Throws ValidationError if the branch does not
/// belong to (z, t).
std::vector<double> crossing_times(const RoofFunction& f, FlowPoint z,
                                   const BackwardBranch& branch, double t);

/// Base coordinate x_{-d} = (x + (j mod ell^d)) / ell^d of a backward path.
double backward_point(int ell, double x, std::uint64_t j, int d);

}  // namespace suspflow
