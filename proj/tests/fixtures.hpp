#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "suspflow/roof.hpp"

namespace fixtures {

/// f = 1 + 0.2 cos 2 pi x over tau(x) = 2x.
inline suspflow::RoofFunction standard_roof() {
  return suspflow::RoofFunction(2, 1.0, {0.2}, {}, {0.75, 1.25, 8.0});
}

inline suspflow::RoofFunction unit_roof(int ell = 2) {
  return suspflow::RoofFunction::constant(ell, 1.0, {0.5, 2.0, 1.0});
}

/// Random trig polynomial with declared bounds just outside its range, so the
/// class check passes.
inline suspflow::RoofFunction random_class_roof(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ell_dist(2, 3), deg_dist(1, 3);
  std::uniform_real_distribution<double> amp(-0.12, 0.12);
  const int ell = ell_dist(rng);
  const int K = deg_dist(rng);
  std::vector<double> a(K), b(K);
  for (int k = 0; k < K; ++k) {
    a[k] = amp(rng) / (k + 1);
    b[k] = amp(rng) / (k + 1);
  }
  suspflow::RoofFunction probe(ell, 1.0, a, b, {0.1, 10.0, 1e3});
  const double kappa =
      std::max(probe.derivative_bound(1), probe.derivative_bound(2)) * 1.05 + 0.05;
  return suspflow::RoofFunction(ell, 1.0, a, b,
                                {probe.lower_bound() - 0.02, probe.upper_bound() + 0.02, kappa});
}

}  // namespace fixtures
