#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "suspflow/roof.hpp"

namespace suspflow {

/// Default ceiling on ell^n words a single orbit query may touch.
inline constexpr std::uint64_t kDefaultWordBudget = std::uint64_t{1} << 28;

/**
 * Prime periodic orbit of the semiflow. The Lyndon word of length n read as a
 * base-ell integer j gives the base point x = j / (ell^n - 1), which is fixed
 * by tau^n; its tau-orbit is iterated exactly in integer arithmetic.
 */
struct PrimeOrbit {
  int n = 0;
  std::uint64_t j = 0;
  double period = 0.0;

  std::vector<int> word(int ell) const;
  std::string word_string(int ell) const;
  double x_base(int ell) const;
  double multiplier(int ell) const;  ///< E_gamma = ell^n
};

struct OrbitOptions {
  int workers = 1;
  std::uint64_t max_words = kDefaultWordBudget;
};

/// f^(n) at the rational point j/(ell^n - 1), iterated exactly.
double periodic_birkhoff_sum(const RoofFunction& f, int n, std::uint64_t j);

/// Every prime orbit of word length <= n_max, ordered by (n, word).
std::vector<PrimeOrbit> enumerate_prime_orbits(const RoofFunction& f, int n_max,
                                               const OrbitOptions& opts = {});

/// Every prime orbit with period <= T, ordered by (n, word). Subtrees of the
/// Lyndon tree whose rigorous period lower bound exceeds T are skipped.
/// Refuses with BudgetError when ell^ceil(T / y_min) exceeds opts.max_words.
std::vector<PrimeOrbit> prime_orbits_below(const RoofFunction& f, double T,
                                           const OrbitOptions& opts = {});

/// pi(T) = #{gamma : |gamma| <= T}.
long count_pi(const RoofFunction& f, double T, const OrbitOptions& opts = {});
long count_pi(std::span<const PrimeOrbit> orbits, double T);

/// sum_gamma sum_{n <= T/|gamma|} (1/n) / (1 - E_gamma^{-n}).
double count_pi_tilde(const RoofFunction& f, double T, const OrbitOptions& opts = {});
double count_pi_tilde(std::span<const PrimeOrbit> orbits, int ell, double T);

/// pi and pi-tilde at every T in `grid` from one orbit list.
std::vector<long> pi_series(std::span<const PrimeOrbit> orbits, std::span<const double> grid);
std::vector<double> pi_tilde_series(std::span<const PrimeOrbit> orbits, int ell,
                                    std::span<const double> grid);

/// Throws BudgetError when ell^n exceeds max_words.
void check_word_budget(int ell, double n, std::uint64_t max_words, const char* what);

// Orbit cache: a versioned header line followed by one CSV row per orbit.
inline constexpr const char* kOrbitCacheFormat = "suspflow-orbits";
inline constexpr int kOrbitCacheVersion = 1;

struct OrbitCache {
  int ell = 0;
  std::string roof_digest;
  int n_max = 0;
  std::vector<PrimeOrbit> orbits;
};

void write_orbit_cache(std::ostream& out, const RoofFunction& f, int n_max,
                       std::span<const PrimeOrbit> orbits);
/// Throws ValidationError on a malformed file or when the cache was built for
/// a different roof (digest mismatch).
OrbitCache read_orbit_cache(std::istream& in, const RoofFunction& f);

}  // namespace suspflow
