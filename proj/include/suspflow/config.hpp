#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "suspflow/orbits.hpp"
#include "suspflow/roof.hpp"
#include "suspflow/transversality.hpp"

namespace suspflow {

/**
 * Run configuration, stored as key = value lines in [roof], [cone], [budget]
 * and [run] sections. Reals are written with 17 significant digits so a
 * parse/serialize cycle is lossless.
 */
struct RunConfig {
  int ell = 2;
  double c0 = 1.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
  double y_min = 0.5;
  double y_max = 2.0;
  double kappa0 = 1.0;

  double gamma0 = 0.75;
  double r = 5.0;

  std::uint64_t max_words = kDefaultWordBudget;
  std::uint64_t max_tuples = kDefaultTupleBudget;

  std::uint64_t seed = 1;
  int workers = 1;
  std::string format = "json";  ///< json | csv
  std::string output;           ///< empty: standard output

  RoofFunction roof() const;
  ConeParams cone() const;
  OrbitOptions orbit_options() const;

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);
  std::string serialize() const;

  /// FNV-1a over the serialized configuration without workers and output,
  /// which do not affect results.
  std::string digest() const;
};

/// Output path with SUSPFLOW_OUTPUT_DIR prepended to relative paths.
std::string resolve_output_path(const std::string& path);

}  // namespace suspflow
