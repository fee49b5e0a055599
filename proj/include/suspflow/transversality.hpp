#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "suspflow/roof.hpp"
#include "suspflow/semiflow.hpp"

namespace suspflow {

struct ConeParams {
  double gamma0 = 0.0;
  double theta0 = 0.0;  ///< kappa0 / (gamma0 ell - 1)
  double r = 0.0;
};

/// Validates 1/ell < gamma0 < 1 and r > y_max / y_min.
ConeParams make_cone(const RoofFunction& f, double gamma0, double r);

/// C-infinity step: 1 for t <= 1, 0 for t >= 2.
double chi_bump(double t);

/// chi(|s|) + (1 - chi(|s|)) |s|.
double angle_bracket(double s);

struct TupleSE {
  double S = 0.0;
  double E = 1.0;
};

/// S summed and 1/E summed over the branches picked by `indices`.
TupleSE tuple_SE(const std::vector<BackwardBranch>& branches,
                 const std::vector<std::size_t>& indices);

/// <E |xi - S eta| / (theta0 <eta>)>^r.
double W_r(double S, double E, const ConeParams& cone, double xi, double eta);

/// Branches of (T^t)^{-1}(z) with e^{a t} <= E <= e^{b t}.
std::vector<BackwardBranch> filter_B(const RoofFunction& f, FlowPoint z, double t, double a,
                                     double b, int workers = 1);
std::vector<BackwardBranch> filter_B(const std::vector<BackwardBranch>& all, double t, double a,
                                     double b);

/// Index in [0, ell^n) of the depth-n preimage x_{-n} = (x + key)/ell^n that
/// the branch passes through, or nothing when it crosses the base fewer than
/// n times.
std::optional<std::uint64_t> exclusion_key(const BackwardBranch& w, int n, int ell);

/// Points of tau^{-n}(x), by index, excluded from the tuple sum.
using ExceptionalSet = std::vector<std::uint64_t>;

inline constexpr std::uint64_t kDefaultTupleBudget = std::uint64_t{1} << 26;

struct SumStarOptions {
  std::uint64_t max_tuples = kDefaultTupleBudget;
  int workers = 1;
};

/// Sum over p-tuples of branches in B whose depth-n points avoid `excluded`
/// of 1 / W^r(w)(xi, 2).
double sum_star(const std::vector<BackwardBranch>& B, int p, const ConeParams& cone, double xi,
                const ExceptionalSet& excluded, int n, int ell, const SumStarOptions& opts = {});

/// Uniform xi-grid used for the sup of the tuple sum: `points` samples of
/// [-L, L] with L = max(p theta0, 2 p max |S(w)|).
std::vector<double> xi_grid(const std::vector<BackwardBranch>& B, int p, const ConeParams& cone,
                            int points = 512);

struct SupResult {
  double value = 0.0;
  double xi = 0.0;
};

/// Maximum of sum_star over xi_grid followed by one local refinement pass.
SupResult sup_sum_star(const std::vector<BackwardBranch>& B, int p, const ConeParams& cone,
                       const ExceptionalSet& excluded, int n, int ell,
                       const SumStarOptions& opts = {});

struct GreedyOptions {
  /// Birkhoff-sum cap on the depth-mn refinement; negative selects the
  /// default (m+1) n log(ell) / a with m = floor(a t / (n log ell)).
  double cap = -1.0;
  SumStarOptions sum;
};

struct ScoredTuple {
  std::vector<std::uint64_t> keys;  ///< p components in tau^{-n}(x)
  double score = 0.0;
};

/// Tuple scores at xi0, sorted by (score desc, keys lex asc). Only tuples with
/// at least one refining branch tuple are listed.
std::vector<ScoredTuple> tuple_scores(const RoofFunction& f, FlowPoint z, double t, double a,
                                      const std::vector<BackwardBranch>& B, int p,
                                      const ConeParams& cone, double xi0, int n,
                                      const GreedyOptions& opts = {});

/// Y_{k*}: components of the leading sorted tuples, k* maximal with #Y <= p q.
/// xi0 is the maximizer of the unrestricted tuple sum.
ExceptionalSet exceptional_set_greedy(const RoofFunction& f, FlowPoint z, double t, double a,
                                      const std::vector<BackwardBranch>& B, int p, int q,
                                      const ConeParams& cone, int n,
                                      const GreedyOptions& opts = {});

/// Whether x lies within circle distance < delta of a point of period <= n.
bool per_delta_member(int ell, int n, double delta, double x);

struct TransversalityReport {
  FlowPoint z;
  double t = 0.0;
  double a = 0.0;
  double b = 0.0;
  int p = 1;
  double epsilon = 0.0;
  int n = 0;
  int q = 0;
  std::size_t branch_count = 0;
  ExceptionalSet exceptional;
  double sup_value = 0.0;
  double xi_at_sup = 0.0;
  double threshold = 0.0;
  double log_margin = 0.0;  ///< log(threshold) - log(sup_value)
  bool pass = false;
  bool skipped = false;
  std::string notice;
};

struct GenericOptions {
  double delta = 1e-3;  ///< Per_delta radius for the sample precondition
  int N = 32;           ///< truncation for the entropy in the threshold
  GreedyOptions greedy;
};

/// threshold exp((max{p h - a, 0} + p (b - a) + eps) t).
double generic_threshold(double h, double t, double a, double b, int p, double eps);

std::vector<TransversalityReport> check_generic_condition(
    const RoofFunction& f, const std::vector<FlowPoint>& z_samples, double t, double a, double b,
    int p, double epsilon, int n, const ConeParams& cone, const GenericOptions& opts = {});

}  // namespace suspflow
