#include "suspflow/transversality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "suspflow/errors.hpp"
#include "suspflow/numerics.hpp"
#include "suspflow/parallel.hpp"
#include "suspflow/spectral.hpp"

namespace suspflow {

ConeParams make_cone(const RoofFunction& f, double gamma0, double r) {
  const double ell = f.ell();
  if (!(gamma0 > 1.0 / ell && gamma0 < 1.0))
    throw ValidationError("cone: gamma0 must lie in (1/ell, 1)");
  const double ratio = f.bounds().y_max / f.bounds().y_min;
  if (!(r > ratio)) throw ValidationError("cone: r must exceed y_max / y_min");
  return ConeParams{gamma0, f.bounds().kappa0 / (gamma0 * ell - 1.0), r};
}

double chi_bump(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - t));
  const double b = std::exp(-1.0 / (t - 1.0));
  return a / (a + b);
}

double angle_bracket(double s) {
  const double a = std::abs(s);
  const double c = chi_bump(a);
  return c + (1.0 - c) * a;
}

TupleSE tuple_SE(const std::vector<BackwardBranch>& branches,
                 const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw ValidationError("tuple_SE: empty tuple");
  double S = 0.0, inv_E = 0.0;
  for (std::size_t i : indices) {
    S += branches.at(i).cocycle.S;
    inv_E += 1.0 / branches.at(i).cocycle.E;
  }
  return TupleSE{S, 1.0 / inv_E};
}

double W_r(double S, double E, const ConeParams& cone, double xi, double eta) {
  if (!(E > 0.0)) throw ValidationError("W_r: E must be positive");
  return std::pow(angle_bracket(E * std::abs(xi - S * eta) / (cone.theta0 * angle_bracket(eta))),
                  cone.r);
}

std::vector<BackwardBranch> filter_B(const std::vector<BackwardBranch>& all, double t, double a,
                                     double b) {
  if (!(0.0 < a && a < b)) throw ValidationError("filter_B: need 0 < a < b");
  const double lo = std::exp(a * t), hi = std::exp(b * t);
  std::vector<BackwardBranch> out;
  for (const auto& w : all)
    if (lo <= w.cocycle.E && w.cocycle.E <= hi) out.push_back(w);
  return out;
}

std::vector<BackwardBranch> filter_B(const RoofFunction& f, FlowPoint z, double t, double a,
                                     double b, int workers) {
  return filter_B(backward_orbit(f, z, t, workers), t, a, b);
}

std::optional<std::uint64_t> exclusion_key(const BackwardBranch& w, int n, int ell) {
  if (w.k < n) return std::nullopt;
  return w.j % ipow(ell, n);
}

namespace {

void check_tuple_budget(std::size_t count, int p, std::uint64_t max_tuples) {
  if (p < 1) throw ValidationError("tuple sum: p must be >= 1");
  if (std::pow(static_cast<double>(count), p) > static_cast<double>(max_tuples)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "tuple budget exceeded: %zu^%d tuples > %llu", count, p,
                  static_cast<unsigned long long>(max_tuples));
    throw BudgetError(buf);
  }
}

struct Term {
  double S;
  double inv_E;
};

// Sum over all p-tuples drawn from `terms` (with repetition) of 1/W^r at
// (xi, 2); parallel over the first component, merged in index order.
double tuple_sum(const std::vector<Term>& terms, int p, const ConeParams& cone, double xi,
                 int workers) {
  const std::size_t m = terms.size();
  if (m == 0) return 0.0;
  std::size_t inner = 1;
  for (int i = 1; i < p; ++i) inner *= m;
  std::vector<double> slots(m);
  parallel_for(m, workers, [&](std::size_t first) {
    CompensatedSum<> acc;
    std::vector<std::size_t> digits(p > 1 ? p - 1 : 0, 0);
    for (std::size_t c = 0; c < inner; ++c) {
      double S = terms[first].S, inv_E = terms[first].inv_E;
      for (std::size_t d : digits) {
        S += terms[d].S;
        inv_E += terms[d].inv_E;
      }
      acc.add(1.0 / W_r(S, 1.0 / inv_E, cone, xi, 2.0));
      for (std::size_t pos = 0; pos < digits.size(); ++pos) {
        if (++digits[pos] < m) break;
        digits[pos] = 0;
      }
    }
    slots[first] = acc.value();
  });
  CompensatedSum<> total;
  for (double v : slots) total.add(v);
  return total.value();
}

std::vector<Term> admissible_terms(const std::vector<BackwardBranch>& B,
                                   const ExceptionalSet& excluded, int n, int ell) {
  std::vector<std::uint64_t> sorted(excluded.begin(), excluded.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Term> terms;
  for (const auto& w : B) {
    const auto key = exclusion_key(w, n, ell);
    if (key && std::binary_search(sorted.begin(), sorted.end(), *key)) continue;
    terms.push_back(Term{w.cocycle.S, 1.0 / w.cocycle.E});
  }
  return terms;
}

}  // namespace

double sum_star(const std::vector<BackwardBranch>& B, int p, const ConeParams& cone, double xi,
                const ExceptionalSet& excluded, int n, int ell, const SumStarOptions& opts) {
  check_tuple_budget(B.size(), p, opts.max_tuples);
  return tuple_sum(admissible_terms(B, excluded, n, ell), p, cone, xi, opts.workers);
}

std::vector<double> xi_grid(const std::vector<BackwardBranch>& B, int p, const ConeParams& cone,
                            int points) {
  if (points < 2) throw ValidationError("xi_grid: need at least 2 points");
  double s_max = 0.0;
  for (const auto& w : B) s_max = std::max(s_max, std::abs(w.cocycle.S));
  const double L = std::max(p * cone.theta0, 2.0 * p * s_max);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = -L + 2.0 * L * i / (points - 1);
  return grid;
}

SupResult sup_sum_star(const std::vector<BackwardBranch>& B, int p, const ConeParams& cone,
                       const ExceptionalSet& excluded, int n, int ell,
                       const SumStarOptions& opts) {
  check_tuple_budget(B.size(), p, opts.max_tuples);
  const auto terms = admissible_terms(B, excluded, n, ell);
  const auto grid = xi_grid(B, p, cone);
  SupResult best{-1.0, 0.0};
  std::size_t arg = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = tuple_sum(terms, p, cone, grid[i], opts.workers);
    if (v > best.value) {
      best = {v, grid[i]};
      arg = i;
    }
  }
  const double lo = grid[arg == 0 ? 0 : arg - 1];
  const double hi = grid[std::min(arg + 1, grid.size() - 1)];
  constexpr int kRefine = 65;
  for (int i = 0; i < kRefine; ++i) {
    const double xi = lo + (hi - lo) * i / (kRefine - 1);
    const double v = tuple_sum(terms, p, cone, xi, opts.workers);
    if (v > best.value) best = {v, xi};
  }
  return best;
}

std::vector<ScoredTuple> tuple_scores(const RoofFunction& f, FlowPoint z, double t, double a,
                                      const std::vector<BackwardBranch>& B, int p,
                                      const ConeParams& cone, double xi0, int n,
                                      const GreedyOptions& opts) {
  check_tuple_budget(B.size(), p, opts.sum.max_tuples);
  if (n < 1) throw ValidationError("tuple_scores: n must be >= 1");
  const int ell = f.ell();
  const double log_ell = std::log(static_cast<double>(ell));
  const long m = static_cast<long>(std::floor(a * t / (n * log_ell)));
  const long depth = m * n;
  const double cap = opts.cap >= 0.0 ? opts.cap : (m + 1) * n * log_ell / a;

  std::map<std::uint64_t, std::vector<Term>> groups;
  for (const auto& w : B) {
    const auto key = exclusion_key(w, n, ell);
    if (!key || w.k < depth) continue;
    const double x_deep = backward_point(ell, z.x, w.j, static_cast<int>(depth));
    if (birkhoff_sum(f, x_deep, depth) > cap) continue;
    groups[*key].push_back(Term{w.cocycle.S, 1.0 / w.cocycle.E});
  }
  std::vector<std::uint64_t> keys;
  std::vector<const std::vector<Term>*> members;
  for (const auto& [k, g] : groups) {
    keys.push_back(k);
    members.push_back(&g);
  }
  const std::size_t K = keys.size();
  if (K == 0) return {};
  std::size_t count = 1;
  for (int i = 0; i < p; ++i) count *= K;

  std::vector<ScoredTuple> out(count);
  parallel_for(count, opts.sum.workers, [&](std::size_t idx) {
    // Mixed-radix decode, first component most significant: lex order.
    std::vector<std::size_t> comp(p);
    std::size_t rest = idx;
    for (int i = p - 1; i >= 0; --i) {
      comp[i] = rest % K;
      rest /= K;
    }
    ScoredTuple st;
    for (std::size_t c : comp) st.keys.push_back(keys[c]);
    // Sum over the product of the component groups.
    std::vector<std::size_t> digit(p, 0);
    CompensatedSum<> acc;
    for (;;) {
      double S = 0.0, inv_E = 0.0;
      for (int i = 0; i < p; ++i) {
        const Term& tm = (*members[comp[i]])[digit[i]];
        S += tm.S;
        inv_E += tm.inv_E;
      }
      acc.add(1.0 / W_r(S, 1.0 / inv_E, cone, xi0, 2.0));
      int pos = 0;
      for (; pos < p; ++pos) {
        if (++digit[pos] < members[comp[pos]]->size()) break;
        digit[pos] = 0;
      }
      if (pos == p) break;
    }
    st.score = acc.value();
    out[idx] = std::move(st);
  });
  std::stable_sort(out.begin(), out.end(), [](const ScoredTuple& x, const ScoredTuple& y) {
    return x.score > y.score;
  });
  return out;
}

ExceptionalSet exceptional_set_greedy(const RoofFunction& f, FlowPoint z, double t, double a,
                                      const std::vector<BackwardBranch>& B, int p, int q,
                                      const ConeParams& cone, int n, const GreedyOptions& opts) {
  if (q < 1) throw ValidationError("exceptional_set_greedy: q must be >= 1");
  const double points = std::pow(static_cast<double>(f.ell()), n);
  if (static_cast<double>(p) * q > points)
    throw ValidationError("exceptional_set_greedy: p q exceeds #tau^{-n}(x)");
  const double xi0 = sup_sum_star(B, p, cone, {}, n, f.ell(), opts.sum).xi;
  const auto scored = tuple_scores(f, z, t, a, B, p, cone, xi0, n, opts);
  const std::size_t limit = static_cast<std::size_t>(p) * q;
  std::vector<std::uint64_t> Y;
  for (const auto& st : scored) {
    std::vector<std::uint64_t> next = Y;
    for (auto k : st.keys)
      if (std::find(next.begin(), next.end(), k) == next.end()) next.push_back(k);
    if (next.size() > limit) break;
    Y = std::move(next);
  }
  std::sort(Y.begin(), Y.end());
  return Y;
}

bool per_delta_member(int ell, int n, double delta, double x) {
  if (!(delta > 0.0)) throw ValidationError("per_delta_member: delta must be positive");
  for (int k = 1; k <= n; ++k) {
    const double den = static_cast<double>(ipow(ell, k) - 1);
    const double y = frac(x);
    const double j = std::round(y * den);
    if (circle_distance(y, j / den) < delta) return true;
  }
  return false;
}

double generic_threshold(double h, double t, double a, double b, int p, double eps) {
  return std::exp((std::max(p * h - a, 0.0) + p * (b - a) + eps) * t);
}

std::vector<TransversalityReport> check_generic_condition(
    const RoofFunction& f, const std::vector<FlowPoint>& z_samples, double t, double a, double b,
    int p, double epsilon, int n, const ConeParams& cone, const GenericOptions& opts) {
  if (!(0.0 < a && a < b)) throw ValidationError("transversality: need 0 < a < b");
  if (!(epsilon > 0.0 && epsilon < std::min(a, 1.0)))
    throw ValidationError("transversality: need 0 < epsilon < min{a, 1}");
  const int q = static_cast<int>(std::ceil(10.0 * a / epsilon));
  const double h = entropy(f, opts.N);
  std::vector<TransversalityReport> out;
  for (const auto& z : z_samples) {
    TransversalityReport rep;
    rep.z = z;
    rep.t = t;
    rep.a = a;
    rep.b = b;
    rep.p = p;
    rep.epsilon = epsilon;
    rep.n = n;
    rep.q = q;
    rep.threshold = generic_threshold(h, t, a, b, p, epsilon);
    if (per_delta_member(f.ell(), n, opts.delta, z.x)) {
      rep.skipped = true;
      char buf[128];
      std::snprintf(buf, sizeof buf, "x = %.17g lies in Per_delta(tau, %d) for delta = %g", z.x, n,
                    opts.delta);
      rep.notice = buf;
      out.push_back(rep);
      continue;
    }
    const auto B = filter_B(f, z, t, a, b, opts.greedy.sum.workers);
    rep.branch_count = B.size();
    rep.exceptional = exceptional_set_greedy(f, z, t, a, B, p, q, cone, n, opts.greedy);
    const SupResult sup = sup_sum_star(B, p, cone, rep.exceptional, n, f.ell(), opts.greedy.sum);
    rep.sup_value = sup.value;
    rep.xi_at_sup = sup.xi;
    rep.log_margin = std::log(rep.threshold) - std::log(sup.value);
    rep.pass = sup.value <= rep.threshold;
    out.push_back(rep);
  }
  return out;
}

}  // namespace suspflow
