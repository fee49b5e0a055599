#include "suspflow/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "suspflow/errors.hpp"
#include "suspflow/numerics.hpp"
#include "suspflow/parallel.hpp"

namespace suspflow {

namespace {

constexpr char kDigits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
constexpr int kMaxWordLength = 63;

int max_word_length(int ell) {
  // Largest n with ell^n - 1 representable and ell * (ell^n - 1) < 2^127.
  int n = 0;
  double v = 1.0;
  while (n < kMaxWordLength && v * ell < 1.8e19) {
    v *= ell;
    ++n;
  }
  return n;
}

/// Lower bounds of f over the ell-adic intervals [i/ell^d, (i+1)/ell^d].
class DyadicBounds {
 public:
  explicit DyadicBounds(const RoofFunction& f) : ell_(f.ell()) {
    levels_ = 0;
    std::uint64_t size = 1;
    while (size * ell_ <= 65536) {
      size *= ell_;
      ++levels_;
    }
    table_.resize(levels_ + 1);
    table_[levels_].resize(size);
    const double w = 1.0 / static_cast<double>(size);
    const double lip = f.derivative_bound(1);
    for (std::uint64_t i = 0; i < size; ++i) {
      const double a = f(i * w), b = f((i + 1) * w);
      table_[levels_][i] = 0.5 * (a + b) - 0.5 * lip * w - 1e-12;
    }
    for (int d = levels_ - 1; d >= 0; --d) {
      table_[d].resize(table_[d + 1].size() / ell_);
      for (std::size_t i = 0; i < table_[d].size(); ++i) {
        double m = table_[d + 1][i * ell_];
        for (int c = 1; c < ell_; ++c) m = std::min(m, table_[d + 1][i * ell_ + c]);
        table_[d][i] = m;
      }
    }
  }
  int levels() const { return levels_; }
  double at(int d, std::uint64_t idx) const { return table_[d][idx]; }
  double global() const { return table_[0][0]; }

 private:
  int ell_;
  int levels_;
  std::vector<std::vector<double>> table_;
};

/// Ruskey's recursive prenecklace generator for one word length with
/// branch-and-bound on the period.
class LyndonSearch {
 public:
  LyndonSearch(const RoofFunction& f, const DyadicBounds& bounds, int n, double cap)
      : f_(f), bounds_(bounds), ell_(f.ell()), n_(n), cap_(cap), a_(n + 1, 0) {
    pow_.resize(bounds_.levels() + 1);
    pow_[0] = 1;
    for (int d = 1; d <= bounds_.levels(); ++d) pow_[d] = pow_[d - 1] * ell_;
  }

  struct Node {
    int t;  // next position to fill (1-based)
    int p;
    double fixed;  // settled part of the lower bound
    std::vector<int> prefix;  // a[1..t-1]
  };

  /// Nodes at depth `depth` (or complete words, for short n) in lex order.
  std::vector<Node> frontier(int depth) {
    std::vector<Node> out;
    split_depth_ = depth;
    frontier_ = &out;
    gen(1, 1, 0.0);
    frontier_ = nullptr;
    split_depth_ = -1;
    return out;
  }

  void run(const Node& node, std::vector<PrimeOrbit>& sink) {
    for (int i = 1; i < node.t; ++i) a_[i] = node.prefix[i - 1];
    sink_ = &sink;
    gen(node.t, node.p, node.fixed);
    sink_ = nullptr;
  }

 private:
  // Lower bound on the period of any length-n word extending a[1..t], given
  // the settled contribution of positions whose L-digit window is complete.
  double bound(int t, double fixed, double& new_fixed) const {
    const int L = bounds_.levels();
    new_fixed = fixed;
    if (L > 0 && t >= L) {
      std::uint64_t idx = 0;
      for (int i = t - L + 1; i <= t; ++i) idx = idx * ell_ + a_[i];
      new_fixed += bounds_.at(L, idx);
    }
    double partial = 0.0;
    std::uint64_t idx = 0;
    const int first = std::max(1, t - L + 2);
    for (int i = t; i >= first; --i) {
      const int d = t - i + 1;
      idx += static_cast<std::uint64_t>(a_[i]) * pow_[d - 1];
      partial += bounds_.at(d, idx);
    }
    return new_fixed + partial + (n_ - t) * bounds_.global();
  }

  bool admissible(int t, double fixed, double& new_fixed) const {
    if (!std::isfinite(cap_)) {
      new_fixed = fixed;
      return true;
    }
    return bound(t, fixed, new_fixed) <= cap_ + 1e-9 * (1.0 + cap_);
  }

  void gen(int t, int p, double fixed) {
    if (t > n_) {
      if (p == n_) emit();
      return;
    }
    if (t == split_depth_) {
      frontier_->push_back(Node{t, p, fixed, std::vector<int>(a_.begin() + 1, a_.begin() + t)});
      return;
    }
    double nf;
    a_[t] = a_[t - p];
    if (admissible(t, fixed, nf)) gen(t + 1, p, nf);
    for (int d = a_[t - p] + 1; d < ell_; ++d) {
      a_[t] = d;
      if (admissible(t, fixed, nf)) gen(t + 1, t, nf);
    }
  }

  void emit() {
    if (frontier_) {
      // Word shorter than the split depth: hand it over as a finished node.
      frontier_->push_back(Node{n_ + 1, n_, 0.0, std::vector<int>(a_.begin() + 1, a_.end())});
      return;
    }
    std::uint64_t j = 0;
    for (int i = 1; i <= n_; ++i) j = j * ell_ + a_[i];
    if (n_ == 1 && j == static_cast<std::uint64_t>(ell_ - 1)) return;  // duplicates x = 0
    const double period = periodic_birkhoff_sum(f_, n_, j);
    if (period <= cap_) sink_->push_back(PrimeOrbit{n_, j, period});
  }

  const RoofFunction& f_;
  const DyadicBounds& bounds_;
  int ell_;
  int n_;
  double cap_;
  std::vector<int> a_;
  std::vector<std::uint64_t> pow_;
  int split_depth_ = -1;
  std::vector<Node>* frontier_ = nullptr;
  std::vector<PrimeOrbit>* sink_ = nullptr;
};

std::vector<PrimeOrbit> search(const RoofFunction& f, int n_min, int n_max, double cap,
                               int workers) {
  if (n_max > max_word_length(f.ell()))
    throw BudgetError("orbit enumeration: word length " + std::to_string(n_max) +
                      " exceeds 64-bit base-point arithmetic");
  const DyadicBounds bounds(f);
  int split = 1;
  while (std::pow(f.ell(), split) < 512.0) ++split;

  struct Task {
    int n;
    LyndonSearch::Node node;
  };
  std::vector<Task> tasks;
  for (int n = n_min; n <= n_max; ++n) {
    if (std::isfinite(cap) && n * bounds.global() > cap + 1e-9 * (1.0 + cap)) continue;
    LyndonSearch s(f, bounds, n, cap);
    for (auto& node : s.frontier(std::min(split, n + 1))) tasks.push_back(Task{n, std::move(node)});
  }
  std::vector<std::vector<PrimeOrbit>> parts(tasks.size());
  parallel_for(tasks.size(), workers, [&](std::size_t i) {
    LyndonSearch s(f, bounds, tasks[i].n, cap);
    s.run(tasks[i].node, parts[i]);
  });
  std::vector<PrimeOrbit> out;
  std::size_t total = 0;
  for (auto& p : parts) total += p.size();
  out.reserve(total);
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace

std::vector<int> PrimeOrbit::word(int ell) const {
  std::vector<int> w(n);
  std::uint64_t v = j;
  for (int i = n - 1; i >= 0; --i) {
    w[i] = static_cast<int>(v % ell);
    v /= ell;
  }
  return w;
}

std::string PrimeOrbit::word_string(int ell) const {
  std::string s;
  for (int d : word(ell)) s += kDigits[d];
  return s;
}

double PrimeOrbit::x_base(int ell) const {
  return static_cast<double>(j) / static_cast<double>(ipow(ell, n) - 1);
}

double PrimeOrbit::multiplier(int ell) const { return std::pow(static_cast<double>(ell), n); }

double periodic_birkhoff_sum(const RoofFunction& f, int n, std::uint64_t j) {
  const std::uint64_t den = ipow(f.ell(), n) - 1;
  const double dden = static_cast<double>(den);
  CompensatedSum<> acc;
  std::uint64_t num = j;
  for (int i = 0; i < n; ++i) {
    acc.add(f(static_cast<double>(num) / dden));
    num = static_cast<std::uint64_t>((static_cast<unsigned __int128>(num) * f.ell()) % den);
  }
  return acc.value();
}

void check_word_budget(int ell, double n, std::uint64_t max_words, const char* what) {
  const double words = std::pow(static_cast<double>(ell), n);
  if (!(words <= static_cast<double>(max_words))) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%s: work estimate ell^%g = %.3g words exceeds the budget of %llu", what, n,
                  words, static_cast<unsigned long long>(max_words));
    throw BudgetError(buf);
  }
}

std::vector<PrimeOrbit> enumerate_prime_orbits(const RoofFunction& f, int n_max,
                                               const OrbitOptions& opts) {
  if (n_max < 1) throw ValidationError("enumerate_prime_orbits: n_max must be >= 1");
  check_word_budget(f.ell(), n_max, opts.max_words, "enumerate_prime_orbits");
  return search(f, 1, n_max, std::numeric_limits<double>::infinity(), opts.workers);
}

std::vector<PrimeOrbit> prime_orbits_below(const RoofFunction& f, double T,
                                           const OrbitOptions& opts) {
  if (!(T > 0.0)) throw ValidationError("prime_orbits_below: T must be positive");
  const double y_min = f.bounds().y_min > 0 ? f.bounds().y_min : f.lower_bound();
  check_word_budget(f.ell(), std::ceil(T / y_min), opts.max_words, "orbit count");
  const int n_max = static_cast<int>(std::floor(T / f.lower_bound()));
  if (n_max < 1) return {};
  return search(f, 1, n_max, T, opts.workers);
}

long count_pi(std::span<const PrimeOrbit> orbits, double T) {
  long c = 0;
  for (const auto& g : orbits)
    if (g.period <= T) ++c;
  return c;
}

long count_pi(const RoofFunction& f, double T, const OrbitOptions& opts) {
  return count_pi(prime_orbits_below(f, T, opts), T);
}

double count_pi_tilde(std::span<const PrimeOrbit> orbits, int ell, double T) {
  CompensatedSum<> acc;
  for (const auto& g : orbits) {
    const double E = g.multiplier(ell);
    const long reps = static_cast<long>(std::floor(T / g.period));
    double En = 1.0;
    for (long n = 1; n <= reps; ++n) {
      En *= E;
      acc.add(1.0 / (static_cast<double>(n) * (1.0 - 1.0 / En)));
    }
  }
  return acc.value();
}

double count_pi_tilde(const RoofFunction& f, double T, const OrbitOptions& opts) {
  return count_pi_tilde(prime_orbits_below(f, T, opts), f.ell(), T);
}

std::vector<long> pi_series(std::span<const PrimeOrbit> orbits, std::span<const double> grid) {
  std::vector<double> periods;
  periods.reserve(orbits.size());
  for (const auto& g : orbits) periods.push_back(g.period);
  std::sort(periods.begin(), periods.end());
  std::vector<long> out;
  out.reserve(grid.size());
  for (double T : grid)
    out.push_back(std::upper_bound(periods.begin(), periods.end(), T) - periods.begin());
  return out;
}

std::vector<double> pi_tilde_series(std::span<const PrimeOrbit> orbits, int ell,
                                    std::span<const double> grid) {
  double horizon = 0.0;
  for (double T : grid) horizon = std::max(horizon, T);
  std::vector<std::pair<double, double>> events;  // (n |gamma|, weight)
  events.reserve(orbits.size() + orbits.size() / 4);
  for (const auto& g : orbits) {
    const double E = g.multiplier(ell);
    double En = 1.0;
    for (long n = 1; n * g.period <= horizon; ++n) {
      En *= E;
      events.emplace_back(n * g.period, 1.0 / (static_cast<double>(n) * (1.0 - 1.0 / En)));
    }
  }
  std::sort(events.begin(), events.end());
  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid[a] < grid[b]; });
  std::vector<double> out(grid.size(), 0.0);
  CompensatedSum<> acc;
  std::size_t e = 0;
  for (std::size_t idx : order) {
    while (e < events.size() && events[e].first <= grid[idx]) acc.add(events[e++].second);
    out[idx] = acc.value();
  }
  return out;
}

void write_orbit_cache(std::ostream& out, const RoofFunction& f, int n_max,
                       std::span<const PrimeOrbit> orbits) {
  out << kOrbitCacheFormat << " v" << kOrbitCacheVersion << " ell=" << f.ell()
      << " roof=" << f.digest() << " n_max=" << n_max << '\n';
  char buf[64];
  for (const auto& g : orbits) {
    std::snprintf(buf, sizeof buf, "%.17g", g.period);
    out << g.n << ',' << g.word_string(f.ell()) << ',' << buf << '\n';
  }
}

OrbitCache read_orbit_cache(std::istream& in, const RoofFunction& f) {
  std::string header;
  if (!std::getline(in, header)) throw ValidationError("orbit cache: empty file");
  std::istringstream hs(header);
  std::string format, version, ell_kv, roof_kv, nmax_kv;
  hs >> format >> version >> ell_kv >> roof_kv >> nmax_kv;
  if (format != kOrbitCacheFormat || version != "v" + std::to_string(kOrbitCacheVersion))
    throw ValidationError("orbit cache: unrecognized header '" + header + "'");
  auto value = [&](const std::string& kv, const std::string& key) {
    if (kv.rfind(key + "=", 0) != 0)
      throw ValidationError("orbit cache: expected " + key + "= in header");
    return kv.substr(key.size() + 1);
  };
  OrbitCache cache;
  cache.ell = std::stoi(value(ell_kv, "ell"));
  cache.roof_digest = value(roof_kv, "roof");
  cache.n_max = std::stoi(value(nmax_kv, "n_max"));
  if (cache.ell != f.ell() || cache.roof_digest != f.digest())
    throw ValidationError("orbit cache: built for roof " + cache.roof_digest +
                          ", current roof is " + f.digest() + " (stale cache refused)");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw ValidationError("orbit cache: malformed row '" + line + "'");
    PrimeOrbit g;
    g.n = std::stoi(line.substr(0, c1));
    const std::string word = line.substr(c1 + 1, c2 - c1 - 1);
    if (static_cast<int>(word.size()) != g.n)
      throw ValidationError("orbit cache: word length mismatch in '" + line + "'");
    for (char ch : word) {
      const char* pos = std::char_traits<char>::find(kDigits, f.ell(), ch);
      if (!pos) throw ValidationError("orbit cache: bad digit in '" + line + "'");
      g.j = g.j * f.ell() + static_cast<std::uint64_t>(pos - kDigits);
    }
    g.period = std::stod(line.substr(c2 + 1));
    cache.orbits.push_back(g);
  }
  return cache;
}

}  // namespace suspflow
