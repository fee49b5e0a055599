#include "suspflow/semiflow.hpp"

#include <algorithm>
#include <cmath>

#include "suspflow/errors.hpp"
#include "suspflow/numerics.hpp"
#include "suspflow/parallel.hpp"

namespace suspflow {

namespace {

constexpr int kMaxDepth = 62;

struct Frame {
  int d;
  std::uint64_t j;
  std::uint64_t scale;  // ell^d
  double partial;       // S_d = sum_{i=1..d} f(x_{-i})
  double partial_comp;  // compensation term for S_d
};

// Depth-first first-passage enumeration below `root`. Frames reaching
// `split_depth` without terminating are handed to `defer` instead of being
// expanded (split_depth <= 0 disables this).
template <typename Emit, typename Defer>
void backward_dfs(const RoofFunction& f, FlowPoint z, double t, Frame root, int split_depth,
                  Emit&& emit, Defer&& defer) {
  const int ell = f.ell();
  std::vector<Frame> stack{root};
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    if (fr.d >= kMaxDepth)
      throw BudgetError("backward orbit: depth exceeds 62 crossings");
    const std::uint64_t next_scale = fr.scale * static_cast<std::uint64_t>(ell);
    for (int digit = ell - 1; digit >= 0; --digit) {
      const std::uint64_t j = fr.j + static_cast<std::uint64_t>(digit) * fr.scale;
      const double xp = (z.x + static_cast<double>(j)) / static_cast<double>(next_scale);
      const double v = f(xp);
      const double s = fr.partial + v;
      const double c = fr.partial_comp + (std::abs(fr.partial) >= std::abs(v)
                                              ? (fr.partial - s) + v
                                              : (v - s) + fr.partial);
      const double height = z.y + (s + c) - t;
      if (height >= 0.0) {
        emit(fr.d + 1, j, FlowPoint{xp, height});
      } else if (fr.d + 1 == split_depth) {
        defer(Frame{fr.d + 1, j, next_scale, s, c});
      } else {
        stack.push_back(Frame{fr.d + 1, j, next_scale, s, c});
      }
    }
  }
}

CocycleData cocycle_along_path(const RoofFunction& f, double x, std::uint64_t j, int k) {
  CocycleData cd;
  cd.crossings = k;
  cd.E = std::pow(static_cast<double>(f.ell()), k);
  if (f.is_constant() || k == 0) return cd;
  // F = sum_{i=0}^{k-1} ell^i f'(tau^i x_w), tau^i x_w = x_{-(k-i)}.
  CompensatedSum<> acc;
  double scale = 1.0;
  for (int i = 0; i < k; ++i) {
    acc.add(scale * f.derivative(backward_point(f.ell(), x, j, k - i)));
    scale *= f.ell();
  }
  cd.F = acc.value();
  cd.S = -cd.F / cd.E;
  return cd;
}

}  // namespace

double backward_point(int ell, double x, std::uint64_t j, int d) {
  const std::uint64_t m = ipow(static_cast<std::uint64_t>(ell), d);
  return (x + static_cast<double>(j % m)) / static_cast<double>(m);
}

FlowPoint normalize(const RoofFunction& f, FlowPoint z) {
  z.x = frac(z.x);
  if (z.y < 0.0) throw ValidationError("flow point with negative height");
  for (;;) {
    const double h = f(z.x);
    if (z.y < h) return z;
    z.y -= h;
    z.x = f.tau(z.x);
  }
}

double flow_distance(const RoofFunction& f, FlowPoint a, FlowPoint b) {
  auto direct = [](FlowPoint p, FlowPoint q) {
    return circle_distance(p.x, q.x) + std::abs(p.y - q.y);
  };
  double d = direct(a, b);
  // Points near the roof are close to their images on the base.
  auto lift = [&](FlowPoint p) { return FlowPoint{f.tau(p.x), p.y - f(p.x)}; };
  d = std::min(d, direct(lift(a), b));
  d = std::min(d, direct(a, lift(b)));
  return d;
}

FlowPoint flow(const RoofFunction& f, FlowPoint z, double t) {
  if (t < 0.0) throw ValidationError("flow: negative time");
  const double target = z.y + t;
  CompensatedSum<> acc;
  double x = z.x;
  for (;;) {
    CompensatedSum<> next = acc;
    next.add(f(x));
    if (next.value() > target) break;
    acc = next;
    x = f.tau(x);
  }
  return FlowPoint{x, target - acc.value()};
}

CocycleData cocycle(const RoofFunction& f, FlowPoint z, double t) {
  const long n = hitting_count(f, z.x, z.y + t);
  CocycleData cd;
  cd.crossings = n;
  cd.E = std::pow(static_cast<double>(f.ell()), static_cast<double>(n));
  cd.F = birkhoff_derivative(f, z.x, n);
  cd.S = -cd.F / cd.E;
  return cd;
}

std::vector<BackwardBranch> backward_orbit(const RoofFunction& f, FlowPoint z, double t,
                                           int workers) {
  if (!(t > 0.0)) throw ValidationError("backward_orbit: t must be positive");
  std::vector<BackwardBranch> out;
  auto make = [&](int k, std::uint64_t j, FlowPoint w) {
    BackwardBranch b;
    b.w = w;
    b.k = k;
    b.j = j;
    b.cocycle = cocycle_along_path(f, z.x, j, k);
    b.crossing_times = crossing_times(f, z, b, t);
    return b;
  };
  if (z.y >= t) {
    out.push_back(make(0, 0, FlowPoint{z.x, z.y - t}));
    return out;
  }

  // The top ell^2 subtrees are independent tasks; the final sort makes the
  // result independent of how they were scheduled.
  std::vector<Frame> subtrees;
  auto emit_top = [&](int k, std::uint64_t j, FlowPoint w) { out.push_back(make(k, j, w)); };
  backward_dfs(f, z, t, Frame{0, 0, 1, 0.0, 0.0}, 2, emit_top,
               [&](Frame fr) { subtrees.push_back(fr); });
  std::vector<std::vector<BackwardBranch>> parts(subtrees.size());
  parallel_for(subtrees.size(), workers, [&](std::size_t i) {
    backward_dfs(
        f, z, t, subtrees[i], 0,
        [&](int k, std::uint64_t j, FlowPoint w) { parts[i].push_back(make(k, j, w)); },
        [](Frame) {});
  });
  for (auto& p : parts)
    for (auto& b : p) out.push_back(std::move(b));
  std::sort(out.begin(), out.end(), [](const BackwardBranch& a, const BackwardBranch& b) {
    return a.k != b.k ? a.k < b.k : a.j < b.j;
  });
  return out;
}

std::uint64_t count_backward(const RoofFunction& f, FlowPoint z, double t) {
  if (!(t > 0.0)) throw ValidationError("count_backward: t must be positive");
  if (z.y >= t) return 1;
  std::uint64_t count = 0;
  backward_dfs(
      f, z, t, Frame{0, 0, 1, 0.0, 0.0}, 0, [&](int, std::uint64_t, FlowPoint) { ++count; },
      [](Frame) {});
  return count;
}

std::vector<double> crossing_times(const RoofFunction& f, FlowPoint z,
                                   const BackwardBranch& branch, double t) {
  if (branch.k < 0 || branch.k >= kMaxDepth ||
      branch.j >= ipow(static_cast<std::uint64_t>(f.ell()), branch.k))
    throw ValidationError("crossing_times: malformed branch");
  const double xw = backward_point(f.ell(), z.x, branch.j, branch.k);
  if (circle_distance(xw, branch.w.x) > kForwardCheckTol)
    throw ValidationError("crossing_times: branch does not start on the backward path of z");
  std::vector<double> times;
  times.reserve(branch.k);
  CompensatedSum<> partial;  // S_{i-1}
  for (int i = 1; i <= branch.k; ++i) {
    times.push_back(t - z.y - partial.value());
    partial.add(f(backward_point(f.ell(), z.x, branch.j, i)));
  }
  // After k crossings the segment must close: y_w = y + S_k - t.
  const double expected_height = z.y + partial.value() - t;
  if (std::abs(expected_height - branch.w.y) > kForwardCheckTol ||
      (branch.k > 0 && !(times.back() > 0.0)))
    throw ValidationError("crossing_times: branch does not belong to (z, t)");
  return times;
}

}  // namespace suspflow
