#include "suspflow/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <variant>

#include "suspflow/aniso.hpp"
#include "suspflow/config.hpp"
#include "suspflow/errors.hpp"
#include "suspflow/exponents.hpp"
#include "suspflow/numerics.hpp"
#include "suspflow/orbits.hpp"
#include "suspflow/potlab.hpp"
#include "suspflow/semiflow.hpp"
#include "suspflow/spectral.hpp"
#include "suspflow/transversality.hpp"

namespace suspflow {

namespace {

using json = nlohmann::ordered_json;
using Cell = std::variant<double, long long, std::string, bool, std::vector<double>,
                          std::vector<long long>>;

std::string real_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
  json summary = json::object();
  std::vector<std::string> warnings;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      c);
}

std::string cell_csv(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return real_text(v);
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          return q + "\"";
        } else {
          std::string s;
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ';';
            if constexpr (std::is_same_v<T, std::vector<double>>)
              s += real_text(v[i]);
            else
              s += std::to_string(v[i]);
          }
          return s;
        }
      },
      c);
}

void render(std::ostream& os, const std::string& command, const RunConfig& cfg, const Table& t) {
  const std::string digest = cfg.digest();
  if (cfg.format == "csv") {
    os << "config_digest";
    for (const auto& h : t.header) os << ',' << h;
    os << '\n';
    for (const auto& row : t.rows) {
      os << digest;
      for (const auto& c : row) os << ',' << cell_csv(c);
      os << '\n';
    }
    return;
  }
  json j;
  j["command"] = command;
  j["config_digest"] = digest;
  if (!t.summary.empty()) j["summary"] = t.summary;
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r;
    for (std::size_t i = 0; i < row.size(); ++i) r[t.header[i]] = cell_json(row[i]);
    rows.push_back(r);
  }
  j["rows"] = rows;
  if (!t.warnings.empty()) j["warnings"] = t.warnings;
  os << j.dump(2) << '\n';
}

struct Common {
  std::string roof_path;
  std::optional<int> workers;
  std::string format;
  std::string output;
};

RunConfig load_config(const Common& c) {
  RunConfig cfg = c.roof_path.empty() ? RunConfig{} : RunConfig::load(c.roof_path);
  if (c.workers) {
    if (*c.workers < 1) throw ValidationError("--workers must be >= 1");
    cfg.workers = *c.workers;
  }
  if (!c.format.empty()) cfg.format = c.format;
  if (!c.output.empty()) cfg.output = c.output;
  return cfg;
}

RoofFunction checked_roof(const RunConfig& cfg) {
  RoofFunction f = cfg.roof();
  const ClassReport rep = validate_class(f);
  if (!rep.passed()) {
    std::string which;
    if (!rep.positive.passed) which += " positive";
    if (!rep.value_bounds.passed) which += " value_bounds";
    if (!rep.first_derivative.passed) which += " first_derivative";
    if (!rep.second_derivative.passed) which += " second_derivative";
    throw ValidationError("roof is not in the declared class; failed:" + which);
  }
  return f;
}

std::vector<double> parse_reals(const std::string& text, std::size_t count, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) throw ValidationError(std::string(flag) + ": not a number list");
    out.push_back(v);
  }
  if (out.size() != count)
    throw ValidationError(std::string(flag) + ": expected " + std::to_string(count) + " values");
  return out;
}

Window parse_window(const std::string& text) {
  const auto v = parse_reals(text, 3, "--window");
  return Window{v[0], v[1], v[2]};
}

// ---- subcommands -----------------------------------------------------------

struct OrbitsArgs {
  std::optional<int> n_max;
  std::optional<double> T;
  std::string cache;
};

Table run_orbits(const RunConfig& cfg, const OrbitsArgs& a) {
  const RoofFunction f = checked_roof(cfg);
  if (a.n_max.has_value() == a.T.has_value())
    throw ValidationError("orbits: give exactly one of --n-max and --T");
  std::vector<PrimeOrbit> orbits;
  Table t;
  if (a.n_max) {
    bool cached = false;
    if (!a.cache.empty()) {
      std::ifstream in(a.cache);
      if (in) {
        OrbitCache c = read_orbit_cache(in, f);
        if (c.n_max >= *a.n_max) {
          for (const auto& g : c.orbits)
            if (g.n <= *a.n_max) orbits.push_back(g);
          cached = true;
        }
      }
    }
    if (!cached) {
      orbits = enumerate_prime_orbits(f, *a.n_max, cfg.orbit_options());
      if (!a.cache.empty()) {
        std::ofstream out(a.cache);
        if (!out) throw ValidationError("orbits: cannot write cache " + a.cache);
        write_orbit_cache(out, f, *a.n_max, orbits);
      }
    }
  } else {
    if (!a.cache.empty()) throw ValidationError("orbits: --cache requires --n-max");
    orbits = prime_orbits_below(f, *a.T, cfg.orbit_options());
  }
  t.header = {"n", "word", "x", "period", "multiplier"};
  for (const auto& g : orbits)
    t.add({static_cast<long long>(g.n), g.word_string(f.ell()), g.x_base(f.ell()), g.period,
           g.multiplier(f.ell())});
  t.summary["count"] = orbits.size();
  return t;
}

Table run_count(const RunConfig& cfg, double T) {
  const RoofFunction f = checked_roof(cfg);
  const auto orbits = prime_orbits_below(f, T, cfg.orbit_options());
  Table t;
  t.header = {"T", "pi", "pi_tilde"};
  t.add({T, static_cast<long long>(count_pi(orbits, T)), count_pi_tilde(orbits, f.ell(), T)});
  return t;
}

Table run_entropy(const RunConfig& cfg, int N, double tol) {
  const RoofFunction f = checked_roof(cfg);
  const double h = entropy(f, N, tol);
  const double log_ell = std::log(static_cast<double>(f.ell()));
  Table t;
  t.header = {"h", "N", "bracket_lo", "bracket_hi", "lambda_at_h"};
  t.add({h, static_cast<long long>(N), log_ell / f.bounds().y_max, log_ell / f.bounds().y_min,
         leading_eigenvalue(f, h, N)});
  return t;
}

struct ResonanceArgs {
  std::string window;
  int N = 32;
  double tol = 1e-10;
  double grid_step = 0.25;
};

ResonanceSet compute_resonances(const RunConfig& cfg, const RoofFunction& f,
                                const ResonanceArgs& a) {
  ResonanceOptions opts;
  opts.grid_step = a.grid_step;
  opts.workers = cfg.workers;
  return resonances(f, parse_window(a.window), a.N, a.tol, opts);
}

void note_unconverged(Table& t, const ResonanceSet& rs) {
  for (const auto& s : rs.unconverged_seeds) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "Newton seed at %.6g%+.6gi did not converge", s.real(),
                  s.imag());
    t.warnings.push_back(buf);
  }
}

Table run_resonances(const RunConfig& cfg, const ResonanceArgs& a) {
  const RoofFunction f = checked_roof(cfg);
  const ResonanceSet rs = compute_resonances(cfg, f, a);
  Table t;
  t.header = {"status", "mu_re", "mu_im", "residual", "N", "degenerate"};
  for (const auto& r : rs.entries)
    t.add({std::string("converged"), r.mu.real(), r.mu.imag(), r.residual,
           static_cast<long long>(r.N), r.degenerate});
  for (const auto& s : rs.unconverged_seeds)
    t.add({std::string("unconverged_seed"), s.real(), s.imag(),
           std::numeric_limits<double>::quiet_NaN(), static_cast<long long>(a.N), false});
  t.summary["h"] = rs.h;
  note_unconverged(t, rs);
  return t;
}

Table run_exponents(const RunConfig& cfg, int n_max, int N) {
  const RoofFunction f = checked_roof(cfg);
  const ExponentReport r = exponent_report(f, n_max, N, cfg.orbit_options());
  Table t;
  t.header = {"chi_min", "chi_max",  "chi_bar_min", "chi_bar_max",
              "h",       "alpha",    "p_star",      "predicted_error_exponent",
              "n_used",  "N_used",   "rho",         "rho_bar"};
  t.add({r.chi_min, r.chi_max, r.chi_bar_min, r.chi_bar_max, r.h, r.alpha,
         static_cast<long long>(r.p_star), r.predicted_error_exponent,
         static_cast<long long>(r.n_used), static_cast<long long>(r.N_used), r.rho, r.rho_bar});
  if (!r.sandwich_holds()) t.warnings.push_back("Lyapunov sandwich violated beyond 1e-6");
  return t;
}

struct PotArgs {
  double T_min = 16.0;
  double T_max = 26.0;
  double T_step = 0.1;
  double cutoff = 0.0;
  ResonanceArgs res;
};

Table run_pot(const RunConfig& cfg, const PotArgs& a) {
  const RoofFunction f = checked_roof(cfg);
  if (!(a.T_step > 0.0) || !(a.T_min >= 1.0) || !(a.T_max >= a.T_min))
    throw ValidationError("pot-check: need 1 <= T-min <= T-max and T-step > 0");
  std::vector<double> grid;
  const long steps = std::lround(std::floor((a.T_max - a.T_min) / a.T_step + 1e-9));
  for (long i = 0; i <= steps; ++i) grid.push_back(a.T_min + i * a.T_step);
  const auto orbits = prime_orbits_below(f, grid.back(), cfg.orbit_options());
  const ResonanceSet rs = compute_resonances(cfg, f, a.res);
  const PotSeries ps = pot_series(orbits, f.ell(), grid, rs, a.cutoff);
  Table t;
  t.header = {"T", "pi", "pi_tilde", "leading", "correction", "residual"};
  for (std::size_t i = 0; i < grid.size(); ++i)
    t.add({ps.T[i], static_cast<long long>(ps.pi[i]), ps.pi_tilde[i], ps.leading[i],
           ps.correction[i], ps.residual[i]});
  json windows = json::array();
  for (const auto& w : ps.windows)
    windows.push_back({{"T_begin", w.T_begin},
                       {"T_end", w.T_end},
                       {"points", w.points},
                       {"sign", w.sign},
                       {"peak_T", w.peak_T},
                       {"peak_abs", w.peak_abs},
                       {"used", w.used}});
  t.summary["h"] = rs.h;
  t.summary["cutoff"] = a.cutoff;
  t.summary["fitted_exponent"] =
      std::isfinite(ps.fitted_exponent) ? json(ps.fitted_exponent) : json(nullptr);
  t.summary["fit_windows_used"] = ps.fit_windows_used;
  t.summary["windows"] = windows;
  t.warnings = ps.warnings;
  note_unconverged(t, rs);
  return t;
}

struct FlatArgs {
  double t0 = 8.0;
  double t1 = 10.0;
  double cutoff = 0.0;
  ResonanceArgs res;
};

Table run_flat(const RunConfig& cfg, const FlatArgs& a) {
  const RoofFunction f = checked_roof(cfg);
  const TestFunction phi(a.t0, a.t1);
  const double orbit = flat_trace_orbit_side(f, phi, cfg.orbit_options());
  const ResonanceSet rs = compute_resonances(cfg, f, a.res);
  const double spectral = flat_trace_spectral_side(rs, phi, a.cutoff);
  long long used = 0;
  for (const auto& r : rs.entries) used += r.mu.real() > a.cutoff;
  Table t;
  t.header = {"t0", "t1", "cutoff", "orbit_side", "spectral_side", "difference", "resonances_used"};
  t.add({a.t0, a.t1, a.cutoff, orbit, spectral, orbit - spectral, used});
  note_unconverged(t, rs);
  return t;
}

Table run_backward(const RunConfig& cfg, double x, double y, double time) {
  const RoofFunction f = checked_roof(cfg);
  if (!(time > 0.0)) throw ValidationError("backward: --t must be positive");
  const FlowPoint z = normalize(f, FlowPoint{frac(x), y});
  const auto branches = backward_orbit(f, z, time, cfg.workers);
  Table t;
  t.header = {"k", "j", "x", "y", "E", "F", "S", "crossing_times"};
  for (const auto& b : branches)
    t.add({static_cast<long long>(b.k), static_cast<long long>(b.j), b.w.x, b.w.y, b.cocycle.E,
           b.cocycle.F, b.cocycle.S, b.crossing_times});
  t.summary["z"] = {z.x, z.y};
  t.summary["count"] = branches.size();
  return t;
}

struct TransArgs {
  double t = 6.0;
  std::string J;
  int p = 1;
  double epsilon = 0.1;
  int n = 6;
  int samples = 4;
  std::optional<std::uint64_t> seed;
  double delta = 1e-3;
};

Table run_transversality(const RunConfig& cfg, const TransArgs& a) {
  const RoofFunction f = checked_roof(cfg);
  const ConeParams cone = cfg.cone();
  const auto J = parse_reals(a.J, 2, "--J");
  if (a.samples < 1) throw ValidationError("transversality: --samples must be >= 1");
  std::mt19937_64 rng(a.seed.value_or(cfg.seed));
  std::vector<FlowPoint> zs;
  for (int i = 0; i < a.samples; ++i) {
    // 53-bit uniforms from the raw engine output, independent of the
    // standard library's distribution implementation.
    const double x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    zs.push_back(FlowPoint{x, u * f(x)});
  }
  GenericOptions opts;
  opts.delta = a.delta;
  opts.greedy.sum.max_tuples = cfg.max_tuples;
  opts.greedy.sum.workers = cfg.workers;
  const auto reports = check_generic_condition(f, zs, a.t, J[0], J[1], a.p, a.epsilon, a.n, cone, opts);
  Table t;
  t.header = {"x",         "y",        "branch_count", "q",          "exceptional",
              "sup_value", "xi_at_sup", "threshold",   "log_margin", "pass",
              "skipped",   "notice"};
  for (const auto& r : reports) {
    std::vector<long long> ex(r.exceptional.begin(), r.exceptional.end());
    t.add({r.z.x, r.z.y, static_cast<long long>(r.branch_count), static_cast<long long>(r.q), ex,
           r.sup_value, r.xi_at_sup, r.threshold, r.log_margin, r.pass, r.skipped, r.notice});
  }
  t.summary["t"] = a.t;
  t.summary["J"] = {J[0], J[1]};
  t.summary["p"] = a.p;
  t.summary["epsilon"] = a.epsilon;
  t.summary["n"] = a.n;
  t.summary["theta0"] = cone.theta0;
  return t;
}

struct NormArgs {
  Grid2D grid{64, 256, 64.0, 800.0};
  double r = 0.0;
  int p = 1;
  double sigma_x = 4.0;
  double sigma_y = 100.0;
  double xi0 = 0.0;
  double eta0 = 0.0;
  double S = 0.0;
  double E = 1.0;
};

Table run_norm(const RunConfig& cfg, const NormArgs& a) {
  const RoofFunction f = cfg.roof();
  const double theta0 = make_cone(f, cfg.gamma0, cfg.r).theta0;
  PartitionParams params{theta0, a.r, a.p, a.grid};
  std::vector<std::complex<double>> u(static_cast<std::size_t>(a.grid.nx) * a.grid.ny);
  for (int i = 0; i < a.grid.nx; ++i)
    for (int j = 0; j < a.grid.ny; ++j) {
      const double x = a.grid.x(i), y = a.grid.y(j);
      const double g = std::exp(-0.5 * (x * x / (a.sigma_x * a.sigma_x) +
                                        y * y / (a.sigma_y * a.sigma_y)));
      u[static_cast<std::size_t>(i) * a.grid.ny + j] = g * std::polar(1.0, a.xi0 * x + a.eta0 * y);
    }
  const NormResult nr = brp_norm(u, params, Frame{a.S, a.E}, cfg.workers);
  Table t;
  t.header = {"n", "m", "cell_norm", "weighted"};
  for (const auto& c : nr.cells)
    t.add({static_cast<long long>(c.n), static_cast<long long>(c.m), c.norm,
           std::pow(2.0, a.r * c.m) * c.norm});
  t.summary["norm"] = nr.value;
  t.summary["l2"] = l2_norm(u, a.grid);
  t.summary["theta0"] = theta0;
  t.warnings = nr.warnings;
  return t;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Suspension semiflows: prime orbits, resonances and transversality diagnostics",
               "suspflow"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--roof", common.roof_path, "configuration file");
    sub->add_option("--workers", common.workers, "worker threads");
    sub->add_option("--format", common.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output", common.output, "output file (default: standard output)");
  };
  auto add_resonance_flags = [](CLI::App* sub, ResonanceArgs& r, bool required) {
    auto* w = sub->add_option("--window", r.window, "re_min,re_max,im_max");
    if (required) w->required();
    sub->add_option("--N", r.N, "Fourier truncation");
    sub->add_option("--tol", r.tol, "Newton tolerance");
    sub->add_option("--grid-step", r.grid_step, "seed grid spacing");
  };

  std::function<Table(const RunConfig&)> job;

  OrbitsArgs orbits_args;
  auto* orbits = app.add_subcommand("orbits", "enumerate prime periodic orbits");
  add_common(orbits);
  orbits->add_option("--n-max", orbits_args.n_max, "maximal word length");
  orbits->add_option("--T", orbits_args.T, "maximal period");
  orbits->add_option("--cache", orbits_args.cache, "orbit cache file (with --n-max)");
  orbits->callback([&] { job = [&](const RunConfig& c) { return run_orbits(c, orbits_args); }; });

  double count_T = 0.0;
  auto* count = app.add_subcommand("count", "pi(T) and pi-tilde(T)");
  add_common(count);
  count->add_option("--T", count_T, "period bound")->required();
  count->callback([&] { job = [&](const RunConfig& c) { return run_count(c, count_T); }; });

  int entropy_N = 32;
  double entropy_tol = 1e-14;
  auto* ent = app.add_subcommand("entropy", "topological entropy");
  add_common(ent);
  ent->add_option("--N", entropy_N, "Fourier truncation");
  ent->add_option("--tol", entropy_tol, "tolerance on |lambda - 1|");
  ent->callback([&] {
    job = [&](const RunConfig& c) { return run_entropy(c, entropy_N, entropy_tol); };
  });

  ResonanceArgs res_args;
  auto* res = app.add_subcommand("resonances", "resonances in a window");
  add_common(res);
  add_resonance_flags(res, res_args, true);
  res->callback([&] { job = [&](const RunConfig& c) { return run_resonances(c, res_args); }; });

  int exp_n_max = 12, exp_N = 32;
  auto* exps = app.add_subcommand("exponents", "Lyapunov exponents and rho_p table");
  add_common(exps);
  exps->add_option("--n-max", exp_n_max, "cycle-mean search depth");
  exps->add_option("--N", exp_N, "Fourier truncation for the entropy");
  exps->callback([&] {
    job = [&](const RunConfig& c) { return run_exponents(c, exp_n_max, exp_N); };
  });

  PotArgs pot_args;
  auto* pot = app.add_subcommand("pot-check", "prime orbit counting residual series");
  add_common(pot);
  pot->add_option("--T-min", pot_args.T_min);
  pot->add_option("--T-max", pot_args.T_max);
  pot->add_option("--T-step", pot_args.T_step);
  pot->add_option("--cutoff", pot_args.cutoff, "resonances with Re mu above this are subtracted")
      ->required();
  add_resonance_flags(pot, pot_args.res, true);
  pot->callback([&] { job = [&](const RunConfig& c) { return run_pot(c, pot_args); }; });

  FlatArgs flat_args;
  auto* flat = app.add_subcommand("flat-trace", "orbit and spectral sides of the flat trace");
  add_common(flat);
  flat->add_option("--t0", flat_args.t0);
  flat->add_option("--t1", flat_args.t1);
  flat->add_option("--cutoff", flat_args.cutoff)->required();
  add_resonance_flags(flat, flat_args.res, true);
  flat->callback([&] { job = [&](const RunConfig& c) { return run_flat(c, flat_args); }; });

  double bx = 0.0, by = 0.0, bt = 0.0;
  auto* back = app.add_subcommand("backward", "backward orbit branches");
  add_common(back);
  back->add_option("--x", bx)->required();
  back->add_option("--y", by)->required();
  back->add_option("--t", bt)->required();
  back->callback([&] { job = [&](const RunConfig& c) { return run_backward(c, bx, by, bt); }; });

  TransArgs trans_args;
  auto* trans = app.add_subcommand("transversality", "generic-condition diagnostics");
  add_common(trans);
  trans->add_option("--t", trans_args.t);
  trans->add_option("--J", trans_args.J, "a,b")->required();
  trans->add_option("--p", trans_args.p);
  trans->add_option("--epsilon", trans_args.epsilon);
  trans->add_option("--n", trans_args.n);
  trans->add_option("--samples", trans_args.samples);
  trans->add_option("--seed", trans_args.seed);
  trans->add_option("--delta", trans_args.delta, "Per_delta radius");
  trans->callback([&] {
    job = [&](const RunConfig& c) { return run_transversality(c, trans_args); };
  });

  NormArgs norm_args;
  auto* norm = app.add_subcommand("norm-check", "anisotropic norm of a Gaussian test function");
  add_common(norm);
  norm->add_option("--nx", norm_args.grid.nx);
  norm->add_option("--ny", norm_args.grid.ny);
  norm->add_option("--Lx", norm_args.grid.Lx);
  norm->add_option("--Ly", norm_args.grid.Ly);
  norm->add_option("--r", norm_args.r);
  norm->add_option("--p", norm_args.p);
  norm->add_option("--sigma-x", norm_args.sigma_x);
  norm->add_option("--sigma-y", norm_args.sigma_y);
  norm->add_option("--xi0", norm_args.xi0);
  norm->add_option("--eta0", norm_args.eta0);
  norm->add_option("--S", norm_args.S);
  norm->add_option("--E", norm_args.E);
  norm->callback([&] { job = [&](const RunConfig& c) { return run_norm(c, norm_args); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig cfg = load_config(common);
    const Table table = job(cfg);
    const std::string path = resolve_output_path(cfg.output);
    if (path.empty() || path == "-") {
      render(out, command, cfg, table);
    } else {
      std::ofstream file(path);
      if (!file) throw ValidationError("cannot open output file " + path);
      render(file, command, cfg, table);
    }
    for (const auto& w : table.warnings) err << "warning: " << w << '\n';
    return kExitOk;
  } catch (const BudgetError& e) {
    err << "budget refused: " << e.what() << '\n';
    return kExitBudget;
  } catch (const ValidationError& e) {
    err << "validation failed: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace suspflow
