// Command-line front end for the secant-map dynamics library: basin
// rendering, orbit traces, focal-point reports, the parity experiment, and
// the identity verification suite.
//
// Exit codes: 0 success, 1 usage/config error, 2 runtime failure,
// 3 verify-suite failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "secdyn/basin.hpp"
#include "secdyn/focal.hpp"
#include "secdyn/polynomial.hpp"
#include "secdyn/secant_map.hpp"
#include "secdyn/verify.hpp"

namespace {

using namespace secdyn;

struct PolyArgs {
  std::string coeffs;
  std::string factored;
};

struct LimitArgs {
  int max_iter = 0;  // filled with the per-command default
  double conv_tol = 1e-8;
  int conv_streak = 3;
  double escape_radius = 1e8;
  double pole_guard = 1e-12;

  OrbitLimits to_limits() const {
    OrbitLimits l;
    l.max_iter = max_iter;
    l.conv_tol = conv_tol;
    l.conv_streak = conv_streak;
    l.escape_radius = escape_radius;
    l.pole_guard = pole_guard;
    return l;
  }
};

void add_poly_options(CLI::App* cmd, PolyArgs& pa) {
  auto* c = cmd->add_option("--coeffs", pa.coeffs,
                            "Polynomial coefficients 'a0 a1 ... ak' (low order first); real "
                            "roots are detected numerically");
  auto* f = cmd->add_option("--factored", pa.factored,
                            "Factored form '(alpha multiplicity)... [residual coeffs]'");
  c->excludes(f);
  f->excludes(c);
}

void add_limit_options(CLI::App* cmd, LimitArgs& la, int default_max_iter) {
  la.max_iter = default_max_iter;
  cmd->add_option("--max-iter", la.max_iter, "Iteration cap per orbit");
  cmd->add_option("--conv-tol", la.conv_tol, "Convergence box half-width around a fixed point");
  cmd->add_option("--conv-streak", la.conv_streak, "Consecutive in-box iterates required");
  cmd->add_option("--escape-radius", la.escape_radius, "Escape classification radius");
  cmd->add_option("--pole-guard", la.pole_guard, "Near-pole guard for the secant step");
}

Polynomial make_polynomial(const PolyArgs& pa) {
  if (!pa.factored.empty()) return parse_factored(pa.factored);
  if (pa.coeffs.empty())
    throw ValidationError("usage", "a polynomial is required: --coeffs or --factored");
  Polynomial base = parse_coeffs(pa.coeffs);
  const auto roots = find_real_roots(base.coeffs());
  if (roots.empty()) return base;
  return Polynomial::with_roots(base.coeffs(), roots);
}

// ---------------------------------------------------------------------------
// Flat "key = value" config files. Values are re-tokenized as command-line
// options and parsed before the user's flags, so explicit flags win.

bool config_key_is_flag(const std::string& key) {
  return key == "quadrant";
}

bool config_key_is_string(const std::string& key) {
  return key == "coeffs" || key == "factored" || key == "out" || key == "sweep" ||
         key == "kappas";
}

std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("config", "cannot open config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  };
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config", "config line " + std::to_string(lineno) +
                                          ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                              (value.front() == '\'' && value.back() == '\'')))
      value = value.substr(1, value.size() - 2);
    if (key.empty() || (value.empty() && !config_key_is_flag(key)))
      throw ValidationError("config", "config line " + std::to_string(lineno) +
                                          ": empty key or value");
    if (config_key_is_flag(key)) {
      if (value.empty() || value == "true" || value == "1" || value == "yes")
        tokens.push_back("--" + key);
      continue;
    }
    tokens.push_back("--" + key);
    if (config_key_is_string(key)) {
      tokens.push_back(value);
    } else {
      std::istringstream vs(value);
      std::string part;
      while (vs >> part) tokens.push_back(part);
    }
  }
  return tokens;
}

// ---------------------------------------------------------------------------

std::string class_label(const Polynomial& p, std::int16_t cell) {
  if (cell >= 0) {
    std::ostringstream os;
    os << "Converged(root " << cell << ", alpha=" << p.root(cell).alpha << ")";
    return os.str();
  }
  if (cell == kCellNearPole) return "NearPole";
  if (cell == kCellEscaped) return "Escaped";
  return "NonConvergent";
}

int cmd_render(const PolyArgs& pa, const LimitArgs& la, const std::vector<double>& window,
               const std::vector<int>& size, int workers, const std::string& out) {
  const Polynomial p = make_polynomial(pa);
  Window w;
  w.x_min = window[0];
  w.x_max = window[1];
  w.y_min = window[2];
  w.y_max = window[3];
  w.width = size[0];
  w.height = size[1];

  const auto t0 = std::chrono::steady_clock::now();
  const BasinGrid grid = render_basin(p, w, la.to_limits(), workers);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_image(grid, out);

  std::map<std::int16_t, long> hist;
  for (const auto c : grid.cells) ++hist[c];
  std::cout << "polynomial: " << p.describe() << "\n";
  for (const auto& [cell, count] : hist)
    std::cout << "  " << class_label(p, cell) << ": " << count << " cells ("
              << 100.0 * static_cast<double>(count) / static_cast<double>(grid.cells.size())
              << "%)\n";
  std::cout << "wrote " << out << " (" << w.width << "x" << w.height << ", "
            << resolve_workers(workers) << " workers, " << dt << " s)\n";
  return 0;
}

int cmd_orbit(const PolyArgs& pa, const LimitArgs& la, const std::vector<double>& seed,
              const std::string& out) {
  const Polynomial p = make_polynomial(pa);
  const OrbitResult r = iterate_orbit(p, {seed[0], seed[1]}, la.to_limits(), true);
  if (out == "-") {
    write_orbit_csv(std::cout, r);
  } else {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open '" + out + "'");
    write_orbit_csv(os, r);
  }
  std::cout << "orbit from (" << seed[0] << ", " << seed[1] << "): " << classification_name(r)
            << " at iterate " << r.iterations << " (" << r.trace.size() << " rows";
  if (out != "-") std::cout << " -> " << out;
  std::cout << ")\n";
  return 0;
}

int cmd_focal(const PolyArgs& pa, const std::string& sweep, double sweep_root,
              bool sweep_root_set, const std::string& kappas, double t0, double ratio,
              int levels) {
  const Polynomial p = make_polynomial(pa);
  const auto points = focal_points(p);
  std::cout << "polynomial: " << p.describe() << "\n";
  std::cout << "focal points (" << points.size() << "):\n";
  std::cout << "  location              kind        prefocal line\n";
  for (const auto& f : points) {
    std::ostringstream loc;
    loc << "(" << f.location.x << ", " << f.location.y << ")";
    std::cout << "  " << loc.str() << std::string(loc.str().size() < 22 ? 22 - loc.str().size() : 1, ' ')
              << (f.kind == FocalKind::simple ? "simple      " : "non-simple  ") << "x = "
              << f.prefocal_x << "\n";
  }
  if (sweep.empty()) return 0;

  // Curvature sweep at the (alpha, alpha) focal point of an even root:
  // closed-form landing vs the extrapolated limit.
  int root_index = -1;
  for (std::size_t i = 0; i < p.roots().size(); ++i) {
    const auto& r = p.roots()[i];
    if (r.multiplicity >= 2 && r.multiplicity % 2 == 0 &&
        (!sweep_root_set || std::abs(r.alpha - sweep_root) <= 1e-9)) {
      root_index = static_cast<int>(i);
      break;
    }
  }
  if (root_index < 0)
    throw ValidationError("sweep-root", "no even-multiplicity root matches the sweep request");
  const LandingMap lm = LandingMap::for_root(p, root_index);

  std::vector<double> ks;
  {
    std::istringstream is(kappas);
    double v;
    while (is >> v) ks.push_back(v);
  }
  if (ks.empty()) throw ValidationError("kappas", "empty curvature list");

  std::ofstream os(sweep);
  if (!os) throw std::runtime_error("cannot open '" + sweep + "'");
  os << "kappa,y_closed,y_numeric,abs_error\n";
  os.precision(17);
  const ExtrapolationSchedule sched{t0, ratio, levels, 4};
  for (double k : ks) {
    double closed = std::numeric_limits<double>::infinity();
    try {
      closed = curvature_to_landing(lm, k);
    } catch (const SingularCurvature&) {
    }
    const CurveSpec c{-1.0, k, 0.0, 0.0, {lm.alpha, lm.alpha}};
    const CurveLimit lim = numeric_curve_limit(p, c, sched);
    const double numeric = lim.divergent ? std::numeric_limits<double>::infinity() : lim.value.y;
    const double err = std::isfinite(closed) && std::isfinite(numeric)
                           ? std::abs(closed - numeric)
                           : std::numeric_limits<double>::quiet_NaN();
    os << k << "," << closed << "," << numeric << "," << err << "\n";
  }
  std::cout << "wrote curvature sweep for root alpha=" << lm.alpha << " to " << sweep << "\n";
  return 0;
}

int cmd_parity(const PolyArgs& pa, const LimitArgs& la, double root_alpha, bool root_set,
               double epsilon, int samples, std::uint64_t rng_seed, bool quadrant,
               const std::string& out) {
  const Polynomial p = make_polynomial(pa);
  int root_index = -1;
  for (std::size_t i = 0; i < p.roots().size(); ++i)
    if (p.roots()[i].multiplicity >= 2 &&
        (!root_set || std::abs(p.roots()[i].alpha - root_alpha) <= 1e-9)) {
      root_index = static_cast<int>(i);
      break;
    }
  if (root_index < 0)
    throw ValidationError("root", "no multiple root matches the parity request");

  const ParityReport rep =
      parity_experiment(p, root_index, epsilon, samples, rng_seed, la.to_limits(), quadrant);

  std::cout << "polynomial: " << p.describe() << "\n";
  std::cout << "parity experiment at alpha=" << p.root(root_index).alpha
            << " (d=" << p.root(root_index).multiplicity << "), epsilon=" << epsilon
            << ", samples=" << samples << ", rng_seed=" << rng_seed
            << (quadrant ? ", quadrant-restricted" : "") << "\n";
  for (std::size_t i = 0; i < rep.converged_counts.size(); ++i)
    std::cout << "  Converged(root " << i << ", alpha=" << p.roots()[i].alpha
              << "): " << rep.converged_counts[i] << "\n";
  std::cout << "  NearPole: " << rep.near_pole << "\n  Escaped: " << rep.escaped
            << "\n  NonConvergent: " << rep.non_convergent << "\n";
  if (!rep.witnesses.empty()) {
    std::cout << "witness seeds (slope -1 curve construction):\n";
    std::cout.precision(17);
    for (const auto& w : rep.witnesses)
      std::cout << "  root " << w.root_index << " (alpha=" << p.roots()[w.root_index].alpha
                << "): seed (" << w.seed.x << ", " << w.seed.y << "), " << w.iterations
                << " iterations\n";
    std::cout.precision(6);
  }
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open '" + out + "'");
    write_parity_csv(os, rep, p);
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_verify(const PolyArgs& pa, std::uint64_t rng_seed) {
  std::optional<Polynomial> p;
  if (!pa.coeffs.empty() || !pa.factored.empty()) {
    try {
      p = make_polynomial(pa);
    } catch (const ValidationError& e) {
      // A polynomial that fails its own construction-time invariants is a
      // verify failure, reported under the violated invariant's name.
      std::cout << "FAIL " << e.invariant() << ": " << e.what() << "\n";
      std::cout << "verify: 1 check failed\n";
      return 3;
    }
  }
  const auto checks = run_verify_suite(p, rng_seed);
  int failed = 0;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    if (!c.pass) ++failed;
  }
  if (failed > 0) {
    std::cout << "verify: " << failed << " of " << checks.size() << " checks failed\n";
    return 3;
  }
  std::cout << "verify: all " << checks.size() << " checks passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secant-dyn: planar secant-map dynamics for real polynomials with multiple roots"};
  app.require_subcommand(1);

  // render ------------------------------------------------------------------
  auto* render = app.add_subcommand("render", "Render a basin-of-attraction image (binary PPM)");
  PolyArgs render_poly;
  LimitArgs render_limits;
  std::vector<double> window = {-3.0, 3.0, -3.0, 3.0};
  std::vector<int> size = {300, 300};
  int workers = 0;
  std::string render_out = "basin.ppm";
  add_poly_options(render, render_poly);
  add_limit_options(render, render_limits, 100);
  render->add_option("--window", window, "View rectangle: x_min x_max y_min y_max")->expected(4);
  render->add_option("--size", size, "Image size: width height")->expected(2);
  render->add_option("--workers", workers,
                     "Worker threads (0 = hardware, capped by SECANT_DYN_THREADS)");
  render->add_option("--out", render_out, "Output PPM path");

  // orbit -------------------------------------------------------------------
  auto* orbit = app.add_subcommand("orbit", "Iterate one seed and export the trace as CSV");
  PolyArgs orbit_poly;
  LimitArgs orbit_limits;
  std::vector<double> seed;
  std::string orbit_out = "orbit.csv";
  add_poly_options(orbit, orbit_poly);
  add_limit_options(orbit, orbit_limits, 200);
  orbit->add_option("--seed", seed, "Seed point: x y")->expected(2)->required();
  orbit->add_option("--out", orbit_out, "Trace CSV path ('-' for stdout)");

  // focal -------------------------------------------------------------------
  auto* focal = app.add_subcommand("focal", "Report focal points; optional curvature sweep CSV");
  PolyArgs focal_poly;
  std::string sweep_path;
  double sweep_root = 0.0;
  std::string kappas = "-3 -2 -1 -0.5 0 0.5 1 2 4";
  double sched_t0 = 1e-2, sched_ratio = 0.5;
  int sched_levels = 10;
  add_poly_options(focal, focal_poly);
  focal->add_option("--sweep", sweep_path, "Write (kappa, y_closed, y_numeric, abs_error) CSV");
  auto* sweep_root_opt =
      focal->add_option("--sweep-root", sweep_root, "Even-multiplicity root to sweep (alpha)");
  focal->add_option("--kappas", kappas, "Whitespace-separated curvature list");
  focal->add_option("--t0", sched_t0, "Extrapolation: largest curve parameter");
  focal->add_option("--ratio", sched_ratio, "Extrapolation: parameter shrink ratio");
  focal->add_option("--levels", sched_levels, "Extrapolation: number of samples");

  // parity ------------------------------------------------------------------
  auto* parity = app.add_subcommand("parity", "Sample a disc around a multiple root's fixed point");
  PolyArgs parity_poly;
  LimitArgs parity_limits;
  double root_alpha = 0.0;
  double epsilon = 1e-3;
  int samples = 10000;
  std::uint64_t rng_seed = 12345;
  bool quadrant = false;
  std::string parity_out;
  add_poly_options(parity, parity_poly);
  add_limit_options(parity, parity_limits, 200);
  auto* root_opt = parity->add_option("--root", root_alpha, "Multiple root to probe (alpha)");
  parity->add_option("--epsilon", epsilon, "Disc radius");
  parity->add_option("--samples", samples, "Number of seeds");
  parity->add_option("--rng-seed", rng_seed, "mt19937-64 seed (recorded in the report)");
  parity->add_flag("--quadrant", quadrant, "Restrict seeds to x >= alpha, y >= alpha");
  parity->add_option("--out", parity_out, "Report CSV path");

  // verify ------------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "Run the polynomial-identity check suites");
  PolyArgs verify_poly;
  std::uint64_t verify_seed = 12345;
  add_poly_options(verify, verify_poly);
  verify->add_option("--rng-seed", verify_seed, "Seed for the randomized checks");

  // Flat config files: translate to tokens placed before the user's flags.
  for (auto* sub : {render, orbit, focal, parity, verify})
    for (auto* opt : sub->get_options())
      if (opt->get_expected_min() >= 1) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<std::string> args;
  std::string config_path;
  std::string subname;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (subname.empty() && !a.empty() && a[0] != '-') {
      subname = a;
      args.push_back(a);
      continue;
    }
    if (a == "--config" || a == "-c") {
      if (i + 1 >= argc) {
        std::cerr << "error: --config requires a file path\n";
        return 1;
      }
      config_path = argv[++i];
      continue;
    }
    if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
      continue;
    }
    args.push_back(a);
  }

  try {
    if (!config_path.empty()) {
      if (subname.empty()) throw ValidationError("config", "--config requires a subcommand");
      const auto cfg = config_tokens(config_path);
      args.insert(args.begin() + 1, cfg.begin(), cfg.end());
    }

    std::vector<std::string> tokens;
    tokens.emplace_back(argv[0]);
    tokens.insert(tokens.end(), args.begin(), args.end());
    std::vector<char*> cargs;
    cargs.reserve(tokens.size());
    for (auto& t : tokens) cargs.push_back(t.data());

    try {
      app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return 1;
    }

    if (render->parsed())
      return cmd_render(render_poly, render_limits, window, size, workers, render_out);
    if (orbit->parsed()) return cmd_orbit(orbit_poly, orbit_limits, seed, orbit_out);
    if (focal->parsed())
      return cmd_focal(focal_poly, sweep_path, sweep_root, sweep_root_opt->count() > 0, kappas,
                       sched_t0, sched_ratio, sched_levels);
    if (parity->parsed())
      return cmd_parity(parity_poly, parity_limits, root_alpha, root_opt->count() > 0, epsilon,
                        samples, rng_seed, quadrant, parity_out);
    if (verify->parsed()) return cmd_verify(verify_poly, verify_seed);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}
