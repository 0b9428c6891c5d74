#include "secdyn/basin.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "secdyn/focal.hpp"

namespace secdyn {

namespace {

constexpr Rgb kColorTable[] = {
    {255, 0, 0},    // red
    {0, 176, 0},    // green
    {0, 0, 255},    // blue
    {255, 200, 0},  // yellow
    {200, 0, 200},  // magenta
    {0, 200, 200},  // cyan
};

}  // namespace

Palette Palette::for_roots(const Polynomial& p) {
  Palette pal;
  const auto& roots = p.roots();
  pal.root_colors.resize(roots.size());
  std::vector<int> order(roots.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&roots](int a, int b) {
    const bool ma = roots[static_cast<std::size_t>(a)].multiplicity >= 2;
    const bool mb = roots[static_cast<std::size_t>(b)].multiplicity >= 2;
    if (ma != mb) return ma;
    return roots[static_cast<std::size_t>(a)].alpha < roots[static_cast<std::size_t>(b)].alpha;
  });
  for (std::size_t rank = 0; rank < order.size(); ++rank)
    pal.root_colors[static_cast<std::size_t>(order[rank])] =
        kColorTable[rank % (sizeof(kColorTable) / sizeof(kColorTable[0]))];
  return pal;
}

std::vector<std::uint8_t> BasinGrid::pixels() const {
  std::vector<std::uint8_t> px;
  px.reserve(cells.size() * 3);
  for (std::int16_t c : cells) {
    const Rgb color = c >= 0 && static_cast<std::size_t>(c) < palette.root_colors.size()
                          ? palette.root_colors[static_cast<std::size_t>(c)]
                          : palette.other;
    px.push_back(color.r);
    px.push_back(color.g);
    px.push_back(color.b);
  }
  return px;
}

int resolve_workers(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("SECANT_DYN_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::min(n, 256);
}

BasinGrid render_basin(const Polynomial& p, const Window& w, const OrbitLimits& limits,
                       int workers) {
  if (w.width <= 0 || w.height <= 0)
    throw std::invalid_argument("render_basin: window size must be positive");
  if (!(w.x_min < w.x_max) || !(w.y_min < w.y_max))
    throw std::invalid_argument("render_basin: window extents must be increasing");

  BasinGrid grid;
  grid.window = w;
  grid.limits = limits;
  grid.palette = Palette::for_roots(p);
  grid.cells.assign(static_cast<std::size_t>(w.width) * static_cast<std::size_t>(w.height), 0);

  const int n_workers = resolve_workers(workers);

  // Rows are claimed through a shared counter; every cell is classified
  // independently, so the grid contents do not depend on the worker count.
  std::atomic<int> next_row{0};
  auto worker = [&] {
    for (;;) {
      const int row = next_row.fetch_add(1, std::memory_order_relaxed);
      if (row >= w.height) return;
      std::int16_t* out = grid.cells.data() + static_cast<std::size_t>(row) * static_cast<std::size_t>(w.width);
      for (int col = 0; col < w.width; ++col) {
        const OrbitResult r = iterate_orbit(p, w.cell_center(col, row), limits);
        switch (r.cls) {
          case OrbitClass::converged:
            out[col] = static_cast<std::int16_t>(r.root_index);
            break;
          case OrbitClass::near_pole:
            out[col] = kCellNearPole;
            break;
          case OrbitClass::escaped:
            out[col] = kCellEscaped;
            break;
          case OrbitClass::non_convergent:
            out[col] = kCellNonConvergent;
            break;
        }
      }
    }
  };

  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return grid;
}

void write_image(const BasinGrid& g, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_image: cannot open '" + path + "'");
  os << "P6\n" << g.window.width << " " << g.window.height << "\n255\n";
  const auto px = g.pixels();
  os.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!os) throw std::runtime_error("write_image: write failed for '" + path + "'");
}

int ParityReport::total() const {
  int t = near_pole + escaped + non_convergent;
  for (int c : converged_counts) t += c;
  return t;
}

namespace {

double uniform01(std::mt19937_64& gen) {
  // 53-bit mantissa doubles in [0, 1); bit-identical across platforms.
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Targeted seeds for the even-multiplicity case, following the slope -1
// curve family through (alpha, alpha): the first image of such a curve lands
// on the prefocal line x = alpha at a curvature-dependent height, so seeds
// are taken on columns x = alpha + xi with ordinate near alpha - xi, where
// the offset from the anti-diagonal plays the curvature. For each column the
// ordinate sending the first image exactly onto the target root line is
// bracketed and bisected, then representable ordinates are walked across
// that crossing until an orbit reaches the target root. The channels into
// the other basins are measure-thin (width falls like a high power of xi),
// which is why blind sampling misses them and the crossing must be solved
// for; when the window is below ulp resolution on the requested disc, the
// search widens the disc and reports the seed it found there.
class WitnessSearch {
 public:
  WitnessSearch(const Polynomial& p, double alpha, const OrbitLimits& limits)
      : p_(p), alpha_(alpha), limits_(limits) {}

  bool try_column(double xi, double sx, double beta, double radius, int target,
                  ParityWitness* out) const {
    // Bracket the ordinate where the first image crosses y = beta.
    double lo = 0.0, hi = 0.0;
    for (int sign = -1; sign <= 1 && lo == hi; sign += 2) {
      double pd = sign * xi * xi * 1e-6;
      double ph = himg(sx, alpha_ - xi + pd, beta);
      for (double delta = pd * 1.3; std::abs(delta) < 0.5 * std::abs(xi); delta *= 1.3) {
        const double h = himg(sx, alpha_ - xi + delta, beta);
        if (std::isfinite(h) && std::isfinite(ph) && (h < 0.0) != (ph < 0.0)) {
          lo = pd;
          hi = delta;
          break;
        }
        pd = delta;
        ph = h;
      }
    }
    if (lo == hi) return false;

    double ylo = alpha_ - xi + lo, yhi = alpha_ - xi + hi;
    double flo = himg(sx, ylo, beta);
    while (true) {
      const double mid = 0.5 * (ylo + yhi);
      if (mid == ylo || mid == yhi) break;
      const double fm = himg(sx, mid, beta);
      if ((fm < 0.0) == (flo < 0.0)) {
        ylo = mid;
        flo = fm;
      } else {
        yhi = mid;
      }
    }

    // Walk representable ordinates across the crossing: the capture window
    // hugs the exact crossing and is at most a few ulps wide.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    for (int dir = -1; dir <= 1; dir += 2) {
      double sy = dir < 0 ? ylo : yhi;
      for (int j = 0; j < 80; ++j, sy = std::nextafter(sy, dir > 0 ? kInf : -kInf)) {
        const double dx = sx - alpha_, dy = sy - alpha_;
        if (dx * dx + dy * dy > radius * radius) continue;
        const OrbitResult r = iterate_orbit(p_, {sx, sy}, limits_);
        if (r.cls == OrbitClass::converged && r.root_index == target) {
          *out = {target, {sx, sy}, r.iterations};
          return true;
        }
      }
    }
    return false;
  }

 private:
  double himg(double sx, double sy, double beta) const {
    return secant_eval(p_, sx, sy).quotient - beta;
  }

  const Polynomial& p_;
  double alpha_;
  const OrbitLimits& limits_;
};

std::vector<ParityWitness> find_even_witnesses(const Polynomial& p, int root_index, double eps,
                                               const OrbitLimits& limits) {
  std::vector<ParityWitness> found;
  const double alpha = p.root(root_index).alpha;
  const WitnessSearch search(p, alpha, limits);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  for (std::size_t bi = 0; bi < p.roots().size(); ++bi) {
    const RootSpec& b = p.roots()[bi];
    if (b.multiplicity != 1) continue;

    ParityWitness w;
    bool got = false;
    for (int factor = 1; factor <= 16 && !got; factor *= 2) {
      const double radius = eps * factor;
      const double xi_max = 0.999 * radius / std::sqrt(2.0);
      for (double axi = xi_max; axi >= 0.15 * xi_max && !got; axi *= 0.90) {
        for (int arm = 0; arm < 2 && !got; ++arm) {
          const double xi = arm == 0 ? axi : -axi;
          // A few ulp-shifted columns per offset: each shift re-phases the
          // representable ordinates against the capture window.
          double sx = alpha + xi;
          for (int phase = 0; phase < 64 && !got; ++phase, sx = std::nextafter(sx, kInf))
            got = search.try_column(xi, sx, b.alpha, radius, static_cast<int>(bi), &w);
        }
      }
    }
    if (got) found.push_back(w);
  }
  return found;
}

}  // namespace

ParityReport parity_experiment(const Polynomial& p, int root_index, double epsilon, int n,
                               std::uint64_t rng_seed, const OrbitLimits& limits,
                               bool quadrant_only) {
  const RootSpec& root = p.root(root_index);
  if (root.multiplicity < 2)
    throw std::invalid_argument("parity_experiment: root multiplicity must be >= 2");
  if (epsilon <= 0.0 || n < 1) throw std::invalid_argument("parity_experiment: bad epsilon or n");

  ParityReport rep;
  rep.root_index = root_index;
  rep.epsilon = epsilon;
  rep.samples = n;
  rep.rng_seed = rng_seed;
  rep.quadrant_only = quadrant_only;
  rep.converged_counts.assign(p.roots().size(), 0);

  const PoleSet poles(p, limits.pole_guard);
  std::mt19937_64 gen(rng_seed);
  const double alpha = root.alpha;

  for (int s = 0; s < n; ++s) {
    PlanePoint seed;
    for (;;) {
      double dx, dy;
      if (quadrant_only) {
        dx = uniform01(gen) * epsilon;
        dy = uniform01(gen) * epsilon;
      } else {
        dx = (2.0 * uniform01(gen) - 1.0) * epsilon;
        dy = (2.0 * uniform01(gen) - 1.0) * epsilon;
      }
      if (dx * dx + dy * dy > epsilon * epsilon) continue;
      seed = {alpha + dx, alpha + dy};
      if (poles.contains(seed)) continue;
      break;
    }
    const OrbitResult r = iterate_orbit(p, seed, limits);
    switch (r.cls) {
      case OrbitClass::converged:
        ++rep.converged_counts[static_cast<std::size_t>(r.root_index)];
        break;
      case OrbitClass::near_pole:
        ++rep.near_pole;
        break;
      case OrbitClass::escaped:
        ++rep.escaped;
        break;
      case OrbitClass::non_convergent:
        ++rep.non_convergent;
        break;
    }
  }

  if (root.multiplicity % 2 == 0)
    rep.witnesses = find_even_witnesses(p, root_index, epsilon, limits);
  return rep;
}

void write_parity_csv(std::ostream& os, const ParityReport& rep, const Polynomial& p) {
  os << "# root_alpha=" << p.root(rep.root_index).alpha
     << " multiplicity=" << p.root(rep.root_index).multiplicity << " epsilon=" << rep.epsilon
     << " samples=" << rep.samples << " rng_seed=" << rep.rng_seed
     << " quadrant_only=" << (rep.quadrant_only ? 1 : 0) << " generator=mt19937_64\n";
  os << "classification,count\n";
  for (std::size_t i = 0; i < rep.converged_counts.size(); ++i)
    os << "Converged(" << i << ")," << rep.converged_counts[i] << "\n";
  os << "NearPole," << rep.near_pole << "\n";
  os << "Escaped," << rep.escaped << "\n";
  os << "NonConvergent," << rep.non_convergent << "\n";
  os << "\nwitness_root,x,y,iterations\n";
  os.precision(17);
  for (const auto& w : rep.witnesses)
    os << w.root_index << "," << w.seed.x << "," << w.seed.y << "," << w.iterations << "\n";
}

}  // namespace secdyn
