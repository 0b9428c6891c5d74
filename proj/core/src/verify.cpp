#include "secdyn/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "secdyn/focal.hpp"

namespace secdyn {

namespace {

double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
}

Polynomial random_poly(std::mt19937_64& gen, int max_degree) {
  const int k = 2 + static_cast<int>(gen() % static_cast<std::uint64_t>(max_degree - 1));
  std::vector<double> c(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = uniform(gen, -5.0, 5.0);
  c.back() = 1.0;
  return Polynomial::from_coeffs(c);
}

double binom(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// Central finite difference for the mixed partial d^m f / dx^{m-l} dy^l with
// two Richardson levels: the surviving truncation term involves order m + 6
// derivatives, which vanish identically for the polynomial degrees in play.
// Independent of the recursions being checked.
template <typename F>
double fd_mixed_partial(const F& f, double x, double y, int m, int l, double h = 0.2) {
  const int a = m - l;  // x-order
  auto fd = [&](double step) {
    double acc = 0.0;
    for (int i = 0; i <= a; ++i) {
      const double wx = (i % 2 == 0 ? 1.0 : -1.0) * binom(a, i);
      for (int j = 0; j <= l; ++j) {
        const double wy = (j % 2 == 0 ? 1.0 : -1.0) * binom(l, j);
        acc += wx * wy * f(x + (a / 2.0 - i) * step, y + (l / 2.0 - j) * step);
      }
    }
    return acc / std::pow(step, m);
  };
  const double d1 = fd(h);
  const double d2 = fd(h / 2.0);
  const double d4 = fd(h / 4.0);
  const double r1 = (4.0 * d2 - d1) / 3.0;
  const double r2 = (4.0 * d4 - d2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;  // O(h^6)
}

struct Ctx {
  std::vector<VerifyCheck>& out;
  void add(const std::string& name, bool pass, const std::string& detail) {
    out.push_back({name, pass, detail});
  }
};

std::string worst_str(double worst, double tol) {
  std::ostringstream os;
  os << "max residual " << worst << " (tol " << tol << ")";
  return os.str();
}

void check_divided_difference(Ctx& ctx, const std::vector<Polynomial>& ps, std::mt19937_64& gen,
                              int pairs_per_poly) {
  double worst = 0.0;
  for (const auto& p : ps) {
    for (int t = 0; t < pairs_per_poly; ++t) {
      const double x = uniform(gen, -3.0, 3.0);
      const double y = uniform(gen, -3.0, 3.0);
      if (x == y) continue;
      const double lhs = p(x) - p(y);
      const double rhs = (x - y) * q_eval(p, x, y);
      const double scale = std::max({1.0, std::abs(p(x)), std::abs(p(y))});
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
  }
  ctx.add("divided-difference-identity", worst <= 1e-9, worst_str(worst, 1e-9));
}

void check_diagonal(Ctx& ctx, const std::vector<Polynomial>& ps, std::mt19937_64& gen,
                    int points_per_poly) {
  double worst = 0.0;
  for (const auto& p : ps) {
    const auto dp = derivative(p, 1);
    for (int t = 0; t < points_per_poly; ++t) {
      const double x = uniform(gen, -3.0, 3.0);
      const double qd = q_eval(p, x, x);
      const double pd = eval_poly(dp, x);
      worst = std::max(worst, std::abs(qd - pd) / std::max(1.0, std::abs(pd)));
    }
  }
  ctx.add("diagonal-derivative", worst <= 1e-12, worst_str(worst, 1e-12));
}

void check_taylor_decomposition(Ctx& ctx, const Polynomial& p, std::mt19937_64& gen) {
  bool any = false;
  double worst_nd = 0.0, worst_d = 0.0;
  for (const auto& r : p.roots()) {
    if (r.multiplicity < 2) continue;
    any = true;
    for (int t = 0; t < 400; ++t) {
      const double x = r.alpha + uniform(gen, -1.0, 1.0);
      const double y = r.alpha + uniform(gen, -1.0, 1.0);
      const auto nd = n_d_eval(p, x, y);
      const double n1 = n1_eval(p, r, x, y);
      const double scale = std::max({1.0, std::abs(nd.n), std::abs(r.alpha * nd.d), std::abs(n1)});
      worst_nd = std::max(worst_nd, std::abs(nd.n - (r.alpha * nd.d + n1)) / scale);
      const double td = taylor_d_eval(p, r, x, y);
      worst_d = std::max(worst_d,
                         std::abs(td - nd.d) / std::max({1.0, std::abs(td), std::abs(nd.d)}));
    }
  }
  if (!any) return;
  ctx.add("taylor-decomposition", worst_nd <= 1e-9, worst_str(worst_nd, 1e-9));
  ctx.add("taylor-denominator", worst_d <= 1e-10, worst_str(worst_d, 1e-10));
}

void check_pair_recursions(Ctx& ctx, const Polynomial& p) {
  const auto& roots = p.roots();
  if (roots.size() < 2) return;
  double worst_q = 0.0, worst_n = 0.0;
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (i == j) continue;
      const double a1 = roots[i].alpha;
      const double a2 = roots[j].alpha;
      for (int m = 0; m <= 4; ++m)
        for (int l = 0; l <= m; ++l) {
          const double qr = deriv_q_at_pair(p, a1, a2, m, l);
          const double qo = fd_mixed_partial(
              [&p](double x, double y) { return q_eval(p, x, y); }, a1, a2, m, l);
          worst_q = std::max(worst_q, std::abs(qr - qo) / std::max(1.0, std::abs(qo)));
          const double nr = deriv_n_at_pair(p, a1, a2, m, l);
          const double no = fd_mixed_partial(
              [&p](double x, double y) { return n_d_eval(p, x, y).n; }, a1, a2, m, l);
          worst_n = std::max(worst_n, std::abs(nr - no) / std::max(1.0, std::abs(no)));
        }
    }
  ctx.add("q-derivative-recursion", worst_q <= 1e-6, worst_str(worst_q, 1e-6));
  ctx.add("n-derivative-recursion", worst_n <= 1e-6, worst_str(worst_n, 1e-6));
}

}  // namespace

std::vector<VerifyCheck> run_verify_suite(const std::optional<Polynomial>& p,
                                          std::uint64_t rng_seed) {
  std::vector<VerifyCheck> out;
  Ctx ctx{out};
  std::mt19937_64 gen(rng_seed);

  if (p) {
    if (p->has_roots()) {
      std::vector<std::pair<double, int>> claimed;
      for (const auto& r : p->roots()) claimed.emplace_back(r.alpha, r.multiplicity);
      for (const auto& c : validate_roots(p->coeffs(), claimed)) ctx.add(c.name, c.pass, c.detail);
    }
    const std::vector<Polynomial> ps = {*p};
    check_divided_difference(ctx, ps, gen, 500);
    check_diagonal(ctx, ps, gen, 200);
    check_taylor_decomposition(ctx, *p, gen);
    check_pair_recursions(ctx, *p);
    return out;
  }

  std::vector<Polynomial> ps;
  for (int i = 0; i < 100; ++i) ps.push_back(random_poly(gen, 8));
  check_divided_difference(ctx, ps, gen, 20);
  check_diagonal(ctx, ps, gen, 10);
  for (int d = 2; d <= 5; ++d) {
    const Polynomial pd = Polynomial::from_factored({{-2.0, 1}, {0.0, 1}, {1.0, d}});
    check_taylor_decomposition(ctx, pd, gen);
    check_pair_recursions(ctx, pd);
  }
  return out;
}

}  // namespace secdyn
