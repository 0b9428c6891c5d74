#include "secdyn/focal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace secdyn {

namespace {

// Derivative values p^(m)(x0) for m = 0..max_m.
std::vector<double> derivs_at(const Polynomial& p, double x0, int max_m) {
  std::vector<double> out(static_cast<std::size_t>(max_m) + 1);
  std::vector<double> dc = p.coeffs();
  for (int m = 0; m <= max_m; ++m) {
    out[static_cast<std::size_t>(m)] = eval_poly(dc, x0);
    dc = derivative(dc, 1);
  }
  return out;
}

using Table = std::vector<std::vector<double>>;

// Q[m][l] = d^m q / dx^{m-l} dy^l at (a1, a2), filled bottom-up. The table is
// per call: the recursion reuses lower orders heavily but shares no state.
Table q_pair_table(const Polynomial& p, double a1, double a2, int max_m) {
  const double inv = 1.0 / (a1 - a2);
  const auto pa1 = derivs_at(p, a1, max_m);
  const auto pa2 = derivs_at(p, a2, max_m);
  Table q(static_cast<std::size_t>(max_m) + 1);
  q[0] = {0.0};
  for (int m = 1; m <= max_m; ++m) {
    auto& row = q[static_cast<std::size_t>(m)];
    const auto& prev = q[static_cast<std::size_t>(m - 1)];
    row.resize(static_cast<std::size_t>(m) + 1);
    row[0] = (pa1[static_cast<std::size_t>(m)] - m * prev[0]) * inv;
    // Matching coefficients of (y - a2)^m gives the pure-y recursion with
    // the opposite sign on the lower-order term from the pure-x one:
    //   Q(m,m) = (m Q(m-1,m-1) - p^(m)(a2)) / (a1 - a2),
    // as the x^2 - 1 case Q(2,2) = 0 pins down.
    row[static_cast<std::size_t>(m)] =
        (m * prev[static_cast<std::size_t>(m - 1)] - pa2[static_cast<std::size_t>(m)]) * inv;
    for (int l = 1; l < m; ++l)
      row[static_cast<std::size_t>(l)] =
          (l * prev[static_cast<std::size_t>(l - 1)] - (m - l) * prev[static_cast<std::size_t>(l)]) * inv;
  }
  return q;
}

Table n_pair_table(const Polynomial& p, double a2, int max_m, const Table& q) {
  const auto pa2 = derivs_at(p, a2, max_m);
  Table n(static_cast<std::size_t>(max_m) + 1);
  n[0] = {0.0};
  for (int m = 1; m <= max_m; ++m) {
    auto& row = n[static_cast<std::size_t>(m)];
    const auto& qrow = q[static_cast<std::size_t>(m)];
    const auto& qprev = q[static_cast<std::size_t>(m - 1)];
    row.resize(static_cast<std::size_t>(m) + 1);
    row[0] = a2 * qrow[0];
    row[static_cast<std::size_t>(m)] = m * qprev[static_cast<std::size_t>(m - 1)] +
                                       a2 * qrow[static_cast<std::size_t>(m)] -
                                       pa2[static_cast<std::size_t>(m)];
    for (int l = 1; l < m; ++l)
      row[static_cast<std::size_t>(l)] =
          l * qprev[static_cast<std::size_t>(l - 1)] + a2 * qrow[static_cast<std::size_t>(l)];
  }
  return n;
}

void require_root_pair(const Polynomial& p, double a1, double a2) {
  if (p.find_root(a1) < 0 || p.find_root(a2) < 0)
    throw std::invalid_argument("deriv at pair: both values must be validated roots");
  if (a1 == a2) throw std::invalid_argument("deriv at pair: roots must be distinct");
}

}  // namespace

double deriv_q_at_pair(const Polynomial& p, double alpha1, double alpha2, int m, int l) {
  require_root_pair(p, alpha1, alpha2);
  if (m < 0 || l < 0 || l > m) throw std::invalid_argument("deriv_q_at_pair: need 0 <= l <= m");
  return q_pair_table(p, alpha1, alpha2, m)[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)];
}

double deriv_n_at_pair(const Polynomial& p, double alpha1, double alpha2, int m, int l) {
  require_root_pair(p, alpha1, alpha2);
  if (m < 0 || l < 0 || l > m) throw std::invalid_argument("deriv_n_at_pair: need 0 <= l <= m");
  const auto q = q_pair_table(p, alpha1, alpha2, m);
  return n_pair_table(p, alpha2, m, q)[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)];
}

std::vector<FocalPoint> focal_points(const Polynomial& p) {
  if (!p.has_roots())
    throw std::invalid_argument("focal_points: polynomial has no validated roots");
  std::vector<FocalPoint> out;
  const auto& roots = p.roots();
  const int n = static_cast<int>(roots.size());

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double a1 = roots[static_cast<std::size_t>(i)].alpha;
      const double a2 = roots[static_cast<std::size_t>(j)].alpha;
      FocalPoint f;
      f.location = {a1, a2};
      f.prefocal_x = a2;
      f.root_i = i;
      f.root_j = j;
      const auto q = q_pair_table(p, a1, a2, 1);
      const auto nn = n_pair_table(p, a2, 1, q);
      f.grad_d = {q[1][0], q[1][1]};
      f.grad_n = {nn[1][0], nn[1][1]};
      const double det = f.grad_n[0] * f.grad_d[1] - f.grad_n[1] * f.grad_d[0];
      const double scale = std::max(1.0, std::max(std::abs(f.grad_n[0]), std::abs(f.grad_n[1])) *
                                             std::max(std::abs(f.grad_d[0]), std::abs(f.grad_d[1])));
      f.kind = std::abs(det) > 1e-8 * scale ? FocalKind::simple : FocalKind::non_simple;
      out.push_back(f);
    }

  for (int i = 0; i < n; ++i) {
    const RootSpec& r = roots[static_cast<std::size_t>(i)];
    if (r.multiplicity < 2) continue;
    FocalPoint f;
    f.location = {r.alpha, r.alpha};
    f.prefocal_x = r.alpha;
    f.root_i = f.root_j = i;
    // From the Taylor forms at the root: the linear part of D is
    // lambda_2 (u + v) when d == 2 and zero for d >= 3; N = alpha D + N1 with
    // N1 quadratic, so grad N = alpha grad D and the gradients are dependent.
    const double gd = r.multiplicity == 2 ? r.lambda(2) : 0.0;
    f.grad_d = {gd, gd};
    f.grad_n = {r.alpha * gd, r.alpha * gd};
    f.kind = FocalKind::non_simple;
    out.push_back(f);
  }
  return out;
}

double g_d(double m, int d) {
  if (d < 1) throw std::invalid_argument("g_d: need d >= 1");
  if (m == 1.0) return static_cast<double>(d);
  if (std::abs(1.0 - m) < 1e-6) {
    double s = 0.0, mp = 1.0;
    for (int j = 0; j < d; ++j) {
      s += mp;
      mp *= m;
    }
    return s;
  }
  double md = 1.0;
  for (int j = 0; j < d; ++j) md *= m;
  return (1.0 - md) / (1.0 - m);
}

PlanePoint curve_point(const CurveSpec& c, double t) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double xi = t + t2 / 2.0 + t3 / 6.0 + t4 / 24.0;
  const double mu = c.slope * t + c.curvature * t2 / 2.0 + c.torsion * t3 / 6.0 + c.sigma * t4 / 24.0;
  return {c.base.x + xi, c.base.y + mu};
}

CurveLimit numeric_curve_limit(const Polynomial& p, const CurveSpec& c,
                               const ExtrapolationSchedule& sched) {
  if (sched.n_steps < 2 || sched.t0 <= 0.0 || sched.ratio <= 0.0 || sched.ratio >= 1.0)
    throw std::invalid_argument("numeric_curve_limit: bad schedule");

  std::vector<double> ts, vs;
  double t = sched.t0;
  for (int j = 0; j < sched.n_steps; ++j, t *= sched.ratio) {
    const PlanePoint pt = curve_point(c, t);
    const SecantEval e = secant_eval(p, pt.x, pt.y);
    if (e.near_pole || !std::isfinite(e.quotient)) continue;
    ts.push_back(t);
    vs.push_back(e.quotient);
  }

  CurveLimit res;
  res.value.x = c.base.y;
  res.value.y = std::numeric_limits<double>::quiet_NaN();

  const std::size_t usable = ts.size();
  if (usable < static_cast<std::size_t>(sched.order) + 2) {
    res.divergent = true;
    return res;
  }

  // Growth test: a finite limit settles, a pole blows up like a power of the
  // step ratio.
  const double first = std::abs(vs.front());
  const double last = std::abs(vs[usable - 1]);
  const bool rising = last > std::abs(vs[usable - 2]) && std::abs(vs[usable - 2]) > std::abs(vs[usable - 3]);
  if (rising && last >= 64.0 * (first + 1.0)) {
    res.divergent = true;
    return res;
  }

  // Neville extrapolation to t = 0 over the last (order + 1) samples.
  const int mlev = sched.order + 1;
  const int off = static_cast<int>(usable) - mlev;
  std::vector<double> tt(ts.begin() + off, ts.end());
  std::vector<double> col(vs.begin() + off, vs.end());
  double prev_level = col[static_cast<std::size_t>(mlev - 1)];
  for (int k = 1; k < mlev; ++k) {
    if (k == mlev - 1) prev_level = col[static_cast<std::size_t>(mlev - 1)];
    for (int i = mlev - 1; i >= k; --i) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uk = static_cast<std::size_t>(i - k);
      col[ui] = (tt[ui] * col[ui - 1] - tt[uk] * col[ui]) / (tt[ui] - tt[uk]);
    }
  }
  res.value.y = col[static_cast<std::size_t>(mlev - 1)];
  res.error_estimate = std::abs(col[static_cast<std::size_t>(mlev - 1)] - prev_level);
  if (!std::isfinite(res.value.y)) res.divergent = true;
  return res;
}

LandingMap LandingMap::for_root(const Polynomial& p, int root_index) {
  const RootSpec& r = p.root(root_index);
  if (r.multiplicity < 2)
    throw std::invalid_argument("LandingMap: root multiplicity must be >= 2");
  LandingMap lm;
  lm.alpha = r.alpha;
  lm.multiplicity = r.multiplicity;
  lm.lambda_d = r.lambda(r.multiplicity);
  lm.lambda_d1 = r.lambda(r.multiplicity + 1);
  lm.parity = r.multiplicity % 2 == 0 ? Parity::even : Parity::odd;
  return lm;
}

double curvature_to_landing(const LandingMap& lm, double kappa) {
  if (lm.parity != Parity::even)
    throw std::invalid_argument("curvature_to_landing: defined for even multiplicity");
  const double c = 0.25 * lm.multiplicity * lm.lambda_d * (kappa + 1.0) + lm.lambda_d1;
  if (std::abs(c) <= 1e-12 * std::abs(lm.lambda_d))
    throw SingularCurvature("curvature_to_landing: C(kappa) vanishes; landing escapes to infinity");
  return lm.alpha - lm.lambda_d / c;
}

double landing_to_curvature(const LandingMap& lm, double y) {
  if (lm.parity != Parity::even)
    throw std::invalid_argument("landing_to_curvature: defined for even multiplicity");
  if (y == lm.alpha)
    throw std::invalid_argument("landing_to_curvature: no finite curvature lands exactly at alpha");
  return -1.0 + (4.0 / (lm.multiplicity * lm.lambda_d)) *
                    (lm.lambda_d / (lm.alpha - y) - lm.lambda_d1);
}

PlanePoint mixed_focal_landing(const Polynomial& p, double alpha, double beta, double kappa) {
  const int ia = p.find_root(alpha);
  const int ib = p.find_root(beta);
  if (ia < 0 || ib < 0)
    throw std::invalid_argument("mixed_focal_landing: alpha and beta must be validated roots");
  if (p.root(ia).multiplicity != 2)
    throw std::invalid_argument("mixed_focal_landing: alpha must have multiplicity exactly 2");
  if (p.root(ib).multiplicity != 1)
    throw std::invalid_argument("mixed_focal_landing: beta must be a simple root");

  const double ppa = 2.0 * p.root(ia).lambda(2);                 // p''(alpha)
  const double pb = eval_poly(derivative(p, 1), beta);           // p'(beta)
  const double den = ppa - pb * kappa;
  const double scale = std::max({1e-300, std::abs(ppa), std::abs(pb * kappa)});
  if (std::abs(den) <= 1e-12 * scale)
    throw SingularCurvature("mixed_focal_landing: denominator vanishes; landing escapes to infinity");
  return {beta, (beta * ppa - alpha * pb * kappa) / den};
}

}  // namespace secdyn
