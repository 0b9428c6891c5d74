#include "secdyn/secant_map.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace secdyn {

namespace {

// Magnitude bound of p's terms at B = max(1, |x|, |y|); used only to decide
// whether N and D "both vanish" for the indeterminacy flag.
double local_scale(const Polynomial& p, double x, double y) {
  const double b = std::max({1.0, std::abs(x), std::abs(y)});
  double s = 0.0, bp = 1.0;
  for (double c : p.coeffs()) {
    s += std::abs(c) * bp;
    bp *= b;
  }
  return s;
}

// Nearest validated root with both coordinates within tol; ties keep the
// lowest index. Returns -1 when no root matches.
int match_root(const Polynomial& p, PlanePoint pt, double tol) {
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  const auto& roots = p.roots();
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double dist = std::max(std::abs(pt.x - roots[i].alpha), std::abs(pt.y - roots[i].alpha));
    if (dist <= tol && dist < best_dist) {
      best = static_cast<int>(i);
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace

SecantEval secant_eval(const Polynomial& p, double x, double y, double pole_guard) {
  SecantEval e;
  const int ri = p.shifted_root_for(x, y);
  if (ri >= 0) {
    const RootSpec& r = p.root(ri);
    const int k = p.degree();
    const int d = r.multiplicity;
    const double u = x - r.alpha;
    const double v = y - r.alpha;
    double qm = 1.0, qprev = 0.0, upow = 1.0;
    double dd = 0.0, s = 0.0;
    for (int m = 1; m <= k; ++m) {
      if (m >= d) {
        const double lam = r.lambda(m);
        dd += lam * qm;
        s += lam * qprev;
      }
      upow *= u;
      const double qnext = upow + v * qm;
      qprev = qm;
      qm = qnext;
    }
    e.d = dd;
    e.n1 = u * v * s;
    e.n = r.alpha * dd + e.n1;
    e.quotient = r.alpha + e.n1 / e.d;
    e.shifted_root = ri;
  } else {
    const auto nd = n_d_eval(p, x, y);
    e.n = nd.n;
    e.d = nd.d;
    e.quotient = e.n / e.d;
  }
  const double an = std::abs(e.n);
  const double ad = std::abs(e.d);
  e.near_pole = (e.d == 0.0) || ad <= pole_guard * an;
  const double ls = local_scale(p, x, y);
  e.indeterminate = an <= 1e-10 * ls && ad <= 1e-10 * ls;
  return e;
}

StepResult secant_step(const Polynomial& p, PlanePoint pt, double pole_guard) {
  const SecantEval e = secant_eval(p, pt.x, pt.y, pole_guard);
  if (e.near_pole) return {pt, true};
  return {{pt.y, e.quotient}, false};
}

OrbitResult iterate_orbit(const Polynomial& p, PlanePoint seed, const OrbitLimits& limits,
                          bool record_trace) {
  OrbitResult res;
  PlanePoint pt = seed;
  int streak = 0;
  int streak_root = -1;
  int streak_start = 0;

  for (int n = 0;; ++n) {
    if (record_trace) res.trace.push_back(pt);

    const int match = match_root(p, pt, limits.conv_tol);
    if (match >= 0) {
      if (match == streak_root) {
        ++streak;
      } else {
        streak_root = match;
        streak = 1;
        streak_start = n;
      }
      const double a = p.root(match).alpha;
      const bool exact_fixed_point = pt.x == a && pt.y == a;
      if (exact_fixed_point || streak >= limits.conv_streak) {
        res.cls = OrbitClass::converged;
        res.root_index = match;
        res.iterations = exact_fixed_point ? n : streak_start;
        return res;
      }
    } else {
      streak = 0;
      streak_root = -1;
    }

    if (std::max(std::abs(pt.x), std::abs(pt.y)) > limits.escape_radius) {
      res.cls = OrbitClass::escaped;
      res.iterations = n;
      return res;
    }
    if (n >= limits.max_iter) {
      res.cls = OrbitClass::non_convergent;
      res.iterations = limits.max_iter;
      return res;
    }

    const StepResult s = secant_step(p, pt, limits.pole_guard);
    if (s.near_pole) {
      res.cls = OrbitClass::near_pole;
      res.iterations = n;
      return res;
    }
    pt = s.pt;
  }
}

std::vector<std::pair<PlanePoint, int>> fixed_points(const Polynomial& p) {
  if (!p.has_roots())
    throw std::invalid_argument("fixed_points: polynomial has no validated roots");
  std::vector<std::pair<PlanePoint, int>> out;
  for (std::size_t i = 0; i < p.roots().size(); ++i) {
    const double a = p.root(static_cast<int>(i)).alpha;
    out.push_back({{a, a}, static_cast<int>(i)});
  }
  return out;
}

bool PoleSet::contains(PlanePoint pt) const {
  return secant_eval(*p_, pt.x, pt.y, guard_).near_pole;
}

std::string classification_name(const OrbitResult& r) {
  switch (r.cls) {
    case OrbitClass::converged: {
      std::ostringstream os;
      os << "Converged(" << r.root_index << ")";
      return os.str();
    }
    case OrbitClass::near_pole:
      return "NearPole";
    case OrbitClass::escaped:
      return "Escaped";
    case OrbitClass::non_convergent:
      return "NonConvergent";
  }
  return "?";
}

void write_orbit_csv(std::ostream& os, const OrbitResult& r) {
  const std::string cls = classification_name(r);
  os << "iter,x,y,classification\n";
  os.precision(17);
  for (std::size_t i = 0; i < r.trace.size(); ++i)
    os << i << "," << r.trace[i].x << "," << r.trace[i].y << "," << cls << "\n";
}

}  // namespace secdyn
