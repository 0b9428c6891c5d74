#include "secdyn/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace secdyn {

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double c : v) m = std::max(m, std::abs(c));
  return m;
}

// Multiply the coefficient list by (x - alpha) in place.
void multiply_linear(std::vector<double>& c, double alpha) {
  c.push_back(0.0);
  for (std::size_t i = c.size() - 1; i > 0; --i) c[i] = c[i - 1] - alpha * c[i];
  c[0] = -alpha * c[0];
}

std::vector<double> expand_factors(const std::vector<std::pair<double, int>>& factors,
                                   std::vector<double> residual) {
  if (residual.empty()) residual = {1.0};
  for (const auto& [alpha, d] : factors)
    for (int i = 0; i < d; ++i) multiply_linear(residual, alpha);
  return residual;
}

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

}  // namespace

double eval_poly(std::span<const double> coeffs, double x) {
  if (coeffs.empty()) return 0.0;
  double s = coeffs.back();
  for (std::size_t i = coeffs.size() - 1; i > 0; --i) s = s * x + coeffs[i - 1];
  return s;
}

std::vector<double> derivative(std::span<const double> coeffs, int order) {
  if (order < 0) throw std::invalid_argument("derivative: order must be >= 0");
  std::vector<double> c(coeffs.begin(), coeffs.end());
  for (int j = 0; j < order; ++j) {
    if (c.size() <= 1) return {0.0};
    for (std::size_t i = 1; i < c.size(); ++i) c[i - 1] = c[i] * static_cast<double>(i);
    c.pop_back();
  }
  if (c.empty()) c = {0.0};
  return c;
}

std::vector<double> derivative(const Polynomial& p, int order) {
  return derivative(std::span<const double>(p.coeffs()), order);
}

double lambda_m(const Polynomial& p, double alpha, int m) {
  if (m < 0 || m > p.degree()) throw std::invalid_argument("lambda_m: need 0 <= m <= degree");
  const auto dm = derivative(p, m);
  return eval_poly(dm, alpha) / factorial(m);
}

double q_m_eval(int m, double x, double y) {
  if (m < 1) throw std::invalid_argument("q_m_eval: need m >= 1");
  // q_1 = 1, q_{j+1} = x^j + y q_j
  double q = 1.0;
  double xp = 1.0;
  for (int j = 1; j < m; ++j) {
    xp *= x;
    q = xp + y * q;
  }
  return q;
}

double q_eval(const Polynomial& p, double x, double y) {
  // Fused synthetic division by (t - x) and Horner in y: this evaluates
  // sum_m a_m q_m(x, y) without ever forming p(x) - p(y).
  const auto& a = p.coeffs();
  const std::size_t k = a.size() - 1;
  double b = a[k];
  double val = b;
  for (std::size_t l = k - 1; l-- > 0;) {
    b = a[l + 1] + x * b;
    val = val * y + b;
  }
  return val;
}

NdPair n_d_eval(const Polynomial& p, double x, double y) {
  const double d = q_eval(p, x, y);
  return {y * d - p(y), d};
}

double n1_eval(const Polynomial& p, const RootSpec& root, double x, double y) {
  if (root.multiplicity < 2)
    throw std::invalid_argument("n1_eval: root multiplicity must be >= 2");
  const int k = p.degree();
  const int d = root.multiplicity;
  const double u = x - root.alpha;
  const double v = y - root.alpha;
  double qm = 1.0, qprev = 0.0, upow = 1.0;  // q_1, q_0, u^0
  double s = 0.0;
  for (int m = 1; m <= k; ++m) {
    if (m >= d) s += root.lambda(m) * qprev;
    upow *= u;
    const double qnext = upow + v * qm;
    qprev = qm;
    qm = qnext;
  }
  return u * v * s;
}

double taylor_d_eval(const Polynomial& p, const RootSpec& root, double x, double y) {
  if (root.multiplicity < 2)
    throw std::invalid_argument("taylor_d_eval: root multiplicity must be >= 2");
  const int k = p.degree();
  const int d = root.multiplicity;
  const double u = x - root.alpha;
  const double v = y - root.alpha;
  double qm = 1.0, upow = 1.0;
  double acc = 0.0;
  for (int m = 1; m <= k; ++m) {
    if (m >= d) acc += root.lambda(m) * qm;
    upow *= u;
    qm = upow + v * qm;
  }
  return acc;
}

std::vector<RootCheck> validate_roots(std::span<const double> coeffs,
                                      const std::vector<std::pair<double, int>>& roots) {
  std::vector<RootCheck> out;
  const int k = static_cast<int>(coeffs.size()) - 1;
  auto add = [&out](const std::string& name, bool pass, const std::string& detail) {
    out.push_back({name, pass, detail});
  };

  int mult_sum = 0;
  for (const auto& [alpha, d] : roots) mult_sum += d;
  {
    std::ostringstream os;
    os << "sum of multiplicities " << mult_sum << " vs degree " << k;
    add("multiplicity-budget", mult_sum <= k, os.str());
  }

  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      const double sep = std::abs(roots[i].first - roots[j].first);
      if (sep <= kMinRootSeparation) {
        std::ostringstream os;
        os << "roots " << roots[i].first << " and " << roots[j].first
           << " closer than " << kMinRootSeparation;
        add("root-separation", false, os.str());
      }
    }

  // Derivative checks per root: p^(j)(alpha) vanishes for j < d at the scale
  // of p^(j)'s coefficients, and p^(d)(alpha) does not.
  for (const auto& [alpha, d] : roots) {
    std::ostringstream name;
    name << "root-validation(alpha=" << alpha << ",d=" << d << ")";
    bool ok = d >= 1 && d <= k;
    std::ostringstream detail;
    if (!ok) detail << "multiplicity out of range";
    std::vector<double> dc(coeffs.begin(), coeffs.end());
    for (int j = 0; ok && j <= d; ++j) {
      const double scale = std::max(1.0, max_abs(dc));
      const double v = eval_poly(dc, alpha);
      if (j < d) {
        if (std::abs(v) > kRootDerivTol * scale) {
          ok = false;
          detail << "|p^(" << j << ")(" << alpha << ")| = " << std::abs(v)
                 << " exceeds " << kRootDerivTol * scale;
        }
      } else if (std::abs(v) <= kRootDerivTol * scale) {
        ok = false;
        detail << "|p^(" << d << ")(" << alpha << ")| = " << std::abs(v)
               << " below threshold " << kRootDerivTol * scale
               << " (multiplicity larger than claimed?)";
      }
      dc = derivative(dc, 1);
    }
    if (ok) detail << "ok";
    add(name.str(), ok, detail.str());
  }

  // Factor-rebuild check: expanding the claimed factors times the deflated
  // residual must reproduce the coefficients.
  if (!roots.empty()) {
    std::vector<double> residual(coeffs.begin(), coeffs.end());
    bool deflated = true;
    for (const auto& [alpha, d] : roots) {
      for (int j = 0; j < d && deflated; ++j) {
        // synthetic division by (x - alpha)
        std::vector<double> quot(residual.size() - 1, 0.0);
        double carry = residual.back();
        for (std::size_t i = residual.size() - 1; i > 0; --i) {
          quot[i - 1] = carry;
          carry = residual[i - 1] + alpha * carry;
        }
        if (quot.empty()) deflated = false;
        residual = std::move(quot);
      }
      if (!deflated) break;
    }
    bool ok = deflated;
    double err = 0.0;
    if (ok) {
      std::vector<std::pair<double, int>> fs(roots.begin(), roots.end());
      const auto rebuilt = expand_factors(fs, residual);
      ok = rebuilt.size() == coeffs.size();
      const double scale = std::max(1.0, max_abs(coeffs));
      for (std::size_t i = 0; ok && i < rebuilt.size(); ++i)
        err = std::max(err, std::abs(rebuilt[i] - coeffs[i]) / scale);
      ok = ok && err <= kFactorRebuildTol;
    }
    std::ostringstream detail;
    detail << "max coefficient mismatch " << err;
    add("factor-rebuild", ok, detail.str());
  }
  return out;
}

Polynomial::Polynomial(std::vector<double> coeffs, std::vector<RootSpec> roots)
    : coeffs_(std::move(coeffs)), roots_(std::move(roots)) {}

Polynomial Polynomial::from_coeffs(std::vector<double> coeffs) {
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.size() < 3)
    throw ValidationError("degree", "polynomial degree must be at least 2");
  const double lead = coeffs.back();
  if (!(std::abs(lead) > 0.0) || !std::isfinite(lead))
    throw ValidationError("leading-coefficient", "leading coefficient must be finite and nonzero");
  if (lead != 1.0)
    for (auto& c : coeffs) c /= lead;
  for (double c : coeffs)
    if (!std::isfinite(c)) throw ValidationError("coefficients", "coefficients must be finite");
  return Polynomial(std::move(coeffs), {});
}

Polynomial Polynomial::with_roots(std::vector<double> coeffs,
                                  const std::vector<std::pair<double, int>>& roots) {
  Polynomial base = from_coeffs(std::move(coeffs));
  if (roots.empty()) return base;
  const auto checks = validate_roots(base.coeffs_, roots);
  for (const auto& c : checks)
    if (!c.pass) throw ValidationError(c.name, c.name + ": " + c.detail);

  const int k = base.degree();
  std::vector<RootSpec> specs;
  specs.reserve(roots.size());
  for (const auto& [alpha, d] : roots) {
    RootSpec r;
    r.alpha = alpha;
    r.multiplicity = d;
    std::vector<double> dc = base.coeffs_;
    double fact = 1.0;
    for (int m = 0; m <= k; ++m) {
      if (m >= 1) fact *= m;
      if (m >= d) r.lambdas.push_back(eval_poly(dc, alpha) / fact);
      dc = derivative(dc, 1);
    }
    specs.push_back(std::move(r));
  }
  // Shifted-evaluation boxes: well inside the gap to the nearest other root.
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].multiplicity < 2) continue;
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < specs.size(); ++j)
      if (j != i) sep = std::min(sep, std::abs(specs[i].alpha - specs[j].alpha));
    specs[i].shift_radius = std::min(0.25, 0.45 * sep);
  }
  return Polynomial(std::move(base.coeffs_), std::move(specs));
}

Polynomial Polynomial::from_factored(const std::vector<std::pair<double, int>>& factors,
                                     std::vector<double> residual) {
  if (factors.empty()) throw ValidationError("factored-form", "at least one (alpha multiplicity) factor required");
  return with_roots(expand_factors(factors, std::move(residual)), factors);
}

double Polynomial::operator()(double x) const { return eval_poly(coeffs_, x); }

int Polynomial::shifted_root_for(double x, double y) const {
  for (std::size_t i = 0; i < roots_.size(); ++i) {
    const RootSpec& r = roots_[i];
    if (r.multiplicity < 2) continue;
    if (std::max(std::abs(x - r.alpha), std::abs(y - r.alpha)) <= r.shift_radius)
      return static_cast<int>(i);
  }
  return -1;
}

int Polynomial::find_root(double alpha) const {
  for (std::size_t i = 0; i < roots_.size(); ++i) {
    const double tol = 1e-12 * std::max(1.0, std::abs(alpha));
    if (std::abs(roots_[i].alpha - alpha) <= tol) return static_cast<int>(i);
  }
  return -1;
}

std::string Polynomial::describe() const {
  std::ostringstream os;
  os << "degree " << degree();
  if (!roots_.empty()) {
    os << ", roots:";
    for (const auto& r : roots_) os << " " << r.alpha << "(d=" << r.multiplicity << ")";
  }
  return os.str();
}

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<double> parse_numbers(const std::string& s, const char* what) {
  std::istringstream is(s);
  std::vector<double> out;
  double v;
  while (is >> v) out.push_back(v);
  std::string rest;
  if (!(is >> rest).eof() || (is.fail() && !is.eof()))
    throw ValidationError("parse", std::string(what) + ": expected whitespace-separated numbers in '" + s + "'");
  return out;
}

}  // namespace

Polynomial parse_coeffs(const std::string& payload) {
  const auto nums = parse_numbers(payload, "coeffs");
  if (nums.empty()) throw ValidationError("parse", "coeffs: empty coefficient list");
  return Polynomial::from_coeffs(nums);
}

Polynomial parse_factored(const std::string& payload) {
  std::vector<std::pair<double, int>> factors;
  std::size_t i = 0;
  const std::string s = payload;
  auto skip_ws = [&] { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i; };
  skip_ws();
  while (i < s.size() && s[i] == '(') {
    const std::size_t close = s.find(')', i);
    if (close == std::string::npos)
      throw ValidationError("parse", "factored: unterminated '(' in '" + payload + "'");
    const auto nums = parse_numbers(s.substr(i + 1, close - i - 1), "factored");
    if (nums.size() != 2)
      throw ValidationError("parse", "factored: each factor must be (alpha multiplicity)");
    const double d = nums[1];
    if (d < 1.0 || d != std::floor(d) || d > 64.0)
      throw ValidationError("parse", "factored: multiplicity must be a small positive integer");
    factors.emplace_back(nums[0], static_cast<int>(d));
    i = close + 1;
    skip_ws();
  }
  if (factors.empty())
    throw ValidationError("parse", "factored: expected at least one (alpha multiplicity) group");
  std::vector<double> residual = {1.0};
  if (i < s.size()) residual = parse_numbers(s.substr(i), "factored residual");
  if (residual.empty()) residual = {1.0};
  return Polynomial::from_factored(factors, residual);
}

Polynomial parse_polynomial(const std::string& text) {
  const std::string t = trimmed(text);
  if (t.rfind("coeffs:", 0) == 0) return parse_coeffs(t.substr(7));
  if (t.rfind("factored:", 0) == 0) return parse_factored(t.substr(9));
  throw ValidationError("parse", "polynomial text must start with 'coeffs:' or 'factored:'");
}

namespace {

// Real roots of a coefficient list by recursive critical-point isolation:
// the roots of p' split the line into monotone pieces; sign changes are
// bisected and near-zero critical values picked up as candidates.
std::vector<double> real_root_values(std::span<const double> coeffs) {
  std::vector<double> a(coeffs.begin(), coeffs.end());
  while (a.size() > 1 && a.back() == 0.0) a.pop_back();
  const int k = static_cast<int>(a.size()) - 1;
  if (k < 1) return {};
  if (k == 1) return {-a[0] / a[1]};

  double maxr = 0.0;
  for (int i = 0; i < k; ++i) maxr = std::max(maxr, std::abs(a[i] / a[k]));
  const double bound = 2.0 + 2.0 * maxr;

  const auto crit = real_root_values(derivative(a, 1));
  std::vector<double> pts = {-bound};
  for (double c : crit)
    if (c > -bound && c < bound) pts.push_back(c);
  pts.push_back(bound);
  std::sort(pts.begin(), pts.end());

  std::vector<double> roots;
  auto f = [&a](double x) { return eval_poly(a, x); };
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double lo = pts[i], hi = pts[i + 1];
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) {
      roots.push_back(lo);
      continue;
    }
    if ((flo < 0) == (fhi < 0) || fhi == 0.0) continue;  // endpoint roots handled as critical values
    for (int it = 0; it < 120 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0) == (flo < 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }
  // Even-multiplicity roots do not change sign; they sit at critical points
  // where p itself nearly vanishes.
  const double scale = std::max(1.0, max_abs(a)) * std::pow(std::max(1.0, maxr), k);
  for (double c : crit)
    if (std::abs(f(c)) <= 1e-9 * scale) roots.push_back(c);

  std::sort(roots.begin(), roots.end());
  std::vector<double> dedup;
  for (double r : roots)
    if (dedup.empty() || std::abs(r - dedup.back()) > 1e-7 * std::max(1.0, std::abs(r)))
      dedup.push_back(r);
  return dedup;
}

}  // namespace

std::vector<std::pair<double, int>> find_real_roots(std::span<const double> coeffs) {
  std::vector<double> a(coeffs.begin(), coeffs.end());
  while (a.size() > 1 && a.back() == 0.0) a.pop_back();
  const int k = static_cast<int>(a.size()) - 1;
  if (k < 1) return {};
  if (k > 30) throw std::invalid_argument("find_real_roots: degree too large");

  auto candidates = real_root_values(a);
  std::vector<std::pair<double, int>> out;
  for (double alpha : candidates) {
    // Multiplicity = first derivative order that stays away from zero.
    int d = 0;
    std::vector<double> dc = a;
    for (int j = 0; j <= k; ++j) {
      const double scale = std::max(1.0, max_abs(dc));
      if (std::abs(eval_poly(dc, alpha)) > kRootDerivTol * scale) {
        d = j;
        break;
      }
      dc = derivative(dc, 1);
    }
    if (d == 0) continue;  // not actually a root at validation scale
    // Polish on p^(d-1), which has a simple root at alpha.
    const auto pm1 = derivative(a, d - 1);
    const auto pm = derivative(a, d);
    double x = alpha;
    for (int it = 0; it < 8; ++it) {
      const double fx = eval_poly(pm1, x);
      const double dfx = eval_poly(pm, x);
      if (dfx == 0.0) break;
      const double step = fx / dfx;
      if (!std::isfinite(step) || std::abs(step) > 1.0) break;
      x -= step;
    }
    out.emplace_back(x, d);
  }
  std::sort(out.begin(), out.end());
  std::vector<std::pair<double, int>> dedup;
  for (const auto& r : out)
    if (dedup.empty() || std::abs(r.first - dedup.back().first) > 1e-7 * std::max(1.0, std::abs(r.first)))
      dedup.push_back(r);
  return dedup;
}

}  // namespace secdyn
