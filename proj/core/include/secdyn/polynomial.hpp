#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace secdyn {

/// Thrown when a construction-time invariant fails. `invariant()` names the
/// violated check so front ends can report it verbatim.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string invariant, const std::string& msg)
      : std::runtime_error(msg), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// A validated real root alpha of multiplicity d >= 1, with the normalized
/// Taylor coefficients lambda_m = p^(m)(alpha)/m! cached for m = d..k.
/// Multiplicities are exact integers supplied by the caller; lambda(m) is
/// exactly zero for m < d by definition of the multiplicity.
struct RootSpec {
  double alpha = 0.0;
  int multiplicity = 1;
  std::vector<double> lambdas;  // lambda_d .. lambda_k
  double shift_radius = 0.0;    // box half-width for shifted N/D evaluation (d >= 2)

  double lambda(int m) const {
    if (m < multiplicity) return 0.0;
    const auto i = static_cast<std::size_t>(m - multiplicity);
    return i < lambdas.size() ? lambdas[i] : 0.0;
  }
};

// Validation thresholds. Root checks are scale-relative: scale_j is the max
// coefficient magnitude of p^(j).
inline constexpr double kRootDerivTol = 1e-8;
inline constexpr double kFactorRebuildTol = 1e-10;
inline constexpr double kMinRootSeparation = 2e-8;  // 2 x default conv_tol

/// Real monic polynomial of degree k >= 2 with an optional validated list of
/// real roots. Immutable after construction; all operations are pure.
class Polynomial {
 public:
  /// Coefficients a_0..a_k, low order first. Normalized to monic (the secant
  /// map is invariant under scaling of p). No root information attached.
  static Polynomial from_coeffs(std::vector<double> coeffs);

  /// Product of (x - alpha)^d factors times an optional residual polynomial,
  /// expanded and normalized to monic. The supplied multiplicities are taken
  /// as exact and validated against the expanded coefficients.
  static Polynomial from_factored(const std::vector<std::pair<double, int>>& factors,
                                  std::vector<double> residual = {1.0});

  /// Attach claimed roots to an explicit coefficient list. Throws
  /// ValidationError if any root fails the derivative or factorization checks.
  static Polynomial with_roots(std::vector<double> coeffs,
                               const std::vector<std::pair<double, int>>& roots);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  bool has_roots() const { return !roots_.empty(); }
  const std::vector<RootSpec>& roots() const { return roots_; }
  const RootSpec& root(int i) const { return roots_.at(static_cast<std::size_t>(i)); }

  double operator()(double x) const;

  /// Index of the multiple root whose shifted-evaluation box contains (x, y),
  /// or -1. Boxes of distinct roots are disjoint by construction.
  int shifted_root_for(double x, double y) const;

  /// Index of the root equal to alpha (within 1e-12 relative), or -1.
  int find_root(double alpha) const;

  std::string describe() const;

 private:
  Polynomial(std::vector<double> coeffs, std::vector<RootSpec> roots);

  std::vector<double> coeffs_;
  std::vector<RootSpec> roots_;
};

/// Horner evaluation of a coefficient list (low order first).
double eval_poly(std::span<const double> coeffs, double x);
inline double eval_poly(const Polynomial& p, double x) { return p(x); }

/// Exact coefficient differentiation; order > degree yields the zero list {0}.
std::vector<double> derivative(std::span<const double> coeffs, int order);
std::vector<double> derivative(const Polynomial& p, int order);

/// p^(m)(alpha) / m!
double lambda_m(const Polynomial& p, double alpha, int m);

/// q_m(x, y) = sum_{l=0}^{m-1} x^{m-1-l} y^l, so x^m - y^m = (x-y) q_m(x, y).
double q_m_eval(int m, double x, double y);

/// The divided-difference polynomial q(x, y) = sum_m a_m q_m(x, y). Equals
/// (p(x) - p(y))/(x - y) off the diagonal and p'(x) on it, evaluated without
/// any subtraction of nearly equal quantities.
double q_eval(const Polynomial& p, double x, double y);

struct NdPair {
  double n = 0.0;
  double d = 0.0;
};

/// N(x, y) = y q(x, y) - p(y) and D(x, y) = q(x, y); the second coordinate of
/// the secant map is N/D wherever D != 0.
NdPair n_d_eval(const Polynomial& p, double x, double y);

/// N1(x, y) = (x-a)(y-a) sum_{m=d}^k lambda_m q_{m-1}(x-a, y-a) for a root of
/// multiplicity d >= 2, using the cached lambda_m. Satisfies N = a D + N1.
double n1_eval(const Polynomial& p, const RootSpec& root, double x, double y);

/// D(x, y) rebuilt from the Taylor coefficients at the root:
/// sum_{m=d}^k lambda_m q_m(x-a, y-a). Identical to q_eval in exact
/// arithmetic, and free of cancellation near (a, a).
double taylor_d_eval(const Polynomial& p, const RootSpec& root, double x, double y);

/// Parse the polynomial text format: either "coeffs: a0 a1 ... ak" or
/// "factored: (alpha multiplicity)+ [residual coeffs]".
Polynomial parse_polynomial(const std::string& text);
Polynomial parse_coeffs(const std::string& payload);
Polynomial parse_factored(const std::string& payload);

/// Best-effort detection of the real roots (with multiplicities) of a
/// coefficient list, for command-line inputs given in coefficient form.
/// Intended for well-separated desk-scale roots; factored input remains the
/// authoritative way to state multiplicities.
std::vector<std::pair<double, int>> find_real_roots(std::span<const double> coeffs);

struct RootCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The per-root derivative checks and the factor-rebuild check, reported
/// individually (used by construction and by the verify command).
std::vector<RootCheck> validate_roots(std::span<const double> coeffs,
                                      const std::vector<std::pair<double, int>>& roots);

}  // namespace secdyn
