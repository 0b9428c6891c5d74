#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "secdyn/polynomial.hpp"
#include "secdyn/secant_map.hpp"

namespace secdyn {

enum class FocalKind { simple, non_simple };
enum class Parity { odd, even };

/// An indeterminacy point Q of the secant map (N(Q) = D(Q) = 0). Simple when
/// the gradients of N and D at Q are independent. The prefocal line is the
/// vertical x = Q.y onto which curves through Q land.
struct FocalPoint {
  PlanePoint location;
  FocalKind kind = FocalKind::simple;
  double prefocal_x = 0.0;
  std::array<double, 2> grad_n{0.0, 0.0};
  std::array<double, 2> grad_d{0.0, 0.0};
  int root_i = -1;  // the pair (alpha_i, alpha_j); i == j for diagonal points
  int root_j = -1;
};

/// All focal points of the secant map of p: the ordered pairs of distinct
/// roots (alpha_i, alpha_j), i != j, plus (alpha, alpha) for every root of
/// multiplicity >= 2, each classified by the gradient test.
std::vector<FocalPoint> focal_points(const Polynomial& p);

/// Geometric sum 1 + m + ... + m^{d-1}; strictly positive for odd d, with a
/// single real zero at m = -1 for even d.
double g_d(double m, int d);

/// Probe curve through `base` with quartic jets: offsets
///   xi(t)  = t + t^2/2 + t^3/6 + t^4/24
///   mu(t)  = m t + kappa t^2/2 + tau t^3/6 + sigma t^4/24.
struct CurveSpec {
  double slope = 0.0;      // m
  double curvature = 0.0;  // kappa
  double torsion = 0.0;    // tau
  double sigma = 0.0;
  PlanePoint base;
};

PlanePoint curve_point(const CurveSpec& c, double t);

struct ExtrapolationSchedule {
  double t0 = 1e-2;
  double ratio = 0.5;
  int n_steps = 10;
  int order = 4;
};

struct CurveLimit {
  PlanePoint value;            // (base.y, extrapolated second coordinate)
  double error_estimate = 0.0; // spread of the last two extrapolation levels
  bool divergent = false;      // the sampled values grow without bound
};

/// Richardson/Neville extrapolation of S(curve(t)) to t -> 0. This is the
/// independent numeric route for every landing value; the closed forms below
/// are cross-checked against it.
CurveLimit numeric_curve_limit(const Polynomial& p, const CurveSpec& c,
                               const ExtrapolationSchedule& sched = {});

/// Thrown when a landing denominator vanishes: the landing escapes to
/// infinity for that curvature.
class SingularCurvature : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Landing data at the non-simple focal point (alpha, alpha) of a multiple
/// root: slope -1 curves land at y_kappa = alpha - lambda_d / C(kappa) with
/// C(kappa) = (d lambda_d / 4)(kappa + 1) + lambda_{d+1}.
struct LandingMap {
  double alpha = 0.0;
  int multiplicity = 0;
  double lambda_d = 0.0;
  double lambda_d1 = 0.0;  // lambda_{d+1} (0 when d == degree)
  Parity parity = Parity::even;

  static LandingMap for_root(const Polynomial& p, int root_index);
};

double curvature_to_landing(const LandingMap& lm, double kappa);
double landing_to_curvature(const LandingMap& lm, double y);

/// Landing of the slope-0, curvature-kappa curve through the mixed focal
/// point (alpha, beta): beta a simple root, alpha a double root. The landing
/// point on the prefocal line x = beta is
///   (beta, (beta p''(alpha) - alpha p'(beta) kappa) / (p''(alpha) - p'(beta) kappa)).
PlanePoint mixed_focal_landing(const Polynomial& p, double alpha, double beta, double kappa);

/// Mixed partial d^m q / dx^{m-l} dy^l at a pair of distinct roots, via the
/// term-by-term recursion with base case q(alpha1, alpha2) = 0.
double deriv_q_at_pair(const Polynomial& p, double alpha1, double alpha2, int m, int l);

/// Mixed partial d^m N / dx^{m-l} dy^l at a pair of distinct roots, in terms
/// of the q derivatives.
double deriv_n_at_pair(const Polynomial& p, double alpha1, double alpha2, int m, int l);

}  // namespace secdyn
