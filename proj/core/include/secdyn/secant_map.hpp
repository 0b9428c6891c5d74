#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "secdyn/polynomial.hpp"

namespace secdyn {

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Finite-horizon iteration limits. The defaults are the library-wide
/// reference values; render_defaults() lowers max_iter for grid work.
struct OrbitLimits {
  int max_iter = 200;
  double conv_tol = 1e-8;
  int conv_streak = 3;
  double escape_radius = 1e8;
  double pole_guard = 1e-12;

  static OrbitLimits local_defaults() { return {}; }
  static OrbitLimits render_defaults() {
    OrbitLimits l;
    l.max_iter = 100;
    return l;
  }
};

/// The (N, D, N1) triple and quotient of the secant map's second coordinate
/// at one point, with reliability flags. Near a multiple root the triple is
/// evaluated in the shifted Taylor basis (see shifted_root), which keeps full
/// relative accuracy where the global form cancels to rounding noise.
struct SecantEval {
  double n = 0.0;
  double d = 0.0;
  double n1 = 0.0;       // meaningful when shifted_root >= 0
  double quotient = 0.0; // N/D; alpha + N1/D in the shifted basis
  bool near_pole = false;      // division unreliable: D == 0 or |D| <= guard |N|
  bool indeterminate = false;  // 0/0 form: N and D both vanish at local scale
  int shifted_root = -1;
};

SecantEval secant_eval(const Polynomial& p, double x, double y, double pole_guard = 1e-12);

struct StepResult {
  PlanePoint pt;
  bool near_pole = false;
};

/// One application of S(x, y) = (y, N/D). Signals near_pole instead of
/// returning an unreliable quotient.
StepResult secant_step(const Polynomial& p, PlanePoint pt, double pole_guard = 1e-12);

enum class OrbitClass : std::int8_t { converged, near_pole, escaped, non_convergent };

struct OrbitResult {
  OrbitClass cls = OrbitClass::non_convergent;
  int root_index = -1;  // valid when cls == converged
  int iterations = 0;
  std::vector<PlanePoint> trace;  // filled when requested
};

/// Iterate S from a seed until the first terminal classification:
/// near-pole step, escape past escape_radius, conv_streak consecutive
/// iterates within conv_tol of a root fixed point, or max_iter exhaustion.
/// A point exactly equal to a fixed point classifies immediately.
/// `iterations` reports the index of the deciding iterate (for convergence,
/// the first iterate of the confirming streak).
OrbitResult iterate_orbit(const Polynomial& p, PlanePoint seed, const OrbitLimits& limits,
                          bool record_trace = false);

/// The diagonal fixed points (alpha_i, alpha_i), one per validated root.
std::vector<std::pair<PlanePoint, int>> fixed_points(const Polynomial& p);

/// Membership test for the pole curve D(x, y) = 0 at guard resolution.
class PoleSet {
 public:
  explicit PoleSet(const Polynomial& p, double guard = 1e-12) : p_(&p), guard_(guard) {}
  bool contains(PlanePoint pt) const;

 private:
  const Polynomial* p_;
  double guard_;
};

std::string classification_name(const OrbitResult& r);
void write_orbit_csv(std::ostream& os, const OrbitResult& r);

}  // namespace secdyn
