#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "secdyn/secant_map.hpp"

using namespace secdyn;

namespace {

double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
}

Polynomial family_pd(int d) {
  return Polynomial::from_factored({{-2.0, 1}, {0.0, 1}, {1.0, d}});
}

// Eq-style direct step, used only as an oracle away from the diagonal.
PlanePoint naive_step(const Polynomial& p, PlanePoint pt) {
  return {pt.y, pt.y - p(pt.y) * (pt.x - pt.y) / (p(pt.x) - p(pt.y))};
}

}  // namespace

TEST_CASE("secant step matches the direct formula at a reference point") {
  const auto p = Polynomial::from_coeffs({-1.0, 0.0, 1.0});
  const auto s = secant_step(p, {0.0, 2.0});
  REQUIRE_FALSE(s.near_pole);
  CHECK(s.pt.x == 2.0);
  CHECK(s.pt.y == 0.5);
}

TEST_CASE("step identity on the root lines") {
  std::mt19937_64 gen(5);
  for (int d : {1, 2, 3}) {
    const auto p = d == 1 ? Polynomial::from_factored({{-1.0, 1}, {1.0, 1}}) : family_pd(d);
    for (const auto& r : p.roots()) {
      const double a = r.alpha;
      for (int trial = 0; trial < 100; ++trial) {
        const double xi = uniform(gen, -0.5, 0.5);
        const double mu = uniform(gen, -0.5, 0.5);
        const auto s1 = secant_step(p, {a + xi, a});
        if (!s1.near_pole) {
          CHECK(std::abs(s1.pt.x - a) <= 1e-12 * std::max(1.0, std::abs(a)));
          CHECK(std::abs(s1.pt.y - a) <= 1e-12 * std::max(1.0, std::abs(a)));
        }
        const auto s2 = secant_step(p, {a, a + mu});
        if (!s2.near_pole) {
          CHECK(std::abs(s2.pt.x - (a + mu)) <= 1e-12 * std::max(1.0, std::abs(a + mu)));
          CHECK(std::abs(s2.pt.y - a) <= 1e-12 * std::max(1.0, std::abs(a)));
        }
      }
    }
  }
}

TEST_CASE("q-form step equals the naive formula away from the diagonal") {
  std::mt19937_64 gen(17);
  const auto p2 = family_pd(2);
  const auto sq = Polynomial::from_coeffs({-1.0, 0.0, 1.0});
  int tested = 0;
  while (tested < 10000) {
    const Polynomial& p = (gen() & 1) ? p2 : sq;
    PlanePoint pt{uniform(gen, -3.0, 3.0), uniform(gen, -3.0, 3.0)};
    if (std::abs(pt.x - pt.y) <= 0.1) continue;
    if (std::abs(p(pt.x) - p(pt.y)) <= 0.1) continue;
    const auto s = secant_step(p, pt);
    if (s.near_pole) continue;
    const auto n = naive_step(p, pt);
    CHECK(std::abs(s.pt.y - n.y) <= 1e-9 * std::max(1.0, std::abs(n.y)));
    ++tested;
  }
}

TEST_CASE("quadrant trapping for even multiplicity") {
  std::mt19937_64 gen(23);
  for (int d : {2, 4}) {
    const auto p = family_pd(d);
    const OrbitLimits limits;
    int converged = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      double dx, dy;
      do {
        dx = uniform(gen, 0.0, 1e-3);
        dy = uniform(gen, 0.0, 1e-3);
      } while (dx * dx + dy * dy > 1e-6);
      const auto r = iterate_orbit(p, {1.0 + dx, 1.0 + dy}, limits);
      if (r.cls == OrbitClass::converged && r.root_index == 2) ++converged;
    }
    CHECK(converged == 1000);
  }
}

TEST_CASE("one-step contraction near odd-multiplicity fixed points") {
  std::mt19937_64 gen(29);
  for (int d : {3, 5}) {
    const auto p = family_pd(d);
    for (int trial = 0; trial < 1000; ++trial) {
      double dx, dy;
      do {
        dx = uniform(gen, -1e-3, 1e-3);
        dy = uniform(gen, -1e-3, 1e-3);
      } while (dx * dx + dy * dy > 1e-6 || dx == 0.0 || dy == 0.0);
      const auto s = secant_step(p, {1.0 + dx, 1.0 + dy});
      REQUIRE_FALSE(s.near_pole);
      const double before = std::hypot(dx, dy);
      const double after = std::hypot(s.pt.x - 1.0, s.pt.y - 1.0);
      CHECK(after <= before * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("orbit classification") {
  const auto p2 = family_pd(2);

  SUBCASE("exact fixed points classify immediately") {
    for (int i = 0; i < 3; ++i) {
      const double a = p2.root(i).alpha;
      const auto r = iterate_orbit(p2, {a, a}, OrbitLimits{});
      CHECK(r.cls == OrbitClass::converged);
      CHECK(r.root_index == i);
      CHECK(r.iterations == 0);
    }
    const auto cube = Polynomial::from_factored({{0.0, 3}});
    const auto r = iterate_orbit(cube, {0.0, 0.0}, OrbitLimits{});
    CHECK(r.cls == OrbitClass::converged);
    CHECK(r.iterations == 0);
  }

  SUBCASE("neighborhood convergence for the odd family") {
    const auto p3 = family_pd(3);
    const auto r = iterate_orbit(p3, {1.0 + 1e-4, 1.0 + 1e-4 + 1e-6}, OrbitLimits{});
    CHECK(r.cls == OrbitClass::converged);
    CHECK(r.root_index == 2);
  }

  SUBCASE("diagonal seeds away from roots just proceed") {
    const auto sq = Polynomial::from_factored({{-1.0, 1}, {1.0, 1}});
    const auto s = secant_step(sq, {0.5, 0.5});
    CHECK_FALSE(s.near_pole);
    const auto r = iterate_orbit(sq, {0.5, 0.5}, OrbitLimits{});
    CHECK(r.cls == OrbitClass::converged);
  }

  SUBCASE("pole seeds classify NearPole") {
    const auto sq = Polynomial::from_factored({{-1.0, 1}, {1.0, 1}});
    const auto r = iterate_orbit(sq, {2.0, -2.0}, OrbitLimits{});
    CHECK(r.cls == OrbitClass::near_pole);
    CHECK(r.iterations == 0);
  }

  SUBCASE("huge seeds classify Escaped") {
    const auto r = iterate_orbit(p2, {1e9, 1e9 + 1.0}, OrbitLimits{});
    CHECK(r.cls == OrbitClass::escaped);
  }

  SUBCASE("trace recording") {
    const auto r = iterate_orbit(p2, {0.2, 0.3}, OrbitLimits{}, true);
    CHECK(r.trace.size() >= 1);
    CHECK(r.trace[0].x == 0.2);
  }
}

TEST_CASE("fixed points enumerate the validated roots") {
  const auto p2 = family_pd(2);
  const auto fps = fixed_points(p2);
  REQUIRE(fps.size() == 3);
  CHECK(fps[0].first.x == -2.0);
  CHECK(fps[1].first.x == 0.0);
  CHECK(fps[2].first.x == 1.0);
  CHECK(fps[2].first.y == 1.0);

  const auto sq = Polynomial::from_factored({{-1.0, 1}, {1.0, 1}});
  CHECK(fixed_points(sq).size() == 2);
  const auto cube = Polynomial::from_factored({{0.0, 3}});
  CHECK(fixed_points(cube).size() == 1);
  CHECK_THROWS_AS(fixed_points(Polynomial::from_coeffs({1.0, 0.0, 1.0})), std::invalid_argument);
}

TEST_CASE("pole set membership") {
  const auto sq = Polynomial::from_factored({{-1.0, 1}, {1.0, 1}});
  const PoleSet poles(sq);
  CHECK(poles.contains({2.0, -2.0}));   // q = x + y = 0
  CHECK_FALSE(poles.contains({0.0, 2.0}));
}

TEST_CASE("orbit CSV trace format") {
  const auto sq = Polynomial::from_factored({{-1.0, 1}, {1.0, 1}});
  const auto r = iterate_orbit(sq, {2.0, -2.0}, OrbitLimits{}, true);
  std::ostringstream os;
  write_orbit_csv(os, r);
  CHECK(os.str() == "iter,x,y,classification\n0,2,-2,NearPole\n");
  CHECK(classification_name(r) == "NearPole");

  OrbitResult conv;
  conv.cls = OrbitClass::converged;
  conv.root_index = 2;
  CHECK(classification_name(conv) == "Converged(2)");
}
