#include <doctest.h>

#include <cmath>
#include <random>

#include "secdyn/polynomial.hpp"

using namespace secdyn;

namespace {

double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
}

Polynomial family_pd(int d) {
  return Polynomial::from_factored({{-2.0, 1}, {0.0, 1}, {1.0, d}});
}

Polynomial random_poly(std::mt19937_64& gen, int max_degree) {
  const int k = 2 + static_cast<int>(gen() % static_cast<std::uint64_t>(max_degree - 1));
  std::vector<double> c(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = uniform(gen, -5.0, 5.0);
  c.back() = 1.0;
  return Polynomial::from_coeffs(c);
}

// Central second difference with one Richardson refinement; oracle for the
// derivative operator, independent of coefficient differentiation.
double fd_second_derivative(const Polynomial& p, double x, double h = 1e-3) {
  auto d2 = [&](double step) { return (p(x + step) - 2.0 * p(x) + p(x - step)) / (step * step); };
  return (4.0 * d2(h / 2.0) - d2(h)) / 3.0;
}

// Taylor shift by synthetic division: coefficients of p(x + alpha) in powers
// of x, i.e. the lambda_m; independent of the derivative/factorial route.
std::vector<double> taylor_shift(std::vector<double> c, double alpha) {
  const std::size_t n = c.size();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    // divide c by (x - alpha): remainder is the next shifted coefficient
    double carry = 0.0;
    for (std::size_t i = n - j; i-- > 0;) {
      const double tmp = c[i] + alpha * carry;
      c[i] = carry;
      carry = tmp;
    }
    out[j] = carry;
  }
  return out;
}

}  // namespace

TEST_CASE("eval_poly examples") {
  const auto p = Polynomial::from_coeffs({-1.0, 0.0, 1.0});
  CHECK(p(2.0) == 3.0);
  const auto p2 = family_pd(2);
  CHECK(p2(1.0) == 0.0);
  CHECK(p2(-2.0) == 0.0);
}

TEST_CASE("derivative exact and against finite differences") {
  const auto d2 = derivative(Polynomial::from_coeffs({0.0, 0.0, 0.0, 1.0}), 2);
  REQUIRE(d2.size() == 2);
  CHECK(d2[0] == 0.0);
  CHECK(d2[1] == 6.0);

  const auto p = Polynomial::from_coeffs({-1.0, 0.0, 1.0});
  CHECK(derivative(p, 0) == p.coeffs());
  CHECK(derivative(p, 5) == std::vector<double>{0.0});

  const auto p2 = family_pd(2);
  const double second = eval_poly(derivative(p2, 2), 1.0);
  CHECK(second == 6.0);
  CHECK(std::abs(fd_second_derivative(p2, 1.0) - 6.0) < 1e-6);
}

TEST_CASE("lambda_m examples and shift oracle") {
  const auto p2 = family_pd(2);
  CHECK(lambda_m(p2, 1.0, 2) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(lambda_m(p2, 1.0, 3) == doctest::Approx(4.0).epsilon(1e-14));
  // below the multiplicity the derivatives vanish
  CHECK(lambda_m(p2, 1.0, 0) == 0.0);
  CHECK(lambda_m(p2, 1.0, 1) == 0.0);
  const auto p5 = family_pd(5);
  for (int m = 0; m < 5; ++m) CHECK(std::abs(lambda_m(p5, 1.0, m)) < 1e-12);

  std::mt19937_64 gen(42);
  for (int trial = 0; trial < 25; ++trial) {
    const auto p = random_poly(gen, 8);
    const double alpha = uniform(gen, -2.0, 2.0);
    const auto shifted = taylor_shift(p.coeffs(), alpha);
    for (int m = 0; m <= p.degree(); ++m) {
      const double lm = lambda_m(p, alpha, m);
      CHECK(std::abs(lm - shifted[static_cast<std::size_t>(m)]) <=
            1e-10 * std::max(1.0, std::abs(shifted[static_cast<std::size_t>(m)])));
    }
  }
}

TEST_CASE("q_m_eval examples and factorization identity") {
  CHECK(q_m_eval(2, 1.0, 2.0) == 3.0);
  CHECK(q_m_eval(3, 1.0, 1.0) == 3.0);
  CHECK(q_m_eval(4, 2.0, -1.0) == (16.0 - 1.0) / 3.0);

  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(gen() % 8);
    const double x = uniform(gen, -3.0, 3.0);
    const double y = uniform(gen, -3.0, 3.0);
    const double lhs = std::pow(x, m) - std::pow(y, m);
    const double rhs = (x - y) * q_m_eval(m, x, y);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
  }
}

TEST_CASE("q_eval quotient and diagonal identities") {
  const auto sq = Polynomial::from_coeffs({0.0, 0.0, 1.0});
  CHECK(q_eval(sq, 1.5, -0.5) == 1.0);
  CHECK(q_eval(sq, 2.0, 3.0) == 5.0);

  const auto cube = Polynomial::from_coeffs({-1.0, 0.0, 0.0, 1.0});
  CHECK(q_eval(cube, 1.0, 1.0) == 3.0);

  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = random_poly(gen, 8);
    const double x = uniform(gen, -3.0, 3.0);
    double y = uniform(gen, -3.0, 3.0);
    if (x == y) y += 0.25;
    const double lhs = p(x) - p(y);
    const double rhs = (x - y) * q_eval(p, x, y);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max({1.0, std::abs(p(x)), std::abs(p(y))}));

    const auto dp = derivative(p, 1);
    const double pd = eval_poly(dp, x);
    CHECK(std::abs(q_eval(p, x, x) - pd) <= 1e-12 * std::max(1.0, std::abs(pd)));
  }
}

TEST_CASE("n_d_eval examples") {
  const auto p = Polynomial::from_coeffs({-1.0, 0.0, 1.0});
  const auto nd = n_d_eval(p, 0.0, 2.0);
  CHECK(nd.n == 1.0);
  CHECK(nd.d == 2.0);

  // second coordinate collapses to the root on the line y = alpha
  const auto p2 = family_pd(2);
  for (double x : {-1.3, 0.4, 2.2}) {
    const auto v = n_d_eval(p2, x, 1.0);
    CHECK(v.n == doctest::Approx(1.0 * v.d).epsilon(1e-12));
  }

  const auto vv = n_d_eval(p2, 1.0, 1.0);
  CHECK(vv.n == 0.0);
  CHECK(vv.d == 0.0);
}

TEST_CASE("n1_eval annihilates the root lines and matches N - alpha D") {
  const auto p2 = family_pd(2);
  const RootSpec& r = p2.root(2);
  CHECK(n1_eval(p2, r, 1.0, 0.37) == 0.0);
  CHECK(n1_eval(p2, r, -0.8, 1.0) == 0.0);

  const auto nd = n_d_eval(p2, 1.1, 1.2);
  const double n1 = n1_eval(p2, r, 1.1, 1.2);
  CHECK(std::abs(nd.n - (1.0 * nd.d + n1)) <=
        1e-10 * std::max({1.0, std::abs(nd.n), std::abs(nd.d), std::abs(n1)}));

  CHECK_THROWS_AS(n1_eval(p2, p2.root(0), 0.1, 0.2), std::invalid_argument);
}

TEST_CASE("taylor_d_eval equals q_eval near the root") {
  const auto p2 = family_pd(2);
  CHECK(taylor_d_eval(p2, p2.root(2), 1.0, 1.0) == 0.0);
  CHECK(taylor_d_eval(p2, p2.root(2), 1.1, 1.0) ==
        doctest::Approx(q_eval(p2, 1.1, 1.0)).epsilon(1e-12));

  const auto p3 = family_pd(3);
  CHECK(taylor_d_eval(p3, p3.root(2), 0.9, 1.05) ==
        doctest::Approx(q_eval(p3, 0.9, 1.05)).epsilon(1e-12));
}

TEST_CASE("Taylor decomposition over the unit box for the whole family") {
  std::mt19937_64 gen(3);
  for (int d = 2; d <= 5; ++d) {
    const auto p = family_pd(d);
    const RootSpec& r = p.root(2);
    for (int trial = 0; trial < 400; ++trial) {
      const double x = 1.0 + uniform(gen, -1.0, 1.0);
      const double y = 1.0 + uniform(gen, -1.0, 1.0);
      const auto nd = n_d_eval(p, x, y);
      const double n1 = n1_eval(p, r, x, y);
      CHECK(std::abs(nd.n - (nd.d + n1)) <=
            1e-9 * std::max({1.0, std::abs(nd.n), std::abs(nd.d), std::abs(n1)}));
      const double td = taylor_d_eval(p, r, x, y);
      CHECK(std::abs(td - nd.d) <= 1e-10 * std::max({1.0, std::abs(td), std::abs(nd.d)}));
    }
  }
}

TEST_CASE("construction, normalization and validation") {
  // non-monic input is normalized (the secant map ignores scaling)
  const auto p = Polynomial::from_coeffs({-2.0, 0.0, 2.0});
  CHECK(p.coeffs() == std::vector<double>{-1.0, 0.0, 1.0});

  CHECK_THROWS_AS(Polynomial::from_coeffs({1.0, 2.0}), ValidationError);

  const auto p2 = family_pd(2);
  CHECK(p2.coeffs() == std::vector<double>{0.0, 2.0, -3.0, 0.0, 1.0});
  REQUIRE(p2.roots().size() == 3);
  CHECK(p2.root(2).multiplicity == 2);
  CHECK(p2.root(2).lambda(2) == 3.0);
  CHECK(p2.root(2).lambda(3) == 4.0);
  CHECK(p2.root(2).lambda(4) == 1.0);
  CHECK(p2.root(2).lambda(1) == 0.0);

  // claimed multiplicity lower than actual: |p^(d)(alpha)| check trips
  CHECK_THROWS_AS(Polynomial::from_factored({{1.0, 2}}, {-1.0, 1.0}), ValidationError);
  // claimed root that is not a root
  CHECK_THROWS_AS(Polynomial::with_roots({1.0, 0.0, 1.0, 1.0}, {{0.5, 1}}), ValidationError);
  // coincident roots
  CHECK_THROWS_AS(Polynomial::from_factored({{1.0, 1}, {1.0, 1}}), ValidationError);

  try {
    Polynomial::from_factored({{1.0, 2}}, {-1.0, 1.0});
    CHECK(false);
  } catch (const ValidationError& e) {
    CHECK(e.invariant().find("root-validation") == 0);
  }
}

TEST_CASE("polynomial text format") {
  const auto p = parse_polynomial("coeffs: -1 0 1");
  CHECK(p.degree() == 2);
  const auto q = parse_polynomial("factored: (-2 1)(0 1)(1 2)");
  CHECK(q.coeffs() == family_pd(2).coeffs());
  // trailing residual coefficients
  const auto r = parse_factored("(0 1)(1 2) 1 1");
  CHECK(r.degree() == 4);
  CHECK(r.find_root(0.0) == 0);
  CHECK_THROWS_AS(parse_polynomial("nope: 1 2 3"), ValidationError);
  CHECK_THROWS_AS(parse_factored("(1)"), ValidationError);
  CHECK_THROWS_AS(parse_coeffs("1 2 x"), ValidationError);
}

TEST_CASE("find_real_roots on the reference shapes") {
  const auto r1 = find_real_roots(std::vector<double>{-1.0, 0.0, 1.0});
  REQUIRE(r1.size() == 2);
  CHECK(r1[0].first == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r1[0].second == 1);
  CHECK(r1[1].first == doctest::Approx(1.0).epsilon(1e-12));

  const auto r2 = find_real_roots(std::vector<double>{0.0, 0.0, 0.0, 1.0});
  REQUIRE(r2.size() == 1);
  CHECK(r2[0].first == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(r2[0].second == 3);

  const auto r3 = find_real_roots(family_pd(2).coeffs());
  REQUIRE(r3.size() == 3);
  CHECK(r3[0].first == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(r3[1].first == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(r3[2].first == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r3[2].second == 2);

  // no real roots
  CHECK(find_real_roots(std::vector<double>{1.0, 0.0, 1.0}).empty());
}
