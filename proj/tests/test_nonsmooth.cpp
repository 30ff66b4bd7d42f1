#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fxtiss/nonsmooth.hpp"
#include "fxtiss/ode.hpp"

using namespace fxtiss;

TEST_CASE("signed_power basics") {
  CHECK(signed_power(-8.0, 1.0 / 3.0) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(signed_power(0.0, 0.4) == 0.0);
  // high-precision oracle: exp(1.2 ln 2)
  const double oracle = std::exp(1.2 * std::log(2.0));
  CHECK(std::abs(signed_power(2.0, 6.0 / 5.0) - oracle) < 1e-15);
  CHECK(signed_power(2.0, 6.0 / 5.0) == doctest::Approx(2.297397).epsilon(1e-6));

  CHECK_THROWS_AS(signed_power(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(signed_power(1.0, -0.3), std::invalid_argument);
  CHECK_THROWS_AS(SignedPowerParams(0.0), std::invalid_argument);
  CHECK(SignedPowerParams(0.4).exponent == 0.4);
}

TEST_CASE("signed_power is odd and strictly increasing") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xs(-50.0, 50.0);
  std::uniform_real_distribution<double> qs(0.05, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = xs(rng), q = qs(rng);
    CHECK(signed_power(-x, q) == -signed_power(x, q));  // exact
  }
  for (int i = 0; i < 200; ++i) {
    const double q = qs(rng);
    double a = xs(rng), b = xs(rng);
    if (a > b) std::swap(a, b);
    if (a == b) continue;
    CHECK(signed_power(a, q) < signed_power(b, q));
  }
}

TEST_CASE("fxt_drift definition and properties") {
  const FxTDriftParams p(0.5, -1.0);
  CHECK(fxt_drift(Vec{0.0, 0.0}, p) == Vec{0.0, 0.0});

  const Vec e1{1.0, 0.0};
  const Vec fe1 = fxt_drift(e1, p);
  CHECK(fe1[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fe1[1] == 0.0);

  const Vec v = fxt_drift(Vec{3.0, 4.0}, p);
  CHECK(v[0] == doctest::Approx(3.0 / std::sqrt(5.0) + 15.0).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(4.0 / std::sqrt(5.0) + 20.0).epsilon(1e-12));
  CHECK(v[0] == doctest::Approx(16.34164).epsilon(1e-6));
  CHECK(v[1] == doctest::Approx(21.78885).epsilon(1e-6));

  CHECK_THROWS_AS(FxTDriftParams(1.5, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(FxTDriftParams(0.5, 0.1), std::invalid_argument);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xs(-10.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    const Vec x{xs(rng), xs(rng), xs(rng)};
    if (norm2(x) == 0.0) continue;
    const Vec f = fxt_drift(x, p);
    double dot = 0;
    for (int j = 0; j < 3; ++j) dot += f[j] * x[j];
    CHECK(dot > 0.0);
    const Vec xm{-x[0], -x[1], -x[2]};
    const Vec fm = fxt_drift(xm, p);
    for (int j = 0; j < 3; ++j) CHECK(fm[j] == -f[j]);
  }
}

TEST_CASE("lemma1 oracle") {
  auto r = lemma1_check(1, 1, 1, 1, 1);
  CHECK(r.lhs == 1.0);
  CHECK(r.rhs == 2.0);
  CHECK(r.holds);

  r = lemma1_check(2, 3, 1, 2, 0.5);
  CHECK(r.lhs == doctest::Approx(18.0));
  CHECK(r.rhs == doctest::Approx(4.0 + 27.0 / std::sqrt(0.5)).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(42.184).epsilon(1e-4));
  CHECK(r.holds);

  r = lemma1_check(0, 5, 2, 3, 0.1);
  CHECK(r.lhs == 0.0);
  CHECK(r.rhs == doctest::Approx(std::pow(0.1, -2.0 / 3.0) * 3125.0).epsilon(1e-12));
  CHECK(r.holds);

  CHECK_THROWS_AS(lemma1_check(-1, 1, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(lemma1_check(1, 1, 0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(lemma1_check(1, 1, 1, 1, 0), std::invalid_argument);
}

TEST_CASE("lemma2a oracle, antipodal tightness pins the constant") {
  const Vec x{1.0, 0.0};
  auto r = lemma2a_check(x, x, 0.5);
  CHECK(r.lhs == 0.0);
  CHECK(r.rhs == 0.0);
  CHECK(r.holds);

  const Vec mx{-1.0, 0.0};
  r = lemma2a_check(x, mx, 0.5);
  CHECK(r.lhs == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r.rhs == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r.holds);
  CHECK(std::abs(r.slack) < 1e-9);  // equality case

  const Vec a{1.0, 0.0}, b{0.0, 1.0};
  r = lemma2a_check(a, b, 1.0 / 3.0);
  CHECK(r.lhs == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(r.rhs == doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-12));
  CHECK(r.holds);
}

TEST_CASE("lemma2b oracle") {
  const Vec x{1.0}, y{2.0};
  auto r = lemma2b_check(x, x, -1.0);
  CHECK(r.lhs == 0.0);
  CHECK(r.holds);

  r = lemma2b_check(x, y, -1.0);
  CHECK(r.lhs == doctest::Approx(3.0));
  CHECK(r.rhs == doctest::Approx(4.0));  // K = 2
  CHECK(r.holds);

  const Vec v1{1.0, 0.0}, v2{3.0, 4.0};
  r = lemma2b_check(v1, v2, -2.0);
  // oracle: |x|x|^2 - y|y|^2| vs K|y-x|(|x|^2 + |y-x|^2), K = 1 + max(1, 2*2) = 5
  const double lhs = std::hypot(1.0 - 75.0, 0.0 - 100.0);
  const double nd = std::hypot(2.0, 4.0);
  const double rhs = 5.0 * nd * (1.0 + nd * nd);
  CHECK(r.lhs == doctest::Approx(lhs).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(rhs).epsilon(1e-12));
  CHECK(r.holds);

  // zero argument falls back to K = 1
  const Vec z0{0.0};
  r = lemma2b_check(z0, y, -1.0);
  CHECK(r.holds);
  CHECK_THROWS_AS(lemma2b_check(x, y, 0.5), std::invalid_argument);
}

TEST_CASE("jensen sum oracle") {
  const Vec s{1.0, 1.0};
  auto r = jensen_sum_check(s, 1.0);
  CHECK(r.lhs == r.rhs);
  CHECK(r.holds);

  r = jensen_sum_check(s, 2.0);
  CHECK(r.lhs == doctest::Approx(4.0));
  CHECK(r.rhs == doctest::Approx(4.0));
  CHECK(r.holds);

  const Vec s2{0.3, 0.7, 2.0};
  r = jensen_sum_check(s2, 0.5);
  CHECK(r.lhs == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(r.holds);

  CHECK_THROWS_AS(jensen_sum_check(Vec{-1.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(jensen_sum_check(s, 0.0), std::invalid_argument);
}

TEST_CASE("sandwich oracle") {
  auto r = sandwich_check(1.0, 0.9, 0.7, 1.1);
  CHECK(r.lhs == doctest::Approx(1.0));
  CHECK(r.rhs == doctest::Approx(2.0));
  CHECK(r.holds);
  CHECK(sandwich_check(0.5, 1.0, 0.7, 1.1).holds);
  CHECK(sandwich_check(10.0, 1.0, 0.7, 1.1).holds);
  CHECK_THROWS_AS(sandwich_check(1.0, 0.5, 0.7, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(sandwich_check(-1.0, 0.9, 0.7, 1.1), std::invalid_argument);
}

TEST_CASE("shifted power oracle and its region guard") {
  auto r = shifted_power_check(1.0, 0.0, 1.0);
  CHECK(r.applicable);
  CHECK(r.rhs == doctest::Approx(1.0));   // x*sg(x+u)^a
  CHECK(r.lhs == doctest::Approx(0.5));   // 2^-a |x|^(a+1)
  CHECK(r.holds);

  r = shifted_power_check(-4.0, 1.0, 0.5);
  CHECK(r.applicable);
  CHECK(r.rhs == doctest::Approx(4.0 * std::sqrt(3.0)).epsilon(1e-12));
  CHECK(r.lhs == doctest::Approx(std::pow(2.0, -0.5) * 8.0).epsilon(1e-12));
  CHECK(r.holds);

  r = shifted_power_check(1.0, 0.6, 1.0);
  CHECK_FALSE(r.applicable);
  CHECK(r.holds);  // not-applicable is not a violation

  CHECK_THROWS_AS(shifted_power_check(1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("lemma6 oracle, delta = 1 reduces to lemma1") {
  auto a = lemma6_check(1, 1, 1, 1, 1, 1);
  auto b = lemma1_check(1, 1, 1, 1, 1);
  CHECK(a.lhs == b.lhs);
  CHECK(a.rhs == b.rhs);
  CHECK(a.holds);

  CHECK(lemma6_check(2, 3, 1, 2, 4, 0.5).holds);
  auto z = lemma6_check(0, 3, 1, 2, 4, 0.5);
  CHECK(z.lhs == 0.0);
  CHECK(z.holds);
}

TEST_CASE("lemma suites hold on seeded samples") {
  const auto suites = run_lemma_suites(1234, 3000);
  CHECK(suites.size() == 7);
  for (const auto& s : suites) {
    INFO(s.lemma);
    CHECK(s.samples == 3000);
    CHECK(s.violations == 0);
    CHECK(s.min_rel_slack >= -kLemmaRelTol);
  }
  CHECK_THROWS_AS(run_lemma_suites(1, 0), std::invalid_argument);
}

TEST_CASE("lemma suites are reproducible per seed") {
  const auto a = run_lemma_suites(99, 500);
  const auto b = run_lemma_suites(99, 500);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].min_rel_slack == b[i].min_rel_slack);
  }
}
