#include <doctest.h>

#include <cmath>
#include <random>

#include "fxtiss/nonsmooth.hpp"
#include "fxtiss/stylized.hpp"

using namespace fxtiss;

TEST_CASE("stylized parameter validation") {
  CHECK_NOTHROW(StylizedParams{}.validate());
  StylizedParams bad;
  bad.q1 = 0.5;  // q1 > r1
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.r2 = 0.9;  // r2 <= 1
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("reduced and boundary constants") {
  const auto rc = stylized_reduced_constants({});
  CHECK(rc.k1 == 1.0);
  CHECK(rc.k2 == 1.0);
  CHECK(rc.a1 == doctest::Approx(0.7));
  CHECK(rc.a2 == doctest::Approx(1.1));

  const StylizedParams p;
  const auto bc = stylized_boundary_constants(p);
  CHECK(bc.b1 == doctest::Approx((p.q1 + 1.0) / 2.0));
  CHECK(bc.b2 == doctest::Approx((p.q2 + 1.0) / 2.0));
  // kappa1 + kappa2 telescopes back to 2^-q1
  CHECK(bc.kappa1 + bc.kappa2 == doctest::Approx(std::pow(2.0, -p.q1)).epsilon(1e-14));
  CHECK(bc.kappa1 > 0.0);
  CHECK(bc.kappa2 > 0.0);
}

TEST_CASE("rho_B inverse round trip and restriction region") {
  const StylizedParams p;
  for (double v : {1e-6, 1e-2, 1.0, 50.0, 1e4}) {
    const double s = stylized_rho_b_inverse(p, v);
    CHECK(stylized_rho_b(p, s) == doctest::Approx(v).epsilon(1e-10));
  }
  CHECK(stylized_rho_b_inverse(p, 0.0) == 0.0);

  // u = 0: the region is all of y != 0.
  CHECK(stylized_boundary_restriction(p, {1e-8}, {0.0, 0.0}));
  CHECK_FALSE(stylized_boundary_restriction(p, {0.0}, {0.0, 0.0}));
  // |y| must clear both 2|u| and the rhoB branch.
  CHECK_FALSE(stylized_boundary_restriction(p, {1.0}, {1.0, 0.0}));
  CHECK(stylized_boundary_restriction(p, {10.0}, {1.0, 0.0}));
}

TEST_CASE("stylized disturbance stays within its declared sup bound") {
  const InputSignal u = stylized_disturbance();
  for (double t = 0.0; t <= 100.0; t += 0.01) {
    const Vec v = u.evaluator(t);
    CHECK(norm2(v) <= u.sup_norm_bound + 1e-12);
    CHECK(std::abs(v[0] - std::exp(std::sin(t))) < 1e-15);
  }
}

TEST_CASE("analytic interconnection constants") {
  const StylizedParams p;
  const auto b = stylized_analytic_bounds(p, 0.25);
  const double K = 2.0;  // 1 + max(1, 0.2 * 2^-0.8) = 2
  const double base = std::pow(2.0, 1.6) + 4.0 * K;
  CHECK(b.nu1 == 0.25);
  CHECK(b.omega1 == doctest::Approx(std::pow(base, 3.5) * std::pow(0.25, -2.5)));
  CHECK(b.nu2 == doctest::Approx(2.0 + std::pow(2.0, 1.2)));
  CHECK(b.omega2 == doctest::Approx(5.0 + std::pow(2.0, 2.2)));
  CHECK(b.rho1.tag == ClassKFn::Tag::zero);
  CHECK(b.rho2(2.0) == doctest::Approx(4.0));
  CHECK(b.satisfies_gain_condition(1.0));
}

TEST_CASE("validated bounds satisfy the gain condition with nu1 strictly inside") {
  const auto b = stylized_validated_bounds({});
  CHECK(b.nu1 < 0.5);
  CHECK(b.satisfies_gain_condition(1.0));
  CHECK(b.omega1 > 0.0);
  CHECK(b.omega2 > 0.0);
}

TEST_CASE("I1 chain bound holds pointwise") {
  // |I1| <= 2^(2-r1)|x||y|^r1 + 2K(|y||x|^r2 + |x||y|^r2), the two-term split
  // that the analytic omega1 is built from.
  const StylizedParams p;
  const SPSystem sys = stylized_system(p);
  const auto vc = stylized_v_certificate(p);
  const auto wc = stylized_w_certificate(p);
  const double K = 1.0 + std::max(1.0, (p.r2 - 1.0) * std::pow(2.0, p.r2 - 2.0));

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ss(-8.0, 8.0);
  for (int i = 0; i < 5000; ++i) {
    const Vec x{ss(rng)}, y{ss(rng)};
    const auto [i1, i2] = interconnection_terms(sys, vc, wc, x, y, {0.0, 0.0});
    const double ax = std::abs(x[0]), ay = std::abs(y[0]);
    const double bound = std::pow(2.0, 2.0 - p.r1) * ax * abs_pow(ay, p.r1) +
                         2.0 * K * (ay * abs_pow(ax, p.r2) + ax * abs_pow(ay, p.r2));
    CHECK(std::abs(i1) <= bound * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("boundary-layer decay chain holds on |y| > 2|u|") {
  // 2y g(x, y+h(x), u) <= -2^(1-q1)|y|^(q1+1) - 2^(1-q2)|y|^(q2+1) + 2y u1 u2,
  // the shifted-power estimate behind the certificate constants.
  const StylizedParams p;
  const SPSystem sys = stylized_system(p);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> ss(-6.0, 6.0);
  std::uniform_real_distribution<double> us(-1.5, 1.5);
  int tested = 0;
  for (int i = 0; tested < 3000 && i < 50000; ++i) {
    const double xv = ss(rng), yv = ss(rng);
    const Vec u{us(rng), us(rng)};
    if (!(std::abs(yv) > 2.0 * norm2(u))) continue;
    ++tested;
    const double g = sys.g({xv}, {yv + xv}, u)[0];
    const double lhs = 2.0 * yv * g;
    const double ay = std::abs(yv);
    const double rhs = -std::pow(2.0, 1.0 - p.q1) * abs_pow(ay, p.q1 + 1.0) -
                       std::pow(2.0, 1.0 - p.q2) * abs_pow(ay, p.q2 + 1.0) +
                       2.0 * yv * u[0] * u[1];
    CHECK(lhs <= rhs + 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
  }
  CHECK(tested == 3000);
}
