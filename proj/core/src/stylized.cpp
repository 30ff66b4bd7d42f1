#include "fxtiss/stylized.hpp"

#include <cmath>
#include <stdexcept>

#include "fxtiss/nonsmooth.hpp"

namespace fxtiss {

void StylizedParams::validate() const {
  if (!(0.0 < q1 && q1 <= r1 && r1 < 1.0)) {
    throw std::invalid_argument("StylizedParams: need 0 < q1 <= r1 < 1");
  }
  if (!(1.0 < r2 && r2 <= q2)) {
    throw std::invalid_argument("StylizedParams: need 1 < r2 <= q2");
  }
}

SPSystem stylized_system(const StylizedParams& params) {
  params.validate();
  SPSystem sys;
  sys.n = 1;
  sys.m = 1;
  sys.p = 2;
  sys.z_star = {0.0};
  const double r1 = params.r1, r2 = params.r2, q1 = params.q1, q2 = params.q2;
  sys.f = [r1, r2](const Vec&, const Vec& z, const Vec& u) {
    return Vec{-signed_power(z[0], r1) - signed_power(z[0], r2) + u[0]};
  };
  sys.g = [q1, q2](const Vec& x, const Vec& z, const Vec& u) {
    return Vec{-signed_power(z[0] - x[0] - u[0], q1) -
               signed_power(z[0] - x[0] - u[1], q2) + u[0] * u[1]};
  };
  sys.h = [](const Vec& x) { return Vec{x[0]}; };
  sys.h_jacobian = [](const Vec&) {
    Mat j(1, 1);
    j(0, 0) = 1.0;
    return j;
  };
  return sys;
}

InputSignal stylized_disturbance() {
  InputSignal u;
  u.evaluator = [](double t) {
    return Vec{std::exp(std::sin(t)), std::sin(19.0 * std::log(t + 1.0)) - 0.21};
  };
  // |u1| <= e, |u2| <= 1.21
  u.sup_norm_bound = std::sqrt(std::exp(2.0) + 1.21 * 1.21);
  return u;
}

StylizedReducedConstants stylized_reduced_constants(const StylizedParams& p) {
  p.validate();
  StylizedReducedConstants c;
  c.a1 = 0.5 * (p.r1 + 1.0);
  c.a2 = 0.5 * (p.r2 + 1.0);
  return c;
}

StylizedBoundaryConstants stylized_boundary_constants(const StylizedParams& p) {
  p.validate();
  StylizedBoundaryConstants c;
  c.kappa2 = std::pow(2.0, -1.0 - p.q2);
  c.kappa1 = std::pow(2.0, -p.q1) - c.kappa2;
  c.b1 = 0.5 * (p.q1 + 1.0);
  c.b2 = 0.5 * (p.q2 + 1.0);
  return c;
}

double stylized_rho_b(const StylizedParams& p, double s) {
  const auto c = stylized_boundary_constants(p);
  return c.kappa1 * abs_pow(s, p.q1 + 1.0) + c.kappa2 * abs_pow(s, p.q2 + 1.0);
}

double stylized_rho_b_inverse(const StylizedParams& p, double v) {
  if (v <= 0.0) return 0.0;
  double hi = 1.0;
  while (stylized_rho_b(p, hi) < v) {
    hi *= 2.0;
    if (hi > 1e150) throw std::runtime_error("stylized_rho_b_inverse: bracket overflow");
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (stylized_rho_b(p, mid) < v ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool stylized_boundary_restriction(const StylizedParams& p, const Vec& y, const Vec& u) {
  const double un = norm2(u);
  const double thresh =
      std::max(stylized_rho_b_inverse(p, std::pow(2.0, p.q2) * std::pow(un, 4.0)),
               2.0 * un);
  return norm2(y) > thresh;
}

FxTCertificate stylized_v_certificate(const StylizedParams& p) {
  const auto c = stylized_reduced_constants(p);
  return FxTCertificate::quadratic(c.k1, c.k2, c.a1, c.a2, ClassKFn::power(1.0, 2.0));
}

BoundaryLayerCertificate stylized_w_certificate(const StylizedParams& p) {
  const auto c = stylized_boundary_constants(p);
  return BoundaryLayerCertificate::quadratic(c.kappa1, c.kappa2, c.b1, c.b2,
                                             ClassKFn::zero());
}

InterconnectionBounds stylized_analytic_bounds(const StylizedParams& p, double c) {
  p.validate();
  if (!(c > 0.0)) throw std::invalid_argument("stylized_analytic_bounds: c must be positive");
  const double K = 1.0 + std::max(1.0, (p.r2 - 1.0) * std::pow(2.0, p.r2 - 2.0));
  const double sigma1 = std::max(1.0 / p.r1, p.r2);
  const double base = std::pow(2.0, 2.0 - p.r1) + 4.0 * K;
  InterconnectionBounds b;
  b.nu1 = c;
  b.omega1 = std::pow(base, 1.0 + sigma1) * std::pow(c, -sigma1);
  b.nu2 = 2.0 + std::pow(2.0, p.r2);
  b.omega2 = 5.0 + std::pow(2.0, p.r2 + 1.0);
  b.rho1 = ClassKFn::zero();  // the u1 terms of f cancel inside I1
  b.rho2 = ClassKFn::power(1.0, 2.0);
  return b;
}

InterconnectionBounds stylized_validated_bounds(const StylizedParams& p) {
  InterconnectionBounds b = stylized_analytic_bounds(p, 0.25);
  // Calibrated sups over x, y in [-5,5], u in [-2,2]^2 (2e6-point scan plus a
  // log-spaced grid down to 1e-4 scales):
  //   sup (I1 - 0.25 Vt^2)/Wt^2  ~= 1.325  (near x=-0.004, y=+0.004)
  //   sup (I2 - nu2 Vt^2 - |u|^2)/Wt^2 ~= 1.311  (near x=-0.17, y=-2.4, u1=2)
  b.omega1 = 1.5;
  b.omega2 = 2.0;
  return b;
}

}  // namespace fxtiss
