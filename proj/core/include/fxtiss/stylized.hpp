#pragma once

#include "fxtiss/certify.hpp"
#include "fxtiss/ode.hpp"

namespace fxtiss {

/// Exponents of the stylized scalar interconnection
///   dx/dt       = -sg(z)^r1 - sg(z)^r2 + u1
///   eps*dz/dt   = -sg(z-x-u1)^q1 - sg(z-x-u2)^q2 + u1*u2
/// where sg(s)^q = |s|^q sign(s). Quasi-steady state h(x) = x.
struct StylizedParams {
  double r1 = 2.0 / 5.0;
  double r2 = 6.0 / 5.0;
  double q1 = 1.0 / 3.0;
  double q2 = 9.0 / 7.0;

  void validate() const;  // 0 < q1 <= r1 < 1 < r2 <= q2
};

SPSystem stylized_system(const StylizedParams& params = {});

/// Bundled disturbance u1(t) = e^{sin t}, u2(t) = sin(19 log(t+1)) - 0.21.
InputSignal stylized_disturbance();

/// Reduced-system certificate exponents: V = x^2 decays with
/// k1 = k2 = 1 and exponents (r1+1)/2, (r2+1)/2 against rho(s) = s^2.
struct StylizedReducedConstants {
  double k1 = 1.0;
  double k2 = 1.0;
  double a1 = 0.0;  // (r1+1)/2
  double a2 = 0.0;  // (r2+1)/2
};
StylizedReducedConstants stylized_reduced_constants(const StylizedParams& p = {});

/// Boundary-layer certificate constants for W = y^2:
///   kappa1 = 2^-q1 - 2^-(1+q2), kappa2 = 2^-(1+q2), exponents (qi+1)/2,
/// valid on |y| > max{rhoB^-1(2^q2 |u|^4), 2|u|}.
struct StylizedBoundaryConstants {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double b1 = 0.0;  // (q1+1)/2
  double b2 = 0.0;  // (q2+1)/2
};
StylizedBoundaryConstants stylized_boundary_constants(const StylizedParams& p = {});

/// rhoB(s) = kappa1 s^(q1+1) + kappa2 s^(q2+1), and its inverse by bisection.
double stylized_rho_b(const StylizedParams& p, double s);
double stylized_rho_b_inverse(const StylizedParams& p, double v);

/// The conditional validity region of the boundary-layer certificate:
/// |y| > max{rhoB^-1(2^q2 |u|^4), 2|u|}.
bool stylized_boundary_restriction(const StylizedParams& p, const Vec& y, const Vec& u);

/// V = x^2 certificate of the reduced system (gains/exponents from
/// stylized_reduced_constants, rho(s) = s^2).
FxTCertificate stylized_v_certificate(const StylizedParams& p = {});

/// W = y^2 certificate of the boundary layer (stylized_boundary_constants,
/// rho_B = 0; valid on the restricted region above).
BoundaryLayerCertificate stylized_w_certificate(const StylizedParams& p = {});

/// Interconnection constants derived analytically:
///   nu2 = 2 + 2^r2, omega2 = 5 + 2^(r2+1), rho2(s) = s^2, and for I1 the
///   family nu1 = c, omega1 = (2^(2-r1) + 4K)^(1+sigma1) c^-sigma1 with
///   K = 1 + max{1, (r2-1) 2^(r2-2)}, sigma1 = max{1/r1, r2}. `c` must lie in
///   (0, k_lower/2) for composability.
InterconnectionBounds stylized_analytic_bounds(const StylizedParams& p = {},
                                               double c = 0.25);

/// Sampling-calibrated bounds used by the composite pipeline and the CLI:
/// the analytic omegas are heavily conservative (sandwich-estimate chains),
/// which would drive eps* far below anything simulable; these constants hold
/// with margin on the +-5 state boxes and +-2 input box but fail when omega2
/// is halved, making the negative control meaningful.
InterconnectionBounds stylized_validated_bounds(const StylizedParams& p = {});

}  // namespace fxtiss
