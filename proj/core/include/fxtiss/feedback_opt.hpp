#pragma once

#include "fxtiss/certify.hpp"
#include "fxtiss/nonsmooth.hpp"
#include "fxtiss/ode.hpp"

namespace fxtiss {

/// Time-varying quadratic cost phi(xhat, z) = 1/2 xhat^T Q z + b^T z with
///   Q(t) = Q0 + diag(d1, d2),  b(t) = b0 + (d3, 0),
///   d_i(t) = amp_i * sin(freq_i * eps * eps0 * t).
/// Q(t) stays symmetric positive definite for every t.
struct QuadraticCostModel {
  double q0[2][2] = {{3.0, 2.0}, {2.0, 5.0}};
  double b0[2] = {2.0, 1.0};
  double amp[3] = {0.8, 1.8, 0.66};
  double freq[3] = {2.2, 1.7, 1.9};
};

struct CostMatrices {
  double q[2][2];
  double b[2];
};

CostMatrices cost_matrices(const QuadraticCostModel& model, double t, double eps,
                           double eps0);

/// argmin of Phi(xhat) = xhat^T Q xhat + 2 b^T xhat, i.e. -Q^-1 b by a direct
/// 2x2 solve.
Vec optimizer(const QuadraticCostModel& model, double t, double eps, double eps0);

/// Measured-gradient surrogate P(xhat, z) = 1/2 Q z + Q xhat + 2 b.
Vec phat(const QuadraticCostModel& model, const Vec& x_hat, const Vec& z, double t,
         double eps, double eps0);

/// grad Phi(xhat) = 2 Q xhat + 2 b (phat evaluated on the manifold z = 2 xhat).
Vec grad_phi(const QuadraticCostModel& model, const Vec& x_hat, double t, double eps,
             double eps0);

/// Eigenvalues of the symmetric 2x2 Q; smoothness/convexity constants of Phi
/// are L = 2*lmax, kappa = 2*lmin.
std::pair<double, double> q_eigenvalues(const CostMatrices& qm);

/// Closed loop of the gradient controller against the bundled plant
///   dz/dt    = -F_{2/5,-2/7}(z - 2 xhat)          (quasi-steady state 2 xhat)
///   dxhat/dt = -eps * F_{xi1,xi2}(P(xhat, z))
struct FeedbackOptSystem {
  QuadraticCostModel model;
  FxTDriftParams controller{1.0 / 3.0, -1.0 / 5.0};
  FxTDriftParams plant{2.0 / 5.0, -2.0 / 7.0};
  double eps = 0.05;
  double eps0 = 0.0;

  /// Plant certificate constants for W = |y|^2: the unit-norm identity
  /// F(y).y = |y|^(2-xi1) + |y|^(2-xi2) gives kappa1 = kappa2 = 2 and
  /// b1 = 1 - xi1/2, b2 = 1 - xi2/2.
  double plant_b1() const { return 1.0 - 0.5 * plant.xi1; }
  double plant_b2() const { return 1.0 - 0.5 * plant.xi2; }

  /// Exponent window of the controller: xi1 in (0, min(2-2b1, 1)) and
  /// xi2 in (2-2b2, 0). Throws when violated.
  void validate() const;
};

OdeField closed_loop_field(const FeedbackOptSystem& sys);

/// SPSystem view of the closed loop in the tau = eps*t scale with the cost
/// frozen at t = 0, shifted so the equilibrium sits at the origin:
/// x = xhat - optimizer, fast state z unshifted, h(x) = 2(x + optimizer).
SPSystem feedopt_sp_system(const FeedbackOptSystem& sys);

struct TrackingRecord {
  std::vector<double> times;
  std::vector<double> tau;          // eps * t
  std::vector<Vec> x_hat;
  std::vector<Vec> z;
  std::vector<Vec> opt;             // optimizer(theta(t))
  std::vector<double> tracking_error;  // |xhat - optimizer|
  std::vector<double> plant_error;     // |z - 2 xhat|
  IntegrationStatus status = IntegrationStatus::ok;

  /// Time-weighted mean of the tracking error over the final fraction of the
  /// horizon (the post-settling window).
  double post_settling_mean(double final_fraction = 0.5) const;
  double final_tracking_error() const;
};

struct TrackingScenarioOptions {
  double horizon = 2000.0;
  SolverOptions solver;
  TrackingScenarioOptions();
};

TrackingRecord run_tracking_scenario(double eps, double eps0, const Vec& x_hat0,
                                     const Vec& z0,
                                     const TrackingScenarioOptions& options = {});

}  // namespace fxtiss
