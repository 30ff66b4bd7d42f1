#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fxtiss/ode.hpp"

namespace fxtiss {

/// Class-K / class-K-infinity scalar gain. `zero()` builds the identically
/// zero gain used when an inequality carries no input term.
struct ClassKFn {
  enum class Tag { class_k, class_k_inf, zero };

  std::function<double(double)> evaluator;
  Tag tag = Tag::class_k_inf;

  double operator()(double s) const { return evaluator(s); }

  static ClassKFn zero();
  static ClassKFn power(double coeff, double exponent);  // coeff * s^exponent
};

/// Sampled structural check: evaluator(0) = 0, strictly increasing on a grid,
/// and (for class-K-infinity) unbounded in the sense evaluator(1e6) >
/// 10*evaluator(1).
bool check_class_k(const ClassKFn& fn, double hi = 1e3, std::size_t n = 256);

/// Fixed-time ISS Lyapunov certificate for a field on a single state block:
///   alpha_lo(|x|) <= V(x) <= alpha_hi(|x|)
///   grad V . field <= -k1 V^a1 - k2 V^a2 + rho(|u|)
struct FxTCertificate {
  std::function<double(const Vec&)> V;
  std::function<Vec(const Vec&)> grad;
  ClassKFn alpha_lo;
  ClassKFn alpha_hi;
  double k1 = 1.0;  // > 0
  double k2 = 1.0;  // > 0
  double a1 = 0.5;  // in (0,1)
  double a2 = 1.5;  // > 1
  ClassKFn rho = ClassKFn::zero();

  void validate() const;
  double k_lower() const { return k1 < k2 ? k1 : k2; }

  /// V(x) = |x|^2 with its analytic gradient and exact sandwich bounds.
  static FxTCertificate quadratic(double k1, double k2, double a1, double a2,
                                  ClassKFn rho);
};

/// Boundary-layer certificate W(x, y) (sandwiched in |y|), with the two
/// partial gradients needed by the interconnection terms:
///   dW/dy . g(x, y+h(x), u) <= -kappa1 W^b1 - kappa2 W^b2 + rho_B(|u|)
struct BoundaryLayerCertificate {
  std::function<double(const Vec& x, const Vec& y)> W;
  std::function<Vec(const Vec& x, const Vec& y)> grad_x;  // size n
  std::function<Vec(const Vec& x, const Vec& y)> grad_y;  // size m
  ClassKFn alpha_lo;
  ClassKFn alpha_hi;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double b1 = 0.5;
  double b2 = 1.5;
  ClassKFn rho = ClassKFn::zero();

  void validate() const;
  double kappa_lower() const { return kappa1 < kappa2 ? kappa1 : kappa2; }

  /// W(y) = |y|^2, independent of x.
  static BoundaryLayerCertificate quadratic(double kappa1, double kappa2, double b1,
                                            double b2, ClassKFn rho);
};

/// Constants of the interconnection conditions
///   I1 <= nu1*Vt^2 + omega1*Wt^2 + rho1(|u|)
///   I2 <= nu2*Vt^2 + omega2*Wt^2 + rho2(|u|)
/// with the composability requirement nu1 < k_lower/2 or nu2 < 0.
struct InterconnectionBounds {
  double nu1 = 0.0;
  double nu2 = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  ClassKFn rho1 = ClassKFn::zero();
  ClassKFn rho2 = ClassKFn::zero();

  bool satisfies_gain_condition(double k_lower) const {
    return nu1 < 0.5 * k_lower || nu2 < 0.0;
  }
};

/// Axis-aligned sampling region.
struct Box {
  Vec lo;
  Vec hi;

  std::size_t dim() const { return lo.size(); }
  void validate() const;
  static Box centered(double half_width, std::size_t dim);
};

struct Violation {
  std::size_t sample_index = 0;
  Vec state;   // stacked sample point (layout depends on the check)
  Vec input;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string which;  // "V", "W", "I1", "I2"
};

/// Sampling-based verification report. `max_violation` is the largest
/// relative excess (lhs-rhs)/max(1,|lhs|,|rhs|) over all samples, so
/// violations is empty iff max_violation <= tol. Samples within tol of
/// equality count as tight, not violated.
struct CheckReport {
  std::size_t samples_tested = 0;
  std::vector<Violation> violations;
  std::size_t tight_count = 0;
  double max_violation = 0.0;
  std::uint64_t seed = 0;

  bool passed() const { return violations.empty(); }
  void merge(CheckReport&& other);
};

inline constexpr double kCheckRelTol = 1e-9;

/// Deterministic sampler over a box: a Halton low-discrepancy sequence with
/// every tenth draw replaced by a seeded uniform sample (counter-hashed, so
/// the sequence is independent of how samples are partitioned over workers).
class BoxSampler {
 public:
  BoxSampler(Box box, std::uint64_t seed);
  Vec at(std::size_t index) const;
  const Box& box() const { return box_; }

 private:
  Box box_;
  std::uint64_t seed_;
};

/// Verifies grad V . field(x, u) <= -k1 V^a1 - k2 V^a2 + rho(|u|) + tol on
/// sampled (x, u). Points with |x| below 1e-12 skip the gradient-based check.
CheckReport check_fxt_certificate(
    const FxTCertificate& cert,
    const std::function<Vec(const Vec& state, const Vec& u)>& field,
    const Box& region, const Box& u_region, std::size_t n_samples,
    double tol = kCheckRelTol, std::uint64_t seed = 0, unsigned jobs = 1);

/// Same check for the boundary layer: x frozen per sample,
/// dW/dy . g(x, y+h(x), u), with samples filtered by `restriction`.
CheckReport check_boundary_layer_certificate(
    const BoundaryLayerCertificate& cert, const SPSystem& sys,
    const Box& x_frozen_region, const Box& y_region, const Box& u_region,
    const std::function<bool(const Vec& y, const Vec& u)>& restriction,
    std::size_t n_samples, double tol = kCheckRelTol, std::uint64_t seed = 0,
    unsigned jobs = 1);

/// Interconnection terms of the composite Lie derivative:
///   I1 = grad V . (f(x, y+h(x), u) - f(x, h(x), u))
///   I2 = (dW/dx - dW/dy Jh(x)) . f(x, y+h(x), u)
std::pair<double, double> interconnection_terms(const SPSystem& sys,
                                                const FxTCertificate& v_cert,
                                                const BoundaryLayerCertificate& w_cert,
                                                const Vec& x, const Vec& y,
                                                const Vec& u);

/// Vt(x) = V^(a1/2) + V^(a2/2), Wt(x,y) = W^(b1/2) + W^(b2/2).
double v_tilde(const FxTCertificate& cert, const Vec& x);
double w_tilde(const BoundaryLayerCertificate& cert, const Vec& x, const Vec& y);

/// Verifies both interconnection inequalities on sampled (x, y, u).
CheckReport check_interconnection_bounds(
    const SPSystem& sys, const FxTCertificate& v_cert,
    const BoundaryLayerCertificate& w_cert, const InterconnectionBounds& bounds,
    const Box& x_region, const Box& y_region, const Box& u_region,
    std::size_t n_samples, double tol = kCheckRelTol, std::uint64_t seed = 0,
    unsigned jobs = 1);

/// Thrown by build_composite when no admissible weight exists; names the
/// violated condition.
class composite_construction_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Derived composite certificate: weight, margins, time-scale bound and the
/// settling-time bound of the composite function.
struct CompositeCertificate {
  double zeta_star = 0.0;   // in (0,1)
  double nu_star = 0.0;     // > 0
  double gamma1 = 0.0;      // max(a1, b1)
  double gamma2 = 0.0;      // min(a2, b2)
  double eps_star = 0.0;    // > 0 (or the cap when unbounded above)
  bool eps_star_capped = false;
  double k1_eff = 0.0;      // nu_star/2
  double k2_eff = 0.0;      // (nu_star/2) * 2^(1-gamma2)
  double t_bound = 0.0;     // 1/(k1_eff(1-gamma1)) + 1/(k2_eff(gamma2-1))

  double nu_of(double zeta, double k_lower, const InterconnectionBounds& b) const;
};

struct CompositeOptions {
  double zeta_grid_resolution = 1e-3;
  double eps_cap = 1.0;  // reported eps_star when unbounded above
};

/// Grid search for the composite weight: zeta* maximizes
///   nu(zeta) = zeta (k_lower/2 - nu1) - (1-zeta) nu2
/// subject to nu(zeta) > 0, then the largest admissible time-scale separation
///   eps* = (1-zeta*) kappa_lower / (2 (nu* + zeta* omega1 + (1-zeta*) omega2))
/// from the closed form of omega_eps(zeta*) > nu*.
CompositeCertificate build_composite(const FxTCertificate& v_cert,
                                     const BoundaryLayerCertificate& w_cert,
                                     const InterconnectionBounds& bounds,
                                     const CompositeOptions& options = {});

/// zeta V(x) + (1-zeta) W(x, y).
double composite_value(const FxTCertificate& v_cert,
                       const BoundaryLayerCertificate& w_cert, double zeta,
                       const Vec& x, const Vec& y);

/// 1/(k1 (1-a1)) + 1/(k2 (a2-1)).
double settling_time_bound(double k1, double a1, double k2, double a2);

/// The implication-form gain chi = chi_tilde^-1 o rho with
/// chi_tilde(s) = eps_tilde (alpha_lo(s)^a1 + alpha_lo(s)^a2); the inverse is
/// computed by bisection on an expanding bracket.
ClassKFn implication_form_gain(const FxTCertificate& cert, double eps_tilde);

/// Empirical GKL envelope of an ensemble: varrho is the worst post-settling
/// sup-norm (final quarter of each run), and each bucket row holds the
/// pointwise max of (|s(t)| - varrho)+ over trajectories with similar |s0|.
struct GklEnvelope {
  double varrho_estimate = 0.0;
  std::vector<double> grid;  // common evaluation times
  struct Row {
    double r_lo = 0.0;
    double r_hi = 0.0;
    std::size_t count = 0;
    std::vector<double> beta;
  };
  std::vector<Row> rows;
};

GklEnvelope estimate_gkl_envelope(const std::vector<Trajectory>& ensemble,
                                  double u_sup);

}  // namespace fxtiss
