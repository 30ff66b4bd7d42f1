#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fxtiss {

using Vec = std::vector<double>;

/// Tiny dense row-major matrix, large enough for the Jacobians that show up
/// here (dimensions are single digits).
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  Vec mul(const Vec& v) const;
};

double norm2(const Vec& v);

/// Singularly perturbed system
///   dx/dt = f(x, z, u),   eps * dz/dt = g(x, z, u)
/// with quasi-steady-state map h (g(x, h(x), 0) = 0) and its Jacobian.
struct SPSystem {
  std::size_t n = 0;  // slow dimension
  std::size_t m = 0;  // fast dimension
  std::size_t p = 0;  // input dimension
  std::function<Vec(const Vec& x, const Vec& z, const Vec& u)> f;
  std::function<Vec(const Vec& x, const Vec& z, const Vec& u)> g;
  std::function<Vec(const Vec& x)> h;
  std::function<Mat(const Vec& x)> h_jacobian;  // m x n
  Vec z_star;  // fast state paired with x = 0 at the declared equilibrium
};

/// Sampled sanity checks of the SPSystem invariants: the quasi-steady-state
/// residual |g(x, h(x), 0)| <= tol*(1+|x|) on random x, and vanishing fields
/// at the declared equilibrium.
struct SPSystemCheck {
  bool qss_ok = true;
  bool equilibrium_ok = true;
  double max_qss_residual = 0.0;  // of |g|/(1+|x|)
  double equilibrium_residual = 0.0;
};
SPSystemCheck check_sp_system(const SPSystem& sys, double x_box, std::size_t samples,
                              std::uint64_t seed, double qss_tol = 1e-9,
                              double eq_tol = 1e-12);

/// Exogenous input u(t) together with its declared sup-norm bound.
struct InputSignal {
  std::function<Vec(double t)> evaluator;
  double sup_norm_bound = 0.0;
  static InputSignal zero(std::size_t p);
};

struct SolverOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double h_init = 1e-6;
  double h_min = 1e-12;
  double h_max = 1.0;
  std::size_t max_steps = 200'000'000;
  // Per-component absolute error floors; empty means uniform abs_tol. The
  // 1/eps-scaled components of a two-time-scale field need a looser floor:
  // their sublinear drift parks the exact solution on the quasi-steady
  // manifold, where any explicit step hops across it by an amount that the
  // controller must be allowed to tolerate.
  Vec component_abs_tol;
  std::size_t record_stride = 1;

  void validate(std::size_t dim) const;
};

enum class Frame { original, error };

/// Time-stamped states of one run. Accepted steps are recorded (subject to
/// record_stride); dense evaluation interpolates them with a monotone cubic.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> inputs;
  Frame coordinate_frame = Frame::original;
  std::vector<std::string> state_names;
  std::vector<std::string> input_names;

  std::size_t size() const { return times.size(); }
  Vec sample(double t) const;
  double state_norm(std::size_t i) const;
  double max_state_norm() const;
};

/// Right-hand side dstate = rhs(t, state, u). `recommended_h_max` carries the
/// eps/2 cap for fields with a 1/eps-scaled component.
struct OdeField {
  std::function<void(double t, const Vec& state, const Vec& u, Vec& dstate)> rhs;
  std::size_t dim = 0;
  std::size_t input_dim = 0;
  double recommended_h_max = std::numeric_limits<double>::infinity();
};

enum class IntegrationStatus { ok, step_underflow, max_steps_exceeded };

struct IntegrationResult {
  Trajectory trajectory;  // partial on failure
  IntegrationStatus status = IntegrationStatus::ok;
  std::string message;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  bool ok() const { return status == IntegrationStatus::ok; }
};

/// Adaptive embedded explicit Runge-Kutta pair of orders 4/5 (Dormand-Prince
/// coefficients, local extrapolation, FSAL). A step is accepted when the
/// embedded error estimate passes max(abs floor, rel_tol*|state|) and the
/// state moves by no more than 0.5*|state| + abs floor, which keeps the
/// sublinear drifts from overshooting back and forth across the origin.
IntegrationResult integrate(const OdeField& field, const Vec& state0,
                            const InputSignal& u, double t0, double t1,
                            const SolverOptions& opts);

/// First recorded time t* with |state(t)| <= radius for all recorded t >= t*.
std::optional<double> settling_time(const Trajectory& traj, double radius);

/// Reduced system (x, u) -> f(x, h(x), u).
OdeField reduced_field(const SPSystem& sys);

/// Boundary layer system in stretched time, x frozen: (y, u) -> g(x, y+h(x), u).
OdeField boundary_layer_field(const SPSystem& sys, const Vec& x_frozen);

/// Error dynamics on stacked (x, y):
///   dx/dt = f(x, y+h(x), u)
///   dy/dt = (1/eps) g(x, y+h(x), u) - Jh(x) f(x, y+h(x), u)
OdeField error_dynamics_field(const SPSystem& sys, double eps);

/// Original dynamics on stacked (x, z): dx/dt = f, dz/dt = (1/eps) g.
OdeField original_dynamics_field(const SPSystem& sys, double eps);

/// y = z - h(x) and its inverse.
std::pair<Vec, Vec> to_error_coords(const SPSystem& sys, const Vec& x, const Vec& z);
std::pair<Vec, Vec> from_error_coords(const SPSystem& sys, const Vec& x, const Vec& y);

}  // namespace fxtiss
