#include "fxtiss/feedback_opt.hpp"

#include <cmath>
#include <stdexcept>

namespace fxtiss {

CostMatrices cost_matrices(const QuadraticCostModel& model, double t, double eps,
                           double eps0) {
  if (!(eps > 0.0)) throw std::invalid_argument("cost_matrices: eps must be positive");
  if (!(eps0 >= 0.0)) throw std::invalid_argument("cost_matrices: eps0 must be nonnegative");
  const double w = eps * eps0 * t;
  const double d1 = model.amp[0] * std::sin(model.freq[0] * w);
  const double d2 = model.amp[1] * std::sin(model.freq[1] * w);
  const double d3 = model.amp[2] * std::sin(model.freq[2] * w);
  CostMatrices out;
  out.q[0][0] = model.q0[0][0] + d1;
  out.q[0][1] = model.q0[0][1];
  out.q[1][0] = model.q0[1][0];
  out.q[1][1] = model.q0[1][1] + d2;
  out.b[0] = model.b0[0] + d3;
  out.b[1] = model.b0[1];
  return out;
}

Vec optimizer(const QuadraticCostModel& model, double t, double eps, double eps0) {
  const CostMatrices m = cost_matrices(model, t, eps, eps0);
  const double det = m.q[0][0] * m.q[1][1] - m.q[0][1] * m.q[1][0];
  if (!(det > 0.0)) throw std::runtime_error("optimizer: cost matrix not positive definite");
  return Vec{-(m.q[1][1] * m.b[0] - m.q[0][1] * m.b[1]) / det,
             -(-m.q[1][0] * m.b[0] + m.q[0][0] * m.b[1]) / det};
}

Vec phat(const QuadraticCostModel& model, const Vec& x_hat, const Vec& z, double t,
         double eps, double eps0) {
  const CostMatrices m = cost_matrices(model, t, eps, eps0);
  Vec out(2);
  for (int i = 0; i < 2; ++i) {
    out[i] = 0.5 * (m.q[i][0] * z[0] + m.q[i][1] * z[1]) +
             (m.q[i][0] * x_hat[0] + m.q[i][1] * x_hat[1]) + 2.0 * m.b[i];
  }
  return out;
}

Vec grad_phi(const QuadraticCostModel& model, const Vec& x_hat, double t, double eps,
             double eps0) {
  const CostMatrices m = cost_matrices(model, t, eps, eps0);
  Vec out(2);
  for (int i = 0; i < 2; ++i) {
    out[i] = 2.0 * (m.q[i][0] * x_hat[0] + m.q[i][1] * x_hat[1]) + 2.0 * m.b[i];
  }
  return out;
}

std::pair<double, double> q_eigenvalues(const CostMatrices& qm) {
  const double tr = qm.q[0][0] + qm.q[1][1];
  const double det = qm.q[0][0] * qm.q[1][1] - qm.q[0][1] * qm.q[1][0];
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  return {0.5 * tr - disc, 0.5 * tr + disc};
}

void FeedbackOptSystem::validate() const {
  if (!(eps > 0.0)) throw std::invalid_argument("FeedbackOptSystem: eps must be positive");
  if (!(eps0 >= 0.0)) throw std::invalid_argument("FeedbackOptSystem: eps0 must be nonnegative");
  const double b1 = plant_b1();
  const double b2 = plant_b2();
  if (!(controller.xi1 < std::min(2.0 - 2.0 * b1, 1.0))) {
    throw std::invalid_argument("FeedbackOptSystem: xi1 outside (0, min(2-2b1, 1))");
  }
  if (!(controller.xi2 > 2.0 - 2.0 * b2)) {
    throw std::invalid_argument("FeedbackOptSystem: xi2 outside (2-2b2, 0)");
  }
}

OdeField closed_loop_field(const FeedbackOptSystem& sys) {
  sys.validate();
  OdeField f;
  f.dim = 4;  // (xhat1, xhat2, z1, z2)
  f.input_dim = 0;
  f.rhs = [sys](double t, const Vec& s, const Vec&, Vec& ds) {
    const Vec x_hat{s[0], s[1]};
    const Vec z{s[2], s[3]};
    const Vec w{z[0] - 2.0 * x_hat[0], z[1] - 2.0 * x_hat[1]};
    const Vec dz = fxt_drift(w, sys.plant);
    const Vec p = phat(sys.model, x_hat, z, t, sys.eps, sys.eps0);
    const Vec dx = fxt_drift(p, sys.controller);
    ds.resize(4);
    ds[0] = -sys.eps * dx[0];
    ds[1] = -sys.eps * dx[1];
    ds[2] = -dz[0];
    ds[3] = -dz[1];
  };
  return f;
}

SPSystem feedopt_sp_system(const FeedbackOptSystem& sys) {
  sys.validate();
  SPSystem sp;
  sp.n = 2;
  sp.m = 2;
  sp.p = 2;
  const Vec xs = optimizer(sys.model, 0.0, sys.eps, sys.eps0);
  sp.z_star = {2.0 * xs[0], 2.0 * xs[1]};
  sp.f = [sys, xs](const Vec& x, const Vec& z, const Vec&) {
    const Vec x_hat{x[0] + xs[0], x[1] + xs[1]};
    const Vec p = phat(sys.model, x_hat, z, 0.0, sys.eps, sys.eps0);
    Vec d = fxt_drift(p, sys.controller);
    for (auto& v : d) v = -v;
    return d;
  };
  sp.g = [sys, xs](const Vec& x, const Vec& z, const Vec&) {
    const Vec w{z[0] - 2.0 * (x[0] + xs[0]), z[1] - 2.0 * (x[1] + xs[1])};
    Vec d = fxt_drift(w, sys.plant);
    for (auto& v : d) v = -v;
    return d;
  };
  sp.h = [xs](const Vec& x) { return Vec{2.0 * (x[0] + xs[0]), 2.0 * (x[1] + xs[1])}; };
  sp.h_jacobian = [](const Vec&) {
    Mat j(2, 2);
    j(0, 0) = j(1, 1) = 2.0;
    return j;
  };
  return sp;
}

double TrackingRecord::post_settling_mean(double final_fraction) const {
  if (times.size() < 2) return tracking_error.empty() ? 0.0 : tracking_error.back();
  const double t0 = times.front(), t1 = times.back();
  const double t_start = t1 - final_fraction * (t1 - t0);
  double area = 0.0, span = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double a = std::max(times[i - 1], t_start);
    const double b = times[i];
    if (b <= a) continue;
    area += 0.5 * (tracking_error[i - 1] + tracking_error[i]) * (b - a);
    span += b - a;
  }
  return span > 0.0 ? area / span : tracking_error.back();
}

double TrackingRecord::final_tracking_error() const {
  return tracking_error.empty() ? 0.0 : tracking_error.back();
}

TrackingScenarioOptions::TrackingScenarioOptions() {
  solver.rel_tol = 1e-8;
  solver.abs_tol = 1e-10;
  // The plant settles onto z = 2 xhat exactly; past that point its sublinear
  // drift would pin the step size if held to the slow components' floor.
  solver.component_abs_tol = {1e-9, 1e-9, 1e-7, 1e-7};
  solver.h_max = 1.0;
  solver.record_stride = 8;
}

TrackingRecord run_tracking_scenario(double eps, double eps0, const Vec& x_hat0,
                                     const Vec& z0,
                                     const TrackingScenarioOptions& options) {
  if (!(options.horizon > 0.0)) {
    throw std::invalid_argument("run_tracking_scenario: horizon must be positive");
  }
  FeedbackOptSystem sys;
  sys.eps = eps;
  sys.eps0 = eps0;
  sys.validate();

  const OdeField field = closed_loop_field(sys);
  const Vec s0{x_hat0[0], x_hat0[1], z0[0], z0[1]};
  IntegrationResult res = integrate(field, s0, InputSignal::zero(0), 0.0,
                                    options.horizon, options.solver);

  TrackingRecord rec;
  rec.status = res.status;
  const Trajectory& tr = res.trajectory;
  rec.times = tr.times;
  rec.tau.reserve(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.times[i];
    const Vec& s = tr.states[i];
    const Vec xh{s[0], s[1]};
    const Vec zz{s[2], s[3]};
    const Vec op = optimizer(sys.model, t, eps, eps0);
    rec.tau.push_back(eps * t);
    rec.x_hat.push_back(xh);
    rec.z.push_back(zz);
    rec.opt.push_back(op);
    rec.tracking_error.push_back(
        std::hypot(xh[0] - op[0], xh[1] - op[1]));
    rec.plant_error.push_back(
        std::hypot(zz[0] - 2.0 * xh[0], zz[1] - 2.0 * xh[1]));
  }
  return rec;
}

}  // namespace fxtiss
