#include "fxtiss/ode.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fxtiss {

Vec Mat::mul(const Vec& v) const {
  Vec out(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < cols; ++j) s += (*this)(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

double norm2(const Vec& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

SPSystemCheck check_sp_system(const SPSystem& sys, double x_box, std::size_t samples,
                              std::uint64_t seed, double qss_tol, double eq_tol) {
  SPSystemCheck out;
  const Vec u0(sys.p, 0.0);
  const Vec x0(sys.n, 0.0);
  const Vec feq = sys.f(x0, sys.z_star, u0);
  const Vec geq = sys.g(x0, sys.z_star, u0);
  out.equilibrium_residual = std::max(norm2(feq), norm2(geq));
  out.equilibrium_ok = out.equilibrium_residual <= eq_tol;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-x_box, x_box);
  for (std::size_t k = 0; k < samples; ++k) {
    Vec x(sys.n);
    for (auto& xi : x) xi = dist(rng);
    const Vec r = sys.g(x, sys.h(x), u0);
    const double rel = norm2(r) / (1.0 + norm2(x));
    out.max_qss_residual = std::max(out.max_qss_residual, rel);
  }
  out.qss_ok = out.max_qss_residual <= qss_tol;
  return out;
}

InputSignal InputSignal::zero(std::size_t p) {
  InputSignal s;
  s.evaluator = [p](double) { return Vec(p, 0.0); };
  s.sup_norm_bound = 0.0;
  return s;
}

void SolverOptions::validate(std::size_t dim) const {
  if (!(rel_tol > 0.0 && abs_tol > 0.0)) {
    throw std::invalid_argument("SolverOptions: tolerances must be positive");
  }
  if (!(h_min <= h_init && h_init <= h_max && h_min > 0.0)) {
    throw std::invalid_argument("SolverOptions: need 0 < h_min <= h_init <= h_max");
  }
  if (max_steps == 0) {
    throw std::invalid_argument("SolverOptions: max_steps must be positive");
  }
  if (!component_abs_tol.empty() && component_abs_tol.size() != dim) {
    throw std::invalid_argument("SolverOptions: component_abs_tol dimension mismatch");
  }
  if (record_stride == 0) {
    throw std::invalid_argument("SolverOptions: record_stride must be positive");
  }
}

double Trajectory::state_norm(std::size_t i) const { return norm2(states[i]); }

double Trajectory::max_state_norm() const {
  double mx = 0;
  for (const auto& s : states) mx = std::max(mx, norm2(s));
  return mx;
}

namespace {

// Fritsch-Carlson monotone slope at a knot from the two adjacent secants.
double monotone_slope(double s_left, double s_right) {
  if (s_left * s_right <= 0.0) return 0.0;
  // Harmonic mean preserves monotonicity of the data.
  return 2.0 * s_left * s_right / (s_left + s_right);
}

}  // namespace

Vec Trajectory::sample(double t) const {
  if (times.empty()) throw std::runtime_error("Trajectory::sample: empty trajectory");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
  const double t0 = times[k], t1 = times[k + 1];
  const double dt = t1 - t0;
  const double w = (t - t0) / dt;
  const std::size_t dim = states[k].size();
  Vec out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double y0 = states[k][i], y1 = states[k + 1][i];
    const double sec = (y1 - y0) / dt;
    const double sec_prev = (k > 0) ? (y0 - states[k - 1][i]) / (t0 - times[k - 1]) : sec;
    const double sec_next =
        (k + 2 < times.size()) ? (states[k + 2][i] - y1) / (times[k + 2] - t1) : sec;
    const double d0 = (k > 0) ? monotone_slope(sec_prev, sec) : sec;
    const double d1 = (k + 2 < times.size()) ? monotone_slope(sec, sec_next) : sec;
    const double h00 = (1 + 2 * w) * (1 - w) * (1 - w);
    const double h10 = w * (1 - w) * (1 - w);
    const double h01 = w * w * (3 - 2 * w);
    const double h11 = w * w * (w - 1);
    out[i] = h00 * y0 + h10 * dt * d0 + h01 * y1 + h11 * dt * d1;
  }
  return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// 5th-order weights coincide with the last A row (FSAL).
constexpr double kB5[7] = {35.0 / 384,     0.0,  500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,  0.0,           7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

bool all_finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

IntegrationResult integrate(const OdeField& field, const Vec& state0,
                            const InputSignal& u, double t0, double t1,
                            const SolverOptions& opts) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate: need t1 > t0");
  if (state0.size() != field.dim) {
    throw std::invalid_argument("integrate: state dimension mismatch");
  }
  opts.validate(field.dim);

  const std::size_t dim = field.dim;
  const double h_min = opts.h_min;
  const double h_max = std::max(std::min(opts.h_max, field.recommended_h_max), h_min);
  double guard_floor = opts.abs_tol;
  for (double a : opts.component_abs_tol) guard_floor = std::max(guard_floor, a);

  auto abs_floor = [&](std::size_t i) {
    return opts.component_abs_tol.empty() ? opts.abs_tol : opts.component_abs_tol[i];
  };

  IntegrationResult res;
  Trajectory& traj = res.trajectory;

  Vec y = state0;
  double t = t0;
  double h = std::clamp(opts.h_init, h_min, h_max);

  Vec k[7];
  for (auto& ki : k) ki.assign(dim, 0.0);
  Vec ytmp(dim), ynew(dim), uin;

  auto eval = [&](double tt, const Vec& yy, Vec& out) {
    uin = u.evaluator(tt);
    field.rhs(tt, yy, uin, out);
  };

  std::size_t since_record = 0;
  auto record = [&](double tt, const Vec& yy) {
    traj.times.push_back(tt);
    traj.states.push_back(yy);
    traj.inputs.push_back(u.evaluator(tt));
  };
  record(t, y);

  eval(t, y, k[0]);
  bool fsal_valid = true;

  std::size_t attempts = 0;
  while (t < t1) {
    if (++attempts > opts.max_steps) {
      res.status = IntegrationStatus::max_steps_exceeded;
      res.message = "max_steps exceeded at t = " + std::to_string(t);
      break;
    }
    bool last = false;
    if (t + h >= t1) {
      h = t1 - t;
      last = true;
    }

    if (!fsal_valid) eval(t, y, k[0]);
    for (int s = 1; s < 7; ++s) {
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = 0;
        for (int j = 0; j < s; ++j) acc += kA[s][j] * k[j][i];
        ytmp[i] = y[i] + h * acc;
      }
      eval(t + kC[s] * h, ytmp, k[s]);
    }
    // stage 6 already evaluated ynew = y + h*sum(b5*k) at t+h (FSAL)
    double err_sq = 0;
    double dy_sq = 0;
    const double ynorm = norm2(y);
    for (std::size_t i = 0; i < dim; ++i) {
      double acc5 = 0, acc4 = 0;
      for (int j = 0; j < 7; ++j) {
        acc5 += kB5[j] * k[j][i];
        acc4 += kB4[j] * k[j][i];
      }
      ynew[i] = y[i] + h * acc5;
      const double e = h * (acc5 - acc4);
      const double sc = std::max(abs_floor(i), opts.rel_tol * ynorm);
      err_sq += (e / sc) * (e / sc);
      dy_sq += (ynew[i] - y[i]) * (ynew[i] - y[i]);
    }
    const double err_norm = std::sqrt(err_sq / static_cast<double>(dim));
    const double dy_norm = std::sqrt(dy_sq);
    const bool finite = all_finite(ynew);
    const bool guard_ok = dy_norm <= 0.5 * ynorm + guard_floor;

    if (finite && err_norm <= 1.0 && guard_ok) {
      t += h;
      y = ynew;
      k[0] = k[6];  // FSAL
      fsal_valid = true;
      ++res.accepted_steps;
      if (++since_record >= opts.record_stride || t >= t1) {
        since_record = 0;
        record(t, y);
      }
      double fac = 0.9 * std::pow(std::max(err_norm, 1e-10), -0.2);
      h = std::clamp(h * std::clamp(fac, 0.2, 5.0), h_min, h_max);
      if (last && t >= t1) break;
    } else {
      ++res.rejected_steps;
      fsal_valid = false;
      double fac;
      if (!finite) {
        fac = 0.2;
      } else if (!guard_ok) {
        fac = std::clamp(0.8 * (0.5 * ynorm + guard_floor) / dy_norm, 0.1, 0.8);
      } else {
        fac = std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 0.8);
      }
      const double h_next = h * fac;
      if (h_next < h_min) {
        if (t1 - t <= 2.0 * h_min) break;  // within resolution of the endpoint
        res.status = IntegrationStatus::step_underflow;
        res.message = "step size underflow at t = " + std::to_string(t);
        break;
      }
      h = h_next;
    }
  }

  if (traj.times.empty() || traj.times.back() < t) record(t, y);
  return res;
}

std::optional<double> settling_time(const Trajectory& traj, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("settling_time: radius must be positive");
  if (traj.times.empty()) return std::nullopt;
  // Scan backwards for the last excursion outside the ball.
  std::size_t first_inside = traj.size();  // index of the first all-inside suffix
  for (std::size_t i = traj.size(); i-- > 0;) {
    if (traj.state_norm(i) > radius) {
      first_inside = i + 1;
      break;
    }
    first_inside = i;
  }
  if (first_inside >= traj.size()) return std::nullopt;
  return traj.times[first_inside];
}

OdeField reduced_field(const SPSystem& sys) {
  OdeField f;
  f.dim = sys.n;
  f.input_dim = sys.p;
  f.rhs = [sys](double, const Vec& x, const Vec& u, Vec& dx) {
    dx = sys.f(x, sys.h(x), u);
  };
  return f;
}

OdeField boundary_layer_field(const SPSystem& sys, const Vec& x_frozen) {
  OdeField f;
  f.dim = sys.m;
  f.input_dim = sys.p;
  const Vec hx = sys.h(x_frozen);
  f.rhs = [sys, x_frozen, hx](double, const Vec& y, const Vec& u, Vec& dy) {
    Vec z(hx.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = y[i] + hx[i];
    dy = sys.g(x_frozen, z, u);
  };
  return f;
}

OdeField error_dynamics_field(const SPSystem& sys, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("error_dynamics_field: eps must be positive");
  OdeField f;
  f.dim = sys.n + sys.m;
  f.input_dim = sys.p;
  f.recommended_h_max = 0.5 * eps;
  const std::size_t n = sys.n, m = sys.m;
  f.rhs = [sys, eps, n, m](double, const Vec& s, const Vec& u, Vec& ds) {
    Vec x(s.begin(), s.begin() + n);
    Vec y(s.begin() + n, s.end());
    const Vec hx = sys.h(x);
    Vec z(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = y[i] + hx[i];
    const Vec fx = sys.f(x, z, u);
    const Vec gz = sys.g(x, z, u);
    const Vec jf = sys.h_jacobian(x).mul(fx);
    ds.resize(n + m);
    for (std::size_t i = 0; i < n; ++i) ds[i] = fx[i];
    for (std::size_t i = 0; i < m; ++i) ds[n + i] = gz[i] / eps - jf[i];
  };
  return f;
}

OdeField original_dynamics_field(const SPSystem& sys, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("original_dynamics_field: eps must be positive");
  OdeField f;
  f.dim = sys.n + sys.m;
  f.input_dim = sys.p;
  f.recommended_h_max = 0.5 * eps;
  const std::size_t n = sys.n, m = sys.m;
  f.rhs = [sys, eps, n, m](double, const Vec& s, const Vec& u, Vec& ds) {
    Vec x(s.begin(), s.begin() + n);
    Vec z(s.begin() + n, s.end());
    const Vec fx = sys.f(x, z, u);
    const Vec gz = sys.g(x, z, u);
    ds.resize(n + m);
    for (std::size_t i = 0; i < n; ++i) ds[i] = fx[i];
    for (std::size_t i = 0; i < m; ++i) ds[n + i] = gz[i] / eps;
  };
  return f;
}

std::pair<Vec, Vec> to_error_coords(const SPSystem& sys, const Vec& x, const Vec& z) {
  const Vec hx = sys.h(x);
  Vec y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) y[i] = z[i] - hx[i];
  return {x, y};
}

std::pair<Vec, Vec> from_error_coords(const SPSystem& sys, const Vec& x, const Vec& y) {
  const Vec hx = sys.h(x);
  Vec z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = y[i] + hx[i];
  return {x, z};
}

}  // namespace fxtiss
