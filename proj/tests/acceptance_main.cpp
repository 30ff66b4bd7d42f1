// Acceptance suite: every release criterion runs at its stated tolerance and
// prints exactly one [PASS]/[FAIL] line. Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "fxtiss/certify.hpp"
#include "fxtiss/feedback_opt.hpp"
#include "fxtiss/nonsmooth.hpp"
#include "fxtiss/ode.hpp"
#include "fxtiss/stylized.hpp"

using namespace fxtiss;

namespace {

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int id, const char* name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %d: %-34s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name,
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<Vec> stylized_ic_grid() {
  std::vector<Vec> ics;
  for (double r : {1.0, 10.0, 100.0, 1000.0}) {
    for (double ang : {0.4, 2.0, 3.7}) {
      ics.push_back({r * std::cos(ang), r * std::sin(ang)});
    }
  }
  return ics;
}

SolverOptions stylized_solver() {
  SolverOptions o;
  o.component_abs_tol = {1e-7, 1e-4};
  o.record_stride = 4;
  o.max_steps = 50'000'000;
  return o;
}

// 1. Lemma suites: 1e5 seeded samples each, zero violations beyond 1e-9
//    relative slack, under 30 s.
void criterion1() {
  Timer timer;
  const auto suites = run_lemma_suites(20250808, 100'000);
  std::size_t violations = 0;
  double min_slack = 0.0;
  for (const auto& s : suites) {
    violations += s.violations;
    min_slack = std::min(min_slack, s.min_rel_slack);
  }
  const double t = timer.seconds();
  const bool pass = violations == 0 && t < 30.0;
  report(1, "lemma oracle suites", pass,
         fmt("violations=%.0f min_rel_slack=%.2e", double(violations), min_slack), t);
}

// 2. Stylized undisturbed: 12 ICs with |s0| in {1,10,100,1000} all settle into
//    |s| <= 1e-2 no later than t = 18.15, under 60 s.
void criterion2() {
  Timer timer;
  const SPSystem sys = stylized_system({});
  const OdeField field = original_dynamics_field(sys, 0.01);
  double worst_settle = 0.0;
  bool all_settle = true;
  for (const Vec& ic : stylized_ic_grid()) {
    const auto res = integrate(field, ic, InputSignal::zero(2), 0.0, 20.0,
                               stylized_solver());
    const auto st = res.ok() ? settling_time(res.trajectory, 1e-2) : std::nullopt;
    if (!st) {
      all_settle = false;
      break;
    }
    worst_settle = std::max(worst_settle, *st);
  }
  const double t = timer.seconds();
  const bool pass = all_settle && worst_settle <= 18.15 && t < 60.0;
  report(2, "stylized undisturbed settling", pass,
         fmt("worst settling=%.3f (bound 18.15)", worst_settle), t);
}

// 3. Stylized disturbed: bounded on [0,40]; for t >= 18.15 all runs share an
//    IC-independent ball (max radius within 10% of min radius).
void criterion3() {
  Timer timer;
  const SPSystem sys = stylized_system({});
  const OdeField field = original_dynamics_field(sys, 0.01);
  const InputSignal u = stylized_disturbance();
  double r_min = 1e300, r_max = 0.0;
  bool bounded = true;
  for (const Vec& ic : stylized_ic_grid()) {
    const auto res = integrate(field, ic, u, 0.0, 40.0, stylized_solver());
    if (!res.ok() || !std::isfinite(res.trajectory.max_state_norm())) {
      bounded = false;
      break;
    }
    double r = 0.0;
    const Trajectory& tr = res.trajectory;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (tr.times[i] >= 18.15) r = std::max(r, tr.state_norm(i));
    }
    r_min = std::min(r_min, r);
    r_max = std::max(r_max, r);
  }
  const double t = timer.seconds();
  const bool pass = bounded && r_max <= 1.10 * r_min;
  report(3, "stylized disturbed common ball", pass,
         fmt("radius=[%.6f, %.6f] ratio=%.4f", r_min, r_max, r_max / r_min), t);
}

// 4. Certificate checks at 1e4 samples: reduced and boundary-layer checks
//    clean on [-10,10]/[-3,3]; halving omega2 flags violations.
void criterion4() {
  Timer timer;
  const StylizedParams params;
  const SPSystem sys = stylized_system(params);
  const auto vc = stylized_v_certificate(params);
  const auto wc = stylized_w_certificate(params);

  const OdeField rf = reduced_field(sys);
  auto field = [&rf](const Vec& x, const Vec& uu) {
    Vec dx(rf.dim);
    rf.rhs(0.0, x, uu, dx);
    return dx;
  };
  const auto rep_v = check_fxt_certificate(vc, field, Box::centered(10, 1),
                                           Box::centered(3, 2), 10'000, 1e-9, 101);

  auto restriction = [params](const Vec& y, const Vec& uu) {
    return stylized_boundary_restriction(params, y, uu);
  };
  const auto rep_w = check_boundary_layer_certificate(
      wc, sys, Box::centered(10, 1), Box::centered(10, 1), Box::centered(3, 2),
      restriction, 10'000, 1e-9, 102);

  const auto bounds = stylized_validated_bounds(params);
  const auto rep_i = check_interconnection_bounds(
      sys, vc, wc, bounds, Box::centered(5, 1), Box::centered(5, 1), Box::centered(2, 2),
      10'000, 1e-9, 103);

  auto halved = bounds;
  halved.omega2 *= 0.5;
  const auto rep_neg = check_interconnection_bounds(
      sys, vc, wc, halved, Box::centered(5, 1), Box::centered(5, 1), Box::centered(2, 2),
      10'000, 1e-9, 103);

  const double t = timer.seconds();
  const bool pass = rep_v.passed() && rep_w.passed() && rep_i.passed() &&
                    rep_neg.violations.size() > 0;
  report(4, "certificate checks + neg control", pass,
         fmt("V/W/I violations=0/0/%.0f, halved omega2 -> %.0f",
             double(rep_i.violations.size()), double(rep_neg.violations.size())),
         t);
}

// 5. Composite pipeline: eps* > 0, finite T; Psi_{zeta*} non-increasing along
//    5 undisturbed error-frame runs at eps = eps*/2 (1e-6 relative slack).
void criterion5() {
  Timer timer;
  const StylizedParams params;
  const SPSystem sys = stylized_system(params);
  const auto vc = stylized_v_certificate(params);
  const auto wc = stylized_w_certificate(params);
  const auto cert = build_composite(vc, wc, stylized_validated_bounds(params));

  bool pass = cert.eps_star > 0.0 && std::isfinite(cert.t_bound) && !cert.eps_star_capped;
  double worst_increase = 0.0;
  if (pass) {
    const double eps = 0.5 * cert.eps_star;
    const OdeField field = error_dynamics_field(sys, eps);
    SolverOptions opts;
    opts.component_abs_tol = {1e-7, 3e-3};
    opts.record_stride = 1;
    opts.max_steps = 50'000'000;
    const std::vector<Vec> ics = {{3.0, -3.0}, {-2.0, 4.0}, {1.0, 1.0},
                                  {-4.0, -2.0}, {2.0, -4.5}};
    for (const Vec& ic : ics) {
      const auto res = integrate(field, ic, InputSignal::zero(2), 0.0, 3.0, opts);
      if (!res.ok()) {
        pass = false;
        break;
      }
      const Trajectory& tr = res.trajectory;
      double prev = cert.zeta_star * tr.states[0][0] * tr.states[0][0] +
                    (1.0 - cert.zeta_star) * tr.states[0][1] * tr.states[0][1];
      for (std::size_t i = 1; i < tr.size(); ++i) {
        const double psi = cert.zeta_star * tr.states[i][0] * tr.states[i][0] +
                           (1.0 - cert.zeta_star) * tr.states[i][1] * tr.states[i][1];
        worst_increase = std::max(worst_increase, (psi - prev) / (1.0 + prev));
        prev = psi;
      }
    }
    pass = pass && worst_increase <= 1e-6;
  }
  report(5, "composite pipeline + Psi monotone", pass,
         fmt("eps*=%.3e T=%.1f worst rel increase=%.2e", cert.eps_star, cert.t_bound,
             worst_increase),
         timer.seconds());
}

// 6. Frame equivalence: (x,z) and (x,y) integrations agree after transform
//    within 1e-4 sup-norm over [0,5] for 5 matched ICs.
void criterion6() {
  Timer timer;
  const SPSystem sys = stylized_system({});
  const double eps = 0.01;
  SolverOptions opts;
  opts.component_abs_tol = {1e-8, 1e-5};
  opts.record_stride = 1;
  opts.max_steps = 50'000'000;
  // dense knots so the interpolant resolves the boundary-layer transient
  opts.h_max = 2e-5;
  const std::vector<Vec> ics = {{3.0, -4.0}, {-7.0, 2.0}, {10.0, 10.0},
                                {0.5, -9.0}, {-1.0, 1.0}};
  double worst = 0.0;
  bool ok = true;
  for (const Vec& ic : ics) {
    const auto orig = integrate(original_dynamics_field(sys, eps), ic,
                                InputSignal::zero(2), 0.0, 5.0, opts);
    const auto err = integrate(error_dynamics_field(sys, eps), {ic[0], ic[1] - ic[0]},
                               InputSignal::zero(2), 0.0, 5.0, opts);
    ok = ok && orig.ok() && err.ok();
    if (!ok) break;
    for (int i = 0; i <= 1000; ++i) {
      const double t = 5.0 * i / 1000.0;
      const Vec so = orig.trajectory.sample(t);
      const Vec se = err.trajectory.sample(t);
      worst = std::max(worst, std::abs(so[0] - se[0]));
      worst = std::max(worst, std::abs((so[1] - so[0]) - se[1]));
    }
  }
  const bool pass = ok && worst < 1e-4;
  report(6, "original/error frame agreement", pass, fmt("sup discrepancy=%.3e", worst),
         timer.seconds());
}

// 7. Feedback optimization, static cost: xhat -> (-8/11, 1/11) and z -> 2 xhat*
//    within 1e-3; manifold gradient identity to 1e-12 at 1e3 points; < 60 s.
void criterion7() {
  Timer timer;
  const auto rec = run_tracking_scenario(0.05, 0.0, {2.0, 1.0}, {0.0, 0.0});
  const Vec& xh = rec.x_hat.back();
  const Vec& z = rec.z.back();
  const double ex = std::hypot(xh[0] + 8.0 / 11.0, xh[1] - 1.0 / 11.0);
  const double ez = std::hypot(z[0] - 2.0 * (-8.0 / 11.0), z[1] - 2.0 * (1.0 / 11.0));

  const QuadraticCostModel model;
  std::mt19937_64 rng(2025);
  std::uniform_real_distribution<double> xs(-10.0, 10.0);
  std::uniform_real_distribution<double> ts(0.0, 500.0);
  double worst_identity = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec p{xs(rng), xs(rng)};
    const double tt = ts(rng);
    const Vec a = phat(model, p, {2.0 * p[0], 2.0 * p[1]}, tt, 0.05, 0.2);
    const Vec b = grad_phi(model, p, tt, 0.05, 0.2);
    worst_identity = std::max({worst_identity, std::abs(a[0] - b[0]),
                               std::abs(a[1] - b[1])});
  }
  const double t = timer.seconds();
  const bool pass = rec.status == IntegrationStatus::ok && ex < 1e-3 && ez < 1e-3 &&
                    worst_identity <= 1e-12 && t < 60.0;
  report(7, "feedopt static convergence", pass,
         fmt("|xhat err|=%.2e |z err|=%.2e identity=%.1e", ex, ez, worst_identity), t);
}

// 8. Feedback optimization, drifting cost: post-settling mean error strictly
//    decreasing over eps0 in {5, 0.2, 0.02}, with >= 3x between 5 and 0.2.
void criterion8() {
  Timer timer;
  double means[3];
  const double eps0s[3] = {5.0, 0.2, 0.02};
  bool ok = true;
  for (int i = 0; i < 3; ++i) {
    const auto rec = run_tracking_scenario(0.05, eps0s[i], {2.0, 1.0}, {0.0, 0.0});
    ok = ok && rec.status == IntegrationStatus::ok;
    means[i] = rec.post_settling_mean();
  }
  const bool pass = ok && means[0] > means[1] && means[1] > means[2] &&
                    means[1] <= means[0] / 3.0;
  report(8, "feedopt drifting-cost gain ordering", pass,
         fmt("means=%.3e/%.3e/%.3e", means[0], means[1], means[2]), timer.seconds());
}

// 9. Integrator sanity at default tolerances: linear endpoint < 1e-8,
//    sublinear closed form within 1e-4 at t = 1.
void criterion9() {
  Timer timer;
  OdeField lin;
  lin.dim = 1;
  lin.input_dim = 0;
  lin.rhs = [](double, const Vec& s, const Vec&, Vec& ds) {
    ds.resize(1);
    ds[0] = -s[0];
  };
  const auto r1 = integrate(lin, {1.0}, InputSignal::zero(0), 0.0, 1.0, SolverOptions{});
  const double e1 = std::abs(r1.trajectory.states.back()[0] - std::exp(-1.0));

  OdeField sub;
  sub.dim = 1;
  sub.input_dim = 0;
  sub.rhs = [](double, const Vec& s, const Vec&, Vec& ds) {
    ds.resize(1);
    ds[0] = -signed_power(s[0], 0.5);
  };
  const auto r2 = integrate(sub, {1.0}, InputSignal::zero(0), 0.0, 1.0, SolverOptions{});
  const double e2 = std::abs(r2.trajectory.states.back()[0] - 0.25);

  const bool pass = r1.ok() && r2.ok() && e1 < 1e-8 && e2 < 1e-4;
  report(9, "integrator sanity", pass, fmt("linear err=%.2e sublinear err=%.2e", e1, e2),
         timer.seconds());
}

}  // namespace

int main() {
  std::printf("fxtiss acceptance suite\n");
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
