#include "fxtiss/certify.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "fxtiss/nonsmooth.hpp"

namespace fxtiss {

ClassKFn ClassKFn::zero() {
  ClassKFn f;
  f.evaluator = [](double) { return 0.0; };
  f.tag = Tag::zero;
  return f;
}

ClassKFn ClassKFn::power(double coeff, double exponent) {
  if (!(coeff > 0.0 && exponent > 0.0)) {
    throw std::invalid_argument("ClassKFn::power: coefficient and exponent must be positive");
  }
  ClassKFn f;
  f.evaluator = [coeff, exponent](double s) { return coeff * abs_pow(s, exponent); };
  f.tag = Tag::class_k_inf;
  return f;
}

bool check_class_k(const ClassKFn& fn, double hi, std::size_t n) {
  if (fn.tag == ClassKFn::Tag::zero) return true;
  if (std::abs(fn(0.0)) > 0.0) return false;
  double prev = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double s = hi * static_cast<double>(i) / static_cast<double>(n);
    const double v = fn(s);
    if (!(v > prev)) return false;
    prev = v;
  }
  if (fn.tag == ClassKFn::Tag::class_k_inf) {
    if (!(fn(1e6) > 10.0 * fn(1.0))) return false;
  }
  return true;
}

void FxTCertificate::validate() const {
  if (!(k1 > 0.0 && k2 > 0.0)) {
    throw std::invalid_argument("FxTCertificate: gains k1, k2 must be positive");
  }
  if (!(a1 > 0.0 && a1 < 1.0)) {
    throw std::invalid_argument("FxTCertificate: a1 must lie in (0,1)");
  }
  if (!(a2 > 1.0)) {
    throw std::invalid_argument("FxTCertificate: a2 must exceed 1");
  }
}

FxTCertificate FxTCertificate::quadratic(double k1, double k2, double a1, double a2,
                                         ClassKFn rho) {
  FxTCertificate c;
  c.V = [](const Vec& x) {
    double s = 0;
    for (double xi : x) s += xi * xi;
    return s;
  };
  c.grad = [](const Vec& x) {
    Vec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i];
    return g;
  };
  c.alpha_lo = ClassKFn::power(1.0, 2.0);
  c.alpha_hi = ClassKFn::power(1.0, 2.0);
  c.k1 = k1;
  c.k2 = k2;
  c.a1 = a1;
  c.a2 = a2;
  c.rho = std::move(rho);
  c.validate();
  return c;
}

void BoundaryLayerCertificate::validate() const {
  if (!(kappa1 > 0.0 && kappa2 > 0.0)) {
    throw std::invalid_argument("BoundaryLayerCertificate: gains must be positive");
  }
  if (!(b1 > 0.0 && b1 < 1.0)) {
    throw std::invalid_argument("BoundaryLayerCertificate: b1 must lie in (0,1)");
  }
  if (!(b2 > 1.0)) {
    throw std::invalid_argument("BoundaryLayerCertificate: b2 must exceed 1");
  }
}

BoundaryLayerCertificate BoundaryLayerCertificate::quadratic(double kappa1,
                                                             double kappa2, double b1,
                                                             double b2, ClassKFn rho) {
  BoundaryLayerCertificate c;
  c.W = [](const Vec&, const Vec& y) {
    double s = 0;
    for (double yi : y) s += yi * yi;
    return s;
  };
  c.grad_x = [](const Vec& x, const Vec&) { return Vec(x.size(), 0.0); };
  c.grad_y = [](const Vec&, const Vec& y) {
    Vec g(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) g[i] = 2.0 * y[i];
    return g;
  };
  c.alpha_lo = ClassKFn::power(1.0, 2.0);
  c.alpha_hi = ClassKFn::power(1.0, 2.0);
  c.kappa1 = kappa1;
  c.kappa2 = kappa2;
  c.b1 = b1;
  c.b2 = b2;
  c.rho = std::move(rho);
  c.validate();
  return c;
}

void Box::validate() const {
  if (lo.empty() || lo.size() != hi.size()) {
    throw std::invalid_argument("Box: empty or mismatched bounds");
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("Box: need lo <= hi");
  }
}

Box Box::centered(double half_width, std::size_t dim) {
  Box b;
  b.lo.assign(dim, -half_width);
  b.hi.assign(dim, half_width);
  return b;
}

void CheckReport::merge(CheckReport&& other) {
  samples_tested += other.samples_tested;
  tight_count += other.tight_count;
  max_violation = std::max(max_violation, other.max_violation);
  violations.insert(violations.end(), std::make_move_iterator(other.violations.begin()),
                    std::make_move_iterator(other.violations.end()));
}

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::size_t i, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  std::size_t n = i;
  while (n > 0) {
    r += f * static_cast<double>(n % base);
    n /= base;
    f *= inv;
  }
  return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_from_hash(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

BoxSampler::BoxSampler(Box box, std::uint64_t seed) : box_(std::move(box)), seed_(seed) {
  box_.validate();
  if (box_.dim() > std::size(kPrimes)) {
    throw std::invalid_argument("BoxSampler: dimension too large");
  }
}

Vec BoxSampler::at(std::size_t index) const {
  const std::size_t d = box_.dim();
  Vec u(d);
  if ((index + 1) % 10 == 0) {
    // Uniform draw keyed to the sample index: partition-independent.
    std::uint64_t h = splitmix64(seed_ ^ (0x2545f4914f6cdd1dULL * (index + 1)));
    for (std::size_t j = 0; j < d; ++j) {
      u[j] = unit_from_hash(h);
      h = splitmix64(h);
    }
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      u[j] = radical_inverse(index + 1, kPrimes[j]);
    }
  }
  Vec out(d);
  for (std::size_t j = 0; j < d; ++j) {
    out[j] = box_.lo[j] + (box_.hi[j] - box_.lo[j]) * u[j];
  }
  return out;
}

namespace {

// Shared scaffolding for the sampled checks: evaluates `eval` at every sample
// index, optionally over several workers, and merges deterministically.
CheckReport run_sampled_check(
    std::size_t n_samples, std::uint64_t seed, unsigned jobs,
    const std::function<void(std::size_t index, CheckReport& local)>& eval) {
  if (n_samples == 0) {
    throw std::invalid_argument("sampled check: n_samples must be positive");
  }
  const unsigned workers =
      std::max(1u, std::min<unsigned>(jobs, std::thread::hardware_concurrency()));
  std::vector<CheckReport> parts(workers);
  for (auto& p : parts) p.max_violation = -std::numeric_limits<double>::infinity();
  auto worker = [&](unsigned w) {
    const std::size_t lo = n_samples * w / workers;
    const std::size_t hi = n_samples * (w + 1) / workers;
    for (std::size_t i = lo; i < hi; ++i) eval(i, parts[w]);
    parts[w].samples_tested = hi - lo;
  };
  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }
  CheckReport out;
  out.seed = seed;
  out.max_violation = -std::numeric_limits<double>::infinity();
  for (auto& p : parts) out.merge(std::move(p));
  std::sort(out.violations.begin(), out.violations.end(),
            [](const Violation& a, const Violation& b) {
              return a.sample_index < b.sample_index;
            });
  return out;
}

// Classifies one inequality sample against lhs <= rhs + tol.
void classify(std::size_t index, const Vec& state, const Vec& input, double lhs,
              double rhs, double tol, const std::string& which, CheckReport& rep) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  const double excess = (lhs - rhs) / scale;
  rep.max_violation = std::max(rep.max_violation, excess);
  if (excess > tol) {
    rep.violations.push_back({index, state, input, lhs, rhs, which});
  } else if (excess > 0.0) {
    ++rep.tight_count;
  }
}

Box concat(const Box& a, const Box& b) {
  Box out = a;
  out.lo.insert(out.lo.end(), b.lo.begin(), b.lo.end());
  out.hi.insert(out.hi.end(), b.hi.begin(), b.hi.end());
  return out;
}

}  // namespace

CheckReport check_fxt_certificate(
    const FxTCertificate& cert,
    const std::function<Vec(const Vec& state, const Vec& u)>& field, const Box& region,
    const Box& u_region, std::size_t n_samples, double tol, std::uint64_t seed,
    unsigned jobs) {
  cert.validate();
  region.validate();
  u_region.validate();
  const std::size_t nx = region.dim();
  const BoxSampler sampler(concat(region, u_region), seed);
  return run_sampled_check(n_samples, seed, jobs, [&](std::size_t i, CheckReport& rep) {
    const Vec s = sampler.at(i);
    const Vec x(s.begin(), s.begin() + nx);
    const Vec u(s.begin() + nx, s.end());
    if (norm2(x) < 1e-12) return;  // gradients of the sandwiched V vanish here
    const Vec g = cert.grad(x);
    const Vec dx = field(x, u);
    double lhs = 0;
    for (std::size_t j = 0; j < g.size(); ++j) lhs += g[j] * dx[j];
    const double v = cert.V(x);
    const double rhs = -cert.k1 * abs_pow(v, cert.a1) - cert.k2 * abs_pow(v, cert.a2) +
                       cert.rho(norm2(u));
    classify(i, x, u, lhs, rhs, tol, "V", rep);
  });
}

CheckReport check_boundary_layer_certificate(
    const BoundaryLayerCertificate& cert, const SPSystem& sys, const Box& x_frozen_region,
    const Box& y_region, const Box& u_region,
    const std::function<bool(const Vec& y, const Vec& u)>& restriction,
    std::size_t n_samples, double tol, std::uint64_t seed, unsigned jobs) {
  cert.validate();
  const BoxSampler sampler(concat(concat(x_frozen_region, y_region), u_region), seed);
  const std::size_t nx = x_frozen_region.dim();
  const std::size_t my = y_region.dim();
  return run_sampled_check(n_samples, seed, jobs, [&](std::size_t i, CheckReport& rep) {
    const Vec s = sampler.at(i);
    const Vec x(s.begin(), s.begin() + nx);
    const Vec y(s.begin() + nx, s.begin() + nx + my);
    const Vec u(s.begin() + nx + my, s.end());
    if (restriction && !restriction(y, u)) return;
    if (norm2(y) < 1e-12) return;
    const Vec hx = sys.h(x);
    Vec z(my);
    for (std::size_t j = 0; j < my; ++j) z[j] = y[j] + hx[j];
    const Vec gy = cert.grad_y(x, y);
    const Vec gz = sys.g(x, z, u);
    double lhs = 0;
    for (std::size_t j = 0; j < my; ++j) lhs += gy[j] * gz[j];
    const double w = cert.W(x, y);
    const double rhs = -cert.kappa1 * abs_pow(w, cert.b1) -
                       cert.kappa2 * abs_pow(w, cert.b2) + cert.rho(norm2(u));
    Vec state = x;
    state.insert(state.end(), y.begin(), y.end());
    classify(i, state, u, lhs, rhs, tol, "W", rep);
  });
}

std::pair<double, double> interconnection_terms(const SPSystem& sys,
                                                const FxTCertificate& v_cert,
                                                const BoundaryLayerCertificate& w_cert,
                                                const Vec& x, const Vec& y,
                                                const Vec& u) {
  const Vec hx = sys.h(x);
  Vec z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = y[i] + hx[i];
  const Vec f_off = sys.f(x, z, u);
  const Vec f_on = sys.f(x, hx, u);
  const Vec gv = v_cert.grad(x);
  double i1 = 0;
  for (std::size_t j = 0; j < gv.size(); ++j) i1 += gv[j] * (f_off[j] - f_on[j]);

  const Vec wx = w_cert.grad_x(x, y);
  const Vec wy = w_cert.grad_y(x, y);
  const Mat jh = sys.h_jacobian(x);
  double i2 = 0;
  for (std::size_t j = 0; j < sys.n; ++j) {
    double row = wx[j];
    for (std::size_t i = 0; i < sys.m; ++i) row -= wy[i] * jh(i, j);
    i2 += row * f_off[j];
  }
  return {i1, i2};
}

double v_tilde(const FxTCertificate& cert, const Vec& x) {
  const double v = cert.V(x);
  return abs_pow(v, 0.5 * cert.a1) + abs_pow(v, 0.5 * cert.a2);
}

double w_tilde(const BoundaryLayerCertificate& cert, const Vec& x, const Vec& y) {
  const double w = cert.W(x, y);
  return abs_pow(w, 0.5 * cert.b1) + abs_pow(w, 0.5 * cert.b2);
}

CheckReport check_interconnection_bounds(
    const SPSystem& sys, const FxTCertificate& v_cert,
    const BoundaryLayerCertificate& w_cert, const InterconnectionBounds& bounds,
    const Box& x_region, const Box& y_region, const Box& u_region,
    std::size_t n_samples, double tol, std::uint64_t seed, unsigned jobs) {
  v_cert.validate();
  w_cert.validate();
  if (!bounds.satisfies_gain_condition(v_cert.k_lower())) {
    throw std::invalid_argument(
        "check_interconnection_bounds: gain condition (nu1 < k_lower/2 or nu2 < 0) "
        "violated");
  }
  const BoxSampler sampler(concat(concat(x_region, y_region), u_region), seed);
  const std::size_t nx = x_region.dim();
  const std::size_t my = y_region.dim();
  return run_sampled_check(n_samples, seed, jobs, [&](std::size_t i, CheckReport& rep) {
    const Vec s = sampler.at(i);
    const Vec x(s.begin(), s.begin() + nx);
    const Vec y(s.begin() + nx, s.begin() + nx + my);
    const Vec u(s.begin() + nx + my, s.end());
    const auto [i1, i2] = interconnection_terms(sys, v_cert, w_cert, x, y, u);
    const double vt2 = v_tilde(v_cert, x) * v_tilde(v_cert, x);
    const double wt2 = w_tilde(w_cert, x, y) * w_tilde(w_cert, x, y);
    const double un = norm2(u);
    Vec state = x;
    state.insert(state.end(), y.begin(), y.end());
    classify(i, state, u, i1, bounds.nu1 * vt2 + bounds.omega1 * wt2 + bounds.rho1(un),
             tol, "I1", rep);
    classify(i, state, u, i2, bounds.nu2 * vt2 + bounds.omega2 * wt2 + bounds.rho2(un),
             tol, "I2", rep);
  });
}

double CompositeCertificate::nu_of(double zeta, double k_lower,
                                   const InterconnectionBounds& b) const {
  return zeta * (0.5 * k_lower - b.nu1) - (1.0 - zeta) * b.nu2;
}

CompositeCertificate build_composite(const FxTCertificate& v_cert,
                                     const BoundaryLayerCertificate& w_cert,
                                     const InterconnectionBounds& bounds,
                                     const CompositeOptions& options) {
  v_cert.validate();
  w_cert.validate();
  if (!(options.zeta_grid_resolution > 0.0 && options.zeta_grid_resolution < 0.5)) {
    throw std::invalid_argument("build_composite: bad zeta grid resolution");
  }
  const double k_lower = v_cert.k_lower();
  const double kappa_lower = w_cert.kappa_lower();
  if (!bounds.satisfies_gain_condition(k_lower)) {
    throw composite_construction_error(
        "build_composite: gain condition violated — need nu1 < k_lower/2 or nu2 < 0 "
        "(nu1 = " + std::to_string(bounds.nu1) +
        ", k_lower/2 = " + std::to_string(0.5 * k_lower) +
        ", nu2 = " + std::to_string(bounds.nu2) + ")");
  }

  auto nu = [&](double zeta) {
    return zeta * (0.5 * k_lower - bounds.nu1) - (1.0 - zeta) * bounds.nu2;
  };

  const auto steps = static_cast<std::size_t>(std::llround(1.0 / options.zeta_grid_resolution));
  double best_zeta = 0.0;
  double best_nu = 0.0;
  for (std::size_t i = 1; i < steps; ++i) {
    const double zeta = static_cast<double>(i) / static_cast<double>(steps);
    const double v = nu(zeta);
    if (v > best_nu) {
      best_nu = v;
      best_zeta = zeta;
    }
  }
  if (!(best_nu > 0.0)) {
    throw composite_construction_error(
        "build_composite: no zeta in (0,1) with nu(zeta) > 0 on the grid");
  }

  CompositeCertificate out;
  out.zeta_star = best_zeta;
  out.nu_star = best_nu;
  out.gamma1 = std::max(v_cert.a1, w_cert.b1);
  out.gamma2 = std::min(v_cert.a2, w_cert.b2);

  const double denom = best_nu + best_zeta * bounds.omega1 + (1.0 - best_zeta) * bounds.omega2;
  if (denom > 0.0) {
    out.eps_star = (1.0 - best_zeta) * kappa_lower / (2.0 * denom);
    out.eps_star_capped = false;
  } else {
    out.eps_star = options.eps_cap;
    out.eps_star_capped = true;
  }

  out.k1_eff = 0.5 * best_nu;
  out.k2_eff = 0.5 * best_nu * std::pow(2.0, 1.0 - out.gamma2);
  out.t_bound = settling_time_bound(out.k1_eff, out.gamma1, out.k2_eff, out.gamma2);
  return out;
}

double composite_value(const FxTCertificate& v_cert,
                       const BoundaryLayerCertificate& w_cert, double zeta, const Vec& x,
                       const Vec& y) {
  if (!(zeta > 0.0 && zeta < 1.0)) {
    throw std::invalid_argument("composite_value: zeta must lie in (0,1)");
  }
  return zeta * v_cert.V(x) + (1.0 - zeta) * w_cert.W(x, y);
}

double settling_time_bound(double k1, double a1, double k2, double a2) {
  if (!(k1 > 0.0 && k2 > 0.0)) {
    throw std::invalid_argument("settling_time_bound: gains must be positive");
  }
  if (!(a1 > 0.0 && a1 < 1.0)) {
    throw std::invalid_argument("settling_time_bound: a1 must lie in (0,1)");
  }
  if (!(a2 > 1.0)) {
    throw std::invalid_argument("settling_time_bound: a2 must exceed 1");
  }
  return 1.0 / (k1 * (1.0 - a1)) + 1.0 / (k2 * (a2 - 1.0));
}

ClassKFn implication_form_gain(const FxTCertificate& cert, double eps_tilde) {
  cert.validate();
  if (!(eps_tilde > 0.0 && eps_tilde < cert.k_lower())) {
    throw std::invalid_argument(
        "implication_form_gain: need 0 < eps_tilde < min(k1, k2)");
  }
  const auto alpha = cert.alpha_lo;
  const double a1 = cert.a1, a2 = cert.a2;
  auto chi_tilde = [alpha, a1, a2, eps_tilde](double s) {
    const double a = alpha(s);
    return eps_tilde * (abs_pow(a, a1) + abs_pow(a, a2));
  };
  const auto rho = cert.rho;
  ClassKFn out;
  out.tag = rho.tag;  // chi_tilde is class-K-infinity, so chi inherits rho's class
  out.evaluator = [chi_tilde, rho](double s) {
    const double target = rho(s);
    if (target <= 0.0) return 0.0;
    double hi = 1.0;
    while (chi_tilde(hi) < target) {
      hi *= 2.0;
      if (hi > 1e154) {
        throw std::runtime_error("implication_form_gain: bisection bracket overflow");
      }
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (chi_tilde(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  return out;
}

GklEnvelope estimate_gkl_envelope(const std::vector<Trajectory>& ensemble,
                                  double u_sup) {
  if (ensemble.empty()) {
    throw std::invalid_argument("estimate_gkl_envelope: ensemble must be nonempty");
  }
  (void)u_sup;  // recorded by callers; the envelope itself is data-driven
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  for (const auto& tr : ensemble) {
    t_lo = std::max(t_lo, tr.times.front());
    t_hi = std::min(t_hi, tr.times.back());
  }
  const std::size_t grid_n = 256;
  GklEnvelope env;
  env.grid.resize(grid_n);
  for (std::size_t i = 0; i < grid_n; ++i) {
    env.grid[i] = t_lo + (t_hi - t_lo) * static_cast<double>(i) /
                             static_cast<double>(grid_n - 1);
  }

  // Post-settling window: the final quarter of the common span.
  const double t_post = t_hi - 0.25 * (t_hi - t_lo);
  double varrho = 0.0;
  for (const auto& tr : ensemble) {
    for (double t : env.grid) {
      if (t < t_post) continue;
      varrho = std::max(varrho, norm2(tr.sample(t)));
    }
  }
  env.varrho_estimate = varrho;

  // Bucket trajectories by decade of |s0|.
  std::vector<int> decades;
  for (const auto& tr : ensemble) {
    const double r = norm2(tr.states.front());
    decades.push_back(r > 0.0 ? static_cast<int>(std::floor(std::log10(r)))
                              : std::numeric_limits<int>::min());
  }
  std::vector<int> uniq = decades;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

  for (int d : uniq) {
    GklEnvelope::Row row;
    row.r_lo = d == std::numeric_limits<int>::min() ? 0.0 : std::pow(10.0, d);
    row.r_hi = d == std::numeric_limits<int>::min() ? 0.0 : std::pow(10.0, d + 1);
    row.beta.assign(grid_n, 0.0);
    for (std::size_t k = 0; k < ensemble.size(); ++k) {
      if (decades[k] != d) continue;
      ++row.count;
      for (std::size_t i = 0; i < grid_n; ++i) {
        const double excess = norm2(ensemble[k].sample(env.grid[i])) - varrho;
        row.beta[i] = std::max(row.beta[i], std::max(excess, 0.0));
      }
    }
    env.rows.push_back(std::move(row));
  }
  return env;
}

}  // namespace fxtiss
