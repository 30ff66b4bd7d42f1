#include "fxtiss/nonsmooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fxtiss {

namespace {

double norm2(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double rel_scale(double lhs, double rhs) {
  return std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

LemmaCheckResult make_result(double lhs, double rhs, bool applicable = true) {
  LemmaCheckResult r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.applicable = applicable;
  r.holds = !applicable || lhs <= rhs + kLemmaRelTol * rel_scale(lhs, rhs);
  return r;
}

}  // namespace

double abs_pow(double x, double p) {
  const double a = std::abs(x);
  if (a == 0.0) return 0.0;
  return std::exp(p * std::log(a));
}

double signed_power(double x, double q) {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw std::invalid_argument("signed_power: exponent must be positive and finite");
  }
  if (x == 0.0) return 0.0;
  const double mag = abs_pow(x, q);
  return x > 0.0 ? mag : -mag;
}

SignedPowerParams::SignedPowerParams(double q) : exponent(q) {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw std::invalid_argument("SignedPowerParams: exponent must be positive");
  }
}

FxTDriftParams::FxTDriftParams(double xi1_, double xi2_) : xi1(xi1_), xi2(xi2_) {
  if (!(xi1 > 0.0 && xi1 < 1.0)) {
    throw std::invalid_argument("FxTDriftParams: xi1 must lie in (0,1)");
  }
  if (!(xi2 < 0.0)) {
    throw std::invalid_argument("FxTDriftParams: xi2 must be negative");
  }
}

Vec fxt_drift(std::span<const double> x, const FxTDriftParams& params) {
  Vec out(x.size(), 0.0);
  const double r = norm2(x);
  if (r == 0.0) return out;
  const double scale = abs_pow(r, -params.xi1) + abs_pow(r, -params.xi2);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * scale;
  return out;
}

double fxt_drift_scalar(double x, const FxTDriftParams& params) {
  if (x == 0.0) return 0.0;
  return x * (abs_pow(x, -params.xi1) + abs_pow(x, -params.xi2));
}

LemmaCheckResult lemma1_check(double x, double y, double p1, double p2, double c) {
  if (!(x >= 0.0 && y >= 0.0)) {
    throw std::invalid_argument("lemma1_check: x, y must be nonnegative");
  }
  if (!(p1 > 0.0 && p2 > 0.0 && c > 0.0)) {
    throw std::invalid_argument("lemma1_check: p1, p2, c must be positive");
  }
  const double lhs = abs_pow(x, p1) * abs_pow(y, p2);
  const double rhs =
      c * abs_pow(x, p1 + p2) + abs_pow(c, -p1 / p2) * abs_pow(y, p1 + p2);
  return make_result(lhs, rhs);
}

namespace {

// x/|x|^xi with the convention 0 at x = 0.
Vec drift_term(std::span<const double> x, double xi) {
  Vec out(x.size(), 0.0);
  const double r = norm2(x);
  if (r == 0.0) return out;
  const double scale = abs_pow(r, -xi);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * scale;
  return out;
}

double dist(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

LemmaCheckResult lemma2a_check(std::span<const double> x, std::span<const double> y,
                               double xi1) {
  if (!(xi1 > 0.0 && xi1 < 1.0)) {
    throw std::invalid_argument("lemma2a_check: xi1 must lie in (0,1)");
  }
  if (x.size() != y.size()) {
    throw std::invalid_argument("lemma2a_check: dimension mismatch");
  }
  const Vec tx = drift_term(x, xi1);
  const Vec ty = drift_term(y, xi1);
  Vec diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - y[i];
  const double lhs = dist(tx, ty);
  const double rhs = std::pow(2.0, xi1) * abs_pow(norm2(diff), 1.0 - xi1);
  return make_result(lhs, rhs);
}

LemmaCheckResult lemma2b_check(std::span<const double> x, std::span<const double> y,
                               double xi2) {
  if (!(xi2 < 0.0)) {
    throw std::invalid_argument("lemma2b_check: xi2 must be negative");
  }
  if (x.size() != y.size()) {
    throw std::invalid_argument("lemma2b_check: dimension mismatch");
  }
  const double nx = norm2(x);
  const double ny = norm2(y);
  // The proof's opening remark: for x = 0 or y = 0 the bound holds with K = 1.
  const double K = (nx == 0.0 || ny == 0.0)
                       ? 1.0
                       : 1.0 + std::max(1.0, -xi2 * std::pow(2.0, -xi2 - 1.0));
  const Vec tx = drift_term(x, xi2);
  const Vec ty = drift_term(y, xi2);
  Vec diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = y[i] - x[i];
  const double nd = norm2(diff);
  const double lhs = dist(tx, ty);
  const double rhs = K * nd * (abs_pow(nx, -xi2) + abs_pow(nd, -xi2));
  return make_result(lhs, rhs);
}

LemmaCheckResult jensen_sum_check(std::span<const double> s, double p) {
  if (!(p > 0.0)) {
    throw std::invalid_argument("jensen_sum_check: p must be positive");
  }
  double sum = 0.0;
  double sum_pow = 0.0;
  for (double v : s) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("jensen_sum_check: entries must be nonnegative");
    }
    sum += v;
    sum_pow += abs_pow(v, p);
  }
  const double n = static_cast<double>(s.size());
  const double lhs = abs_pow(sum, p);
  const double rhs = (p <= 1.0) ? sum_pow : abs_pow(n, p - 1.0) * sum_pow;
  return make_result(lhs, rhs);
}

LemmaCheckResult sandwich_check(double x, double p, double p_lo, double p_hi) {
  if (!(x >= 0.0)) {
    throw std::invalid_argument("sandwich_check: x must be nonnegative");
  }
  if (!(p_lo <= p && p <= p_hi)) {
    throw std::invalid_argument("sandwich_check: need p_lo <= p <= p_hi");
  }
  const double lhs = abs_pow(x, p);
  const double rhs = abs_pow(x, p_lo) + abs_pow(x, p_hi);
  return make_result(lhs, rhs);
}

LemmaCheckResult shifted_power_check(double x, double u, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("shifted_power_check: alpha must be positive");
  }
  const bool applicable = std::abs(x) > 2.0 * std::abs(u);
  const double lhs = x * signed_power(x + u, alpha);
  const double rhs = std::pow(2.0, -alpha) * abs_pow(x, alpha + 1.0);
  // Inverted orientation: the lemma claims lhs >= rhs on its region.
  LemmaCheckResult r;
  r.lhs = rhs;  // reported as "lhs <= rhs" form: rhs_bound <= x*sg(x+u)^a
  r.rhs = lhs;
  r.slack = lhs - rhs;
  r.applicable = applicable;
  r.holds = !applicable || rhs <= lhs + kLemmaRelTol * rel_scale(lhs, rhs);
  return r;
}

LemmaCheckResult lemma6_check(double x, double y, double p1, double p2,
                              double delta, double c) {
  if (!(x >= 0.0 && y >= 0.0)) {
    throw std::invalid_argument("lemma6_check: x, y must be nonnegative");
  }
  if (!(p1 > 0.0 && p2 > 0.0 && delta > 0.0 && c > 0.0)) {
    throw std::invalid_argument("lemma6_check: parameters must be positive");
  }
  const double lhs = delta * abs_pow(x, p1) * abs_pow(y, p2);
  const double rhs = c * abs_pow(x, p1 + p2) +
                     abs_pow(delta, 1.0 + p1 / p2) * abs_pow(c, -p1 / p2) *
                         abs_pow(y, p1 + p2);
  return make_result(lhs, rhs);
}

namespace {

struct SuiteAccumulator {
  LemmaSuiteResult res;
  explicit SuiteAccumulator(std::string name, std::uint64_t seed) {
    res.lemma = std::move(name);
    res.seed = seed;
    res.min_rel_slack = std::numeric_limits<double>::infinity();
  }
  void add(const LemmaCheckResult& c) {
    ++res.samples;
    if (!c.applicable) {
      ++res.not_applicable;
      return;
    }
    const double rel = c.slack / rel_scale(c.lhs, c.rhs);
    res.min_rel_slack = std::min(res.min_rel_slack, rel);
    if (!c.holds) ++res.violations;
  }
};

Vec random_vec(std::mt19937_64& rng, std::size_t dim, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vec v(dim);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

std::vector<LemmaSuiteResult> run_lemma_suites(std::uint64_t seed,
                                               std::size_t samples_per_lemma) {
  if (samples_per_lemma == 0) {
    throw std::invalid_argument("run_lemma_suites: sample count must be positive");
  }
  std::vector<LemmaSuiteResult> out;
  const std::size_t n = samples_per_lemma;

  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.0, 10.0);
    std::uniform_real_distribution<double> expo(0.05, 3.0);
    std::uniform_real_distribution<double> cdist(0.01, 2.0);
    SuiteAccumulator acc("lemma1", seed);
    for (std::size_t i = 0; i < n; ++i) {
      acc.add(lemma1_check(mag(rng), mag(rng), expo(rng), expo(rng), cdist(rng)));
    }
    out.push_back(acc.res);
  }
  {
    std::mt19937_64 rng(seed + 1);
    std::uniform_int_distribution<std::size_t> dim(1, 5);
    std::uniform_real_distribution<double> xi(0.02, 0.98);
    SuiteAccumulator acc("lemma2a", seed + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t d = dim(rng);
      const Vec x = random_vec(rng, d, -5.0, 5.0);
      const Vec y = random_vec(rng, d, -5.0, 5.0);
      acc.add(lemma2a_check(x, y, xi(rng)));
    }
    out.push_back(acc.res);
  }
  {
    std::mt19937_64 rng(seed + 2);
    std::uniform_int_distribution<std::size_t> dim(1, 5);
    std::uniform_real_distribution<double> xi(-3.0, -0.02);
    SuiteAccumulator acc("lemma2b", seed + 2);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t d = dim(rng);
      const Vec x = random_vec(rng, d, -5.0, 5.0);
      const Vec y = random_vec(rng, d, -5.0, 5.0);
      acc.add(lemma2b_check(x, y, xi(rng)));
    }
    out.push_back(acc.res);
  }
  {
    std::mt19937_64 rng(seed + 3);
    std::uniform_int_distribution<std::size_t> len(1, 5);
    std::uniform_real_distribution<double> expo(0.05, 3.0);
    SuiteAccumulator acc("lemma3_jensen", seed + 3);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec s = random_vec(rng, len(rng), 0.0, 5.0);
      acc.add(jensen_sum_check(s, expo(rng)));
    }
    out.push_back(acc.res);
  }
  {
    std::mt19937_64 rng(seed + 4);
    std::uniform_real_distribution<double> mag(0.0, 10.0);
    std::uniform_real_distribution<double> expo(0.05, 3.0);
    SuiteAccumulator acc("lemma4_sandwich", seed + 4);
    for (std::size_t i = 0; i < n; ++i) {
      double a = expo(rng), b = expo(rng), c = expo(rng);
      double lo = std::min({a, b, c});
      double hi = std::max({a, b, c});
      double mid = a + b + c - lo - hi;
      acc.add(sandwich_check(mag(rng), mid, lo, hi));
    }
    out.push_back(acc.res);
  }
  {
    std::mt19937_64 rng(seed + 5);
    std::uniform_real_distribution<double> mag(0.01, 5.0);
    std::uniform_real_distribution<double> frac(-0.499, 0.499);
    std::uniform_real_distribution<double> expo(0.05, 3.0);
    std::uniform_int_distribution<int> sign(0, 1);
    SuiteAccumulator acc("lemma5_shifted_power", seed + 5);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = (sign(rng) ? 1.0 : -1.0) * mag(rng);
      const double u = frac(rng) * x;  // |u| < |x|/2 keeps the region valid
      acc.add(shifted_power_check(x, u, expo(rng)));
    }
    out.push_back(acc.res);
  }
  {
    std::mt19937_64 rng(seed + 6);
    std::uniform_real_distribution<double> mag(0.0, 10.0);
    std::uniform_real_distribution<double> expo(0.05, 3.0);
    std::uniform_real_distribution<double> cdist(0.01, 2.0);
    std::uniform_real_distribution<double> ddist(0.01, 5.0);
    SuiteAccumulator acc("lemma6", seed + 6);
    for (std::size_t i = 0; i < n; ++i) {
      acc.add(lemma6_check(mag(rng), mag(rng), expo(rng), expo(rng), ddist(rng),
                           cdist(rng)));
    }
    out.push_back(acc.res);
  }
  return out;
}

}  // namespace fxtiss
