#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fxtiss {

using Vec = std::vector<double>;

/// |x|^p evaluated as exp(p*ln|x|), with an explicit branch returning 0 at
/// x = 0. Keeps the non-Lipschitz powers NaN-free at the origin.
double abs_pow(double x, double p);

/// Signed power: sgn(x)*|x|^q. Exactly 0 at x = 0 and odd in x.
/// Throws std::invalid_argument when q <= 0 or not finite.
double signed_power(double x, double q);

struct SignedPowerParams {
  double exponent;  // q > 0
  explicit SignedPowerParams(double q);
};

/// Parameters of the fixed-time drift x/|x|^xi1 + x/|x|^xi2.
struct FxTDriftParams {
  double xi1;  // in (0,1): sublinear term, dominant near the origin
  double xi2;  // < 0: superlinear term, dominant far from the origin
  FxTDriftParams(double xi1_, double xi2_);
};

/// Fixed-time drift field. Continuous at x = 0 (returns the zero vector),
/// colinear with x and satisfying x.F(x) > 0 for x != 0.
Vec fxt_drift(std::span<const double> x, const FxTDriftParams& params);
double fxt_drift_scalar(double x, const FxTDriftParams& params);

/// Outcome of one inequality-oracle evaluation. `holds` applies the
/// module-wide relative tolerance; `applicable` is false when the input lies
/// outside the inequality's stated precondition region (reported distinctly
/// from a violation).
struct LemmaCheckResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
  double slack = 0.0;  // rhs - lhs
  bool applicable = true;
};

/// Relative tolerance absorbed into every oracle: the inequalities are exact
/// in reals but floating rounding can flip tight cases.
inline constexpr double kLemmaRelTol = 1e-9;

/// x^p1*y^p2 <= c*x^(p1+p2) + c^(-p1/p2)*y^(p1+p2) for x,y >= 0, p1,p2,c > 0.
LemmaCheckResult lemma1_check(double x, double y, double p1, double p2, double c);

/// | x/|x|^xi1 - y/|y|^xi1 | <= 2^xi1 |x-y|^(1-xi1), xi1 in (0,1),
/// with x/|x|^xi1 := 0 at x = 0.
LemmaCheckResult lemma2a_check(std::span<const double> x, std::span<const double> y,
                               double xi1);

/// | x/|x|^xi2 - y/|y|^xi2 | <= K|y-x|(|x|^-xi2 + |y-x|^-xi2), xi2 < 0,
/// K = 1 + max{1, -xi2*2^(-xi2-1)}. At x = 0 or y = 0 the bound is evaluated
/// with K = 1, where it holds with margin.
LemmaCheckResult lemma2b_check(std::span<const double> x, std::span<const double> y,
                               double xi2);

/// (sum s_i)^p <= sum s_i^p for p in (0,1]; <= n^(p-1) sum s_i^p for p > 1.
LemmaCheckResult jensen_sum_check(std::span<const double> s, double p);

/// x^p <= x^p_lo + x^p_hi for x >= 0 and p_lo <= p <= p_hi.
LemmaCheckResult sandwich_check(double x, double p, double p_lo, double p_hi);

/// x*sgn(x+u)|x+u|^alpha >= 2^-alpha |x|^(alpha+1), valid on |x| > 2|u|.
/// Outside that region the result is flagged not-applicable, not violated.
LemmaCheckResult shifted_power_check(double x, double u, double alpha);

/// delta*x^p1*y^p2 <= c*x^(p1+p2) + delta^(1+p1/p2)*c^(-p1/p2)*y^(p1+p2).
LemmaCheckResult lemma6_check(double x, double y, double p1, double p2,
                              double delta, double c);

/// Aggregate of a seeded random-sampling run of one oracle.
struct LemmaSuiteResult {
  std::string lemma;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::size_t not_applicable = 0;
  // Tightest relative margin seen, (rhs-lhs)/max(1,|lhs|,|rhs|); negative
  // values beyond kLemmaRelTol count as violations.
  double min_rel_slack = 0.0;
};

/// Runs all seven oracles on `samples_per_lemma` uniformly sampled valid
/// inputs each (vector lemmas in dims 1-5). The generator is a seeded 64-bit
/// engine so failures are reproducible from the reported seed.
std::vector<LemmaSuiteResult> run_lemma_suites(std::uint64_t seed,
                                               std::size_t samples_per_lemma);

}  // namespace fxtiss
