#include <benchmark/benchmark.h>

#include "fxtiss/certify.hpp"
#include "fxtiss/nonsmooth.hpp"
#include "fxtiss/ode.hpp"
#include "fxtiss/stylized.hpp"

using namespace fxtiss;

static void BM_SignedPower(benchmark::State& state) {
  double x = 1.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(signed_power(x, 0.4));
    x = -x;
  }
}
BENCHMARK(BM_SignedPower);

static void BM_FxtDrift(benchmark::State& state) {
  const FxTDriftParams p(1.0 / 3.0, -1.0 / 5.0);
  const Vec x{0.3, -1.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fxt_drift(x, p));
  }
}
BENCHMARK(BM_FxtDrift);

static void BM_Lemma1Oracle(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(lemma1_check(2.0, 3.0, 1.0, 2.0, 0.5));
  }
}
BENCHMARK(BM_Lemma1Oracle);

static void BM_StylizedErrorFieldEval(benchmark::State& state) {
  const SPSystem sys = stylized_system({});
  const OdeField field = error_dynamics_field(sys, 0.01);
  const Vec s{1.3, -0.4};
  const Vec u{0.0, 0.0};
  Vec ds(2);
  for (auto _ : state) {
    field.rhs(0.0, s, u, ds);
    benchmark::DoNotOptimize(ds);
  }
}
BENCHMARK(BM_StylizedErrorFieldEval);

static void BM_IntegrateStylized(benchmark::State& state) {
  const SPSystem sys = stylized_system({});
  const OdeField field = original_dynamics_field(sys, 0.01);
  SolverOptions opts;
  opts.component_abs_tol = {1e-7, 1e-4};
  opts.record_stride = 64;
  for (auto _ : state) {
    auto res = integrate(field, {3.0, -4.0}, InputSignal::zero(2), 0.0, 1.0, opts);
    benchmark::DoNotOptimize(res.accepted_steps);
  }
}
BENCHMARK(BM_IntegrateStylized)->Unit(benchmark::kMillisecond);

static void BM_CertificateCheck(benchmark::State& state) {
  const SPSystem sys = stylized_system({});
  const auto cert = stylized_v_certificate({});
  const OdeField rf = reduced_field(sys);
  auto field = [&rf](const Vec& x, const Vec& u) {
    Vec dx(rf.dim);
    rf.rhs(0.0, x, u, dx);
    return dx;
  };
  for (auto _ : state) {
    auto rep = check_fxt_certificate(cert, field, Box::centered(10, 1),
                                     Box::centered(3, 2), state.range(0));
    benchmark::DoNotOptimize(rep.samples_tested);
  }
}
BENCHMARK(BM_CertificateCheck)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
