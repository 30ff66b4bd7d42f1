#include "fxtiss/scenario.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "fxtiss/feedback_opt.hpp"
#include "fxtiss/io.hpp"
#include "fxtiss/nonsmooth.hpp"

namespace fxtiss {

using nlohmann::json;

Scenario scenario_from_string(const std::string& s) {
  if (s == "stylized") return Scenario::stylized;
  if (s == "feedopt") return Scenario::feedopt;
  if (s == "custom") return Scenario::custom;
  throw usage_error("unknown scenario: " + s);
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::stylized: return "stylized";
    case Scenario::feedopt: return "feedopt";
    case Scenario::custom: return "custom";
  }
  return "stylized";
}

void RunConfig::validate() const {
  if (!(effective_eps() > 0.0)) throw usage_error("eps must be positive");
  if (!(eps0 >= 0.0)) throw usage_error("eps0 must be nonnegative");
  if (!(effective_horizon() > 0.0)) throw usage_error("horizon must be positive");
  if (effective_initial_conditions().empty()) {
    throw usage_error("initial_conditions must be nonempty");
  }
  if (!(settle_radius > 0.0)) throw usage_error("settle_radius must be positive");
  if (jobs == 0) throw usage_error("jobs must be positive");
  const std::size_t want = scenario == Scenario::feedopt ? 4 : 2;
  for (const auto& ic : effective_initial_conditions()) {
    if (ic.size() != want) {
      throw usage_error("initial condition dimension must be " + std::to_string(want));
    }
  }
  if (scenario == Scenario::custom) {
    try {
      stylized_params.validate();
    } catch (const std::invalid_argument& e) {
      throw usage_error(e.what());
    }
  }
}

double RunConfig::effective_eps() const {
  if (eps > 0.0) return eps;
  return scenario == Scenario::feedopt ? 0.05 : 0.01;
}

double RunConfig::effective_horizon() const {
  if (horizon > 0.0) return horizon;
  if (scenario == Scenario::feedopt) return 2000.0;
  return disturbed ? 40.0 : 20.0;
}

std::vector<Vec> RunConfig::effective_initial_conditions() const {
  if (!initial_conditions.empty()) return initial_conditions;
  std::vector<Vec> out;
  if (scenario == Scenario::feedopt) {
    out = {{2.0, 1.0, 0.0, 0.0}, {-1.5, 2.0, 0.0, 0.0}, {0.5, -2.0, 0.0, 0.0}};
  } else {
    // 12 starts spread over four magnitudes: |s0| in {1, 10, 100, 1000}.
    for (double r : {1.0, 10.0, 100.0, 1000.0}) {
      for (double ang : {0.4, 2.0, 3.7}) {
        out.push_back({r * std::cos(ang), r * std::sin(ang)});
      }
    }
  }
  return out;
}

SolverOptions RunConfig::effective_solver() const {
  if (solver) return *solver;
  SolverOptions o;
  if (scenario == Scenario::feedopt) {
    o = TrackingScenarioOptions().solver;
  } else {
    o.component_abs_tol = {1e-7, 1e-4};  // slow x, fast z
    o.record_stride = 16;
    o.max_steps = 50'000'000;
  }
  return o;
}

StylizedParams RunConfig::effective_stylized_params() const {
  return scenario == Scenario::custom ? stylized_params : StylizedParams{};
}

namespace {

json solver_to_json(const SolverOptions& o) {
  json j;
  j["rel_tol"] = o.rel_tol;
  j["abs_tol"] = o.abs_tol;
  j["h_init"] = o.h_init;
  j["h_min"] = o.h_min;
  j["h_max"] = o.h_max;
  j["max_steps"] = o.max_steps;
  j["component_abs_tol"] = o.component_abs_tol;
  j["record_stride"] = o.record_stride;
  return j;
}

SolverOptions solver_from_json(const json& j) {
  SolverOptions o;
  o.rel_tol = j.value("rel_tol", o.rel_tol);
  o.abs_tol = j.value("abs_tol", o.abs_tol);
  o.h_init = j.value("h_init", o.h_init);
  o.h_min = j.value("h_min", o.h_min);
  o.h_max = j.value("h_max", o.h_max);
  o.max_steps = j.value("max_steps", o.max_steps);
  if (j.contains("component_abs_tol")) {
    o.component_abs_tol = j.at("component_abs_tol").get<Vec>();
  }
  o.record_stride = j.value("record_stride", o.record_stride);
  return o;
}

}  // namespace

std::string RunConfig::to_json() const {
  json j;
  j["scenario"] = fxtiss::to_string(scenario);
  j["eps"] = effective_eps();
  j["eps0"] = eps0;
  j["disturbed"] = disturbed;
  j["horizon"] = effective_horizon();
  j["initial_conditions"] = effective_initial_conditions();
  j["solver"] = solver_to_json(effective_solver());
  j["seed"] = seed;
  j["output_dir"] = output_dir.string();
  j["settle_radius"] = settle_radius;
  j["jobs"] = jobs;
  if (scenario == Scenario::custom) {
    j["params"] = {{"r1", stylized_params.r1},
                   {"r2", stylized_params.r2},
                   {"q1", stylized_params.q1},
                   {"q2", stylized_params.q2}};
  }
  return j.dump(2);
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw usage_error(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  try {
    if (j.contains("scenario")) c.scenario = scenario_from_string(j.at("scenario"));
    c.eps = j.value("eps", c.eps);
    c.eps0 = j.value("eps0", c.eps0);
    c.disturbed = j.value("disturbed", c.disturbed);
    c.horizon = j.value("horizon", c.horizon);
    if (j.contains("initial_conditions")) {
      c.initial_conditions = j.at("initial_conditions").get<std::vector<Vec>>();
      if (c.initial_conditions.empty()) {
        throw usage_error("initial_conditions must be nonempty");
      }
    }
    if (j.contains("solver")) c.solver = solver_from_json(j.at("solver"));
    c.seed = j.value("seed", c.seed);
    c.output_dir = j.value("output_dir", c.output_dir.string());
    c.settle_radius = j.value("settle_radius", c.settle_radius);
    c.jobs = j.value("jobs", c.jobs);
    if (j.contains("params")) {
      const json& p = j.at("params");
      c.stylized_params.r1 = p.value("r1", c.stylized_params.r1);
      c.stylized_params.r2 = p.value("r2", c.stylized_params.r2);
      c.stylized_params.q1 = p.value("q1", c.stylized_params.q1);
      c.stylized_params.q2 = p.value("q2", c.stylized_params.q2);
    }
  } catch (const json::exception& e) {
    throw usage_error(std::string("config error: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot read config file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

namespace {

struct RunOutcome {
  json summary;
  bool failed = false;
  std::vector<double> plot_t;
  std::vector<double> plot_v;
  std::string name;
};

RunOutcome simulate_one_stylized(const RunConfig& config, std::size_t index,
                                 const Vec& ic) {
  const StylizedParams params = config.effective_stylized_params();
  const SPSystem sys = stylized_system(params);
  const double eps = config.effective_eps();
  const OdeField field = original_dynamics_field(sys, eps);
  const InputSignal u = config.disturbed ? stylized_disturbance() : InputSignal::zero(2);

  IntegrationResult res = integrate(field, ic, u, 0.0, config.effective_horizon(),
                                    config.effective_solver());
  res.trajectory.state_names = {"x1", "z1"};
  res.trajectory.input_names = {"u1", "u2"};

  const std::string rel = "run_" + std::to_string(index) + "/trajectory.csv";
  const auto dir = config.output_dir / ("run_" + std::to_string(index));
  std::filesystem::create_directories(dir);
  write_trajectory_csv(dir / "trajectory.csv", res.trajectory);

  RunOutcome out;
  out.failed = !res.ok();
  const auto st = settling_time(res.trajectory, config.settle_radius);
  // empirical ultimate bound: sup |s| over the final quarter of the horizon
  double ultimate = 0.0;
  const double t_post = config.effective_horizon() * 0.75;
  for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
    if (res.trajectory.times[i] >= t_post) {
      ultimate = std::max(ultimate, res.trajectory.state_norm(i));
    }
  }
  out.summary = {{"ic", ic},
                 {"status", res.ok() ? "ok" : res.message},
                 {"settling_time", st ? json(*st) : json(nullptr)},
                 {"final_norm", res.trajectory.state_norm(res.trajectory.size() - 1)},
                 {"max_norm", res.trajectory.max_state_norm()},
                 {"ultimate_bound", ultimate},
                 {"csv", rel}};
  out.name = "|s0|=" + std::to_string(norm2(ic)).substr(0, 8);
  for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
    out.plot_t.push_back(res.trajectory.times[i]);
    out.plot_v.push_back(res.trajectory.state_norm(i));
  }
  return out;
}

RunOutcome simulate_one_feedopt(const RunConfig& config, std::size_t index,
                                const Vec& ic) {
  TrackingScenarioOptions opts;
  opts.horizon = config.effective_horizon();
  opts.solver = config.effective_solver();
  const TrackingRecord rec = run_tracking_scenario(
      config.effective_eps(), config.eps0, {ic[0], ic[1]}, {ic[2], ic[3]}, opts);

  const std::string rel = "run_" + std::to_string(index) + "/tracking.csv";
  const auto dir = config.output_dir / ("run_" + std::to_string(index));
  std::filesystem::create_directories(dir);
  write_tracking_csv(dir / "tracking.csv", rec);

  RunOutcome out;
  out.failed = rec.status != IntegrationStatus::ok;
  out.summary = {{"ic", ic},
                 {"status", out.failed ? "integration failure" : "ok"},
                 {"final_tracking_error", rec.final_tracking_error()},
                 {"post_settling_mean_error", rec.post_settling_mean()},
                 {"csv", rel}};
  out.name = "ic_" + std::to_string(index);
  out.plot_t = rec.times;
  out.plot_v = rec.tracking_error;
  return out;
}

}  // namespace

int run_simulate(const RunConfig& config, std::ostream& log) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  write_manifest(config.output_dir, "simulate", config.to_json(), config.seed);

  const auto ics = config.effective_initial_conditions();
  std::vector<RunOutcome> outcomes(ics.size());
  const bool feedopt = config.scenario == Scenario::feedopt;

  const unsigned workers = std::max(1u, std::min<unsigned>(config.jobs, ics.size()));
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < ics.size(); i += workers) {
      try {
        outcomes[i] = feedopt ? simulate_one_feedopt(config, i, ics[i])
                              : simulate_one_stylized(config, i, ics[i]);
      } catch (const std::exception& e) {
        outcomes[i].failed = true;
        outcomes[i].summary = {{"ic", ics[i]}, {"status", std::string(e.what())}};
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  json summary;
  summary["scenario"] = to_string(config.scenario);
  summary["eps"] = config.effective_eps();
  summary["eps0"] = config.eps0;
  summary["disturbed"] = config.disturbed;
  summary["settle_radius"] = config.settle_radius;
  json runs = json::array();
  bool failed = false;
  double varrho = 0.0;
  for (auto& o : outcomes) {
    if (o.summary.contains("ultimate_bound")) {
      varrho = std::max(varrho, o.summary["ultimate_bound"].get<double>());
    }
    runs.push_back(o.summary);
    failed = failed || o.failed;
  }
  summary["runs"] = std::move(runs);
  if (!feedopt) summary["varrho_estimate"] = varrho;

  SvgLinePlot plot(feedopt ? "tracking error vs t" : "|s(t)| vs t", "t",
                   feedopt ? "|xhat - optimizer|" : "|s|", /*log_y=*/true);
  for (auto& o : outcomes) plot.add_series(o.name, o.plot_t, o.plot_v);
  plot.write(config.output_dir / "norms.svg");

  {
    std::ofstream out(config.output_dir / "summary.json", std::ios::binary);
    out << summary.dump(2) << '\n';
  }
  log << "simulate: " << ics.size() << " runs -> " << config.output_dir.string()
      << (failed ? " (with failures)" : "") << "\n";
  return failed ? kExitRuntime : kExitOk;
}

int run_certify(const RunConfig& config, const CertifyOverrides& ov, std::ostream& log) {
  if (ov.samples == 0) throw usage_error("certify: samples must be positive");
  if (!(ov.cert_state_half > 0.0 && ov.cert_input_half > 0.0 &&
        ov.bounds_state_half > 0.0 && ov.bounds_input_half > 0.0)) {
    throw usage_error("certify: malformed region box (half-width must be positive)");
  }
  std::filesystem::create_directories(config.output_dir);
  write_manifest(config.output_dir, "certify", config.to_json(), config.seed);

  const StylizedParams params = config.effective_stylized_params();
  const SPSystem sys = stylized_system(params);
  const FxTCertificate vc = stylized_v_certificate(params);
  const BoundaryLayerCertificate wc = stylized_w_certificate(params);

  std::vector<std::pair<std::string, CheckReport>> reports;

  {
    const OdeField rf = reduced_field(sys);
    auto field = [&rf](const Vec& x, const Vec& u) {
      Vec dx(rf.dim);
      rf.rhs(0.0, x, u, dx);
      return dx;
    };
    reports.emplace_back(
        "stylized_reduced",
        check_fxt_certificate(vc, field, Box::centered(ov.cert_state_half, 1),
                              Box::centered(ov.cert_input_half, 2), ov.samples,
                              kCheckRelTol, config.seed, config.jobs));
  }
  {
    auto restriction = [params](const Vec& y, const Vec& u) {
      return stylized_boundary_restriction(params, y, u);
    };
    reports.emplace_back(
        "stylized_boundary_layer",
        check_boundary_layer_certificate(
            wc, sys, Box::centered(ov.cert_state_half, 1),
            Box::centered(ov.cert_state_half, 1), Box::centered(ov.cert_input_half, 2),
            restriction, ov.samples, kCheckRelTol, config.seed + 1, config.jobs));
  }
  {
    InterconnectionBounds bounds = stylized_validated_bounds(params);
    bounds.omega1 *= ov.omega1_scale;
    bounds.omega2 *= ov.omega2_scale;
    reports.emplace_back(
        "stylized_interconnection",
        check_interconnection_bounds(
            sys, vc, wc, bounds, Box::centered(ov.bounds_state_half, 1),
            Box::centered(ov.bounds_state_half, 1), Box::centered(ov.bounds_input_half, 2),
            ov.samples, kCheckRelTol, config.seed + 2, config.jobs));
  }
  {
    // Feedback-optimization reduced flow at the frozen cost: V = |x|^2 decays
    // with gains 2 kappa^(2-xi)/L, exponents 1 - xi/2.
    FeedbackOptSystem fo;
    fo.eps = 0.05;
    fo.eps0 = 0.0;
    const SPSystem fsys = feedopt_sp_system(fo);
    const auto qm = cost_matrices(fo.model, 0.0, fo.eps, fo.eps0);
    const auto [lmin, lmax] = q_eigenvalues(qm);
    const double kappa = 2.0 * lmin, L = 2.0 * lmax;
    const double k1 = 2.0 * std::pow(kappa, 2.0 - fo.controller.xi1) / L;
    const double k2 = 2.0 * std::pow(kappa, 2.0 - fo.controller.xi2) / L;
    const FxTCertificate fvc = FxTCertificate::quadratic(
        k1, k2, 1.0 - 0.5 * fo.controller.xi1, 1.0 - 0.5 * fo.controller.xi2,
        ClassKFn::zero());
    const OdeField rf = reduced_field(fsys);
    auto field = [&rf](const Vec& x, const Vec& u) {
      Vec dx(rf.dim);
      rf.rhs(0.0, x, u, dx);
      return dx;
    };
    reports.emplace_back(
        "feedopt_reduced",
        check_fxt_certificate(fvc, field, Box::centered(ov.bounds_state_half, 2),
                              Box{{0.0, 0.0}, {0.0, 0.0}}, ov.samples, kCheckRelTol,
                              config.seed + 3, config.jobs));
  }

  bool any_violation = false;
  for (const auto& [name, rep] : reports) {
    any_violation = any_violation || !rep.passed();
    log << name << ": " << rep.violations.size() << " violations, " << rep.tight_count
        << " tight, max relative excess "
        << (std::isfinite(rep.max_violation) ? rep.max_violation : 0.0) << " ("
        << rep.samples_tested << " samples, seed " << rep.seed << ")\n";
  }
  {
    std::ofstream out(config.output_dir / "certify_report.json", std::ios::binary);
    out << check_reports_to_json(reports) << '\n';
  }
  log << "report: " << (config.output_dir / "certify_report.json").string() << "\n";
  return any_violation ? kExitCheckFailed : kExitOk;
}

int run_composite(const RunConfig& config, const CompositeOverrides& ov,
                  std::ostream& log) {
  std::filesystem::create_directories(config.output_dir);
  write_manifest(config.output_dir, "composite", config.to_json(), config.seed);

  const StylizedParams params = config.effective_stylized_params();
  const FxTCertificate vc = stylized_v_certificate(params);
  const BoundaryLayerCertificate wc = stylized_w_certificate(params);
  InterconnectionBounds bounds = stylized_validated_bounds(params);
  if (ov.nu1) bounds.nu1 = *ov.nu1;
  if (ov.nu2) bounds.nu2 = *ov.nu2;
  if (ov.omega1) bounds.omega1 = *ov.omega1;
  if (ov.omega2) bounds.omega2 = *ov.omega2;

  CompositeOptions copts;
  copts.zeta_grid_resolution = ov.zeta_grid_resolution;
  copts.eps_cap = ov.eps_cap;

  CompositeCertificate cert;
  try {
    cert = build_composite(vc, wc, bounds, copts);
  } catch (const composite_construction_error& e) {
    log << "composite construction failed: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  log << "zeta_star = " << cert.zeta_star << "\n"
      << "nu_star   = " << cert.nu_star << "\n"
      << "eps_star  = " << cert.eps_star << (cert.eps_star_capped ? " (capped)" : "")
      << "\n"
      << "gamma     = (" << cert.gamma1 << ", " << cert.gamma2 << ")\n"
      << "T_bound   = " << cert.t_bound << "\n";
  {
    std::ofstream out(config.output_dir / "composite.json", std::ios::binary);
    out << composite_to_json(cert) << '\n';
  }
  log << "certificate: " << (config.output_dir / "composite.json").string() << "\n";
  return kExitOk;
}

int run_lemmas(const RunConfig& config, std::size_t samples_per_lemma,
               std::ostream& log) {
  if (samples_per_lemma == 0) throw usage_error("lemmas: samples must be positive");
  std::filesystem::create_directories(config.output_dir);
  write_manifest(config.output_dir, "lemmas", config.to_json(), config.seed);

  const auto suites = run_lemma_suites(config.seed, samples_per_lemma);
  std::size_t total_violations = 0;
  for (const auto& s : suites) {
    total_violations += s.violations;
    log << s.lemma << ": " << s.samples << " samples, " << s.violations
        << " violations, min relative slack " << s.min_rel_slack << "\n";
  }
  log << "seed " << config.seed << " (rerun with --seed to reproduce)\n";
  {
    std::ofstream out(config.output_dir / "lemmas.json", std::ios::binary);
    out << lemma_suites_to_json(suites) << '\n';
  }
  return total_violations == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace fxtiss
