// fxtiss command line: reproducible simulation, certificate checking and
// composite-certificate construction for two-time-scale systems.
//
// Subcommands: simulate | certify | composite | lemmas
// Exit codes:  0 success, 1 runtime failure, 2 usage, 3 check failure.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fxtiss/scenario.hpp"
#include "fxtiss/version.hpp"

using namespace fxtiss;

namespace {

Vec parse_ic(const std::string& text) {
  Vec out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw usage_error("bad initial condition component: " + part);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("fxtiss ") + kVersion +
               " — fixed-time ISS toolkit for singularly perturbed systems"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  unsigned jobs = 0;
  app.add_option("--config", config_path, "JSON config file (flags override it)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* out_opt = app.add_option("--out", out_dir, "artifact output directory");
  auto* jobs_opt = app.add_option("--jobs", jobs, "parallel workers for independent runs");

  // simulate ----------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "integrate a scenario and write CSV/SVG artifacts");
  std::string scenario_name;
  double eps = 0, eps0 = -1, horizon = 0, settle_radius = 0;
  bool disturbed = false, undisturbed = false;
  std::vector<std::string> ics;
  auto* sc_opt = sim->add_option("--scenario", scenario_name, "stylized | feedopt | custom");
  auto* eps_opt = sim->add_option("--eps", eps, "time-scale separation parameter");
  auto* eps0_opt = sim->add_option("--eps0", eps0, "cost drift rate (feedopt)");
  auto* dist_opt =
      sim->add_option("--disturbed", disturbed, "apply the bundled disturbance (true/false)");
  auto* undist_opt = sim->add_flag("--undisturbed", undisturbed, "force zero input");
  auto* hor_opt = sim->add_option("--horizon", horizon, "simulation horizon");
  auto* rad_opt = sim->add_option("--settle-radius", settle_radius, "settling ball radius");
  sim->add_option("--ic", ics, "initial condition as comma-separated reals (repeatable)");

  // certify -----------------------------------------------------------------
  auto* cert = app.add_subcommand("certify", "sampling checks of the bundled certificates");
  CertifyOverrides cov;
  cert->add_option("--samples", cov.samples, "samples per check");
  cert->add_option("--omega1-scale", cov.omega1_scale, "scale factor on omega1");
  cert->add_option("--omega2-scale", cov.omega2_scale, "scale factor on omega2");
  cert->add_option("--state-half", cov.cert_state_half, "certificate state box half-width");
  cert->add_option("--input-half", cov.cert_input_half, "certificate input box half-width");
  cert->add_option("--bounds-state-half", cov.bounds_state_half,
                   "interconnection state box half-width");
  cert->add_option("--bounds-input-half", cov.bounds_input_half,
                   "interconnection input box half-width");

  // composite ---------------------------------------------------------------
  auto* comp = app.add_subcommand("composite", "build the composite certificate");
  CompositeOverrides mov;
  double nu1 = 0, nu2 = 0, omega1 = 0, omega2 = 0;
  auto* nu1_opt = comp->add_option("--nu1", nu1, "override nu1");
  auto* nu2_opt = comp->add_option("--nu2", nu2, "override nu2");
  auto* om1_opt = comp->add_option("--omega1", omega1, "override omega1");
  auto* om2_opt = comp->add_option("--omega2", omega2, "override omega2");
  comp->add_option("--zeta-res", mov.zeta_grid_resolution, "zeta grid resolution");
  comp->add_option("--eps-cap", mov.eps_cap, "eps* cap when unbounded above");

  // lemmas ------------------------------------------------------------------
  auto* lem = app.add_subcommand("lemmas", "run the inequality oracle suites");
  std::size_t lemma_samples = 100'000;
  lem->add_option("--samples", lemma_samples, "samples per lemma");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config = RunConfig::from_json_file(config_path);
    if (seed_opt->count() > 0) config.seed = seed;
    if (out_opt->count() > 0) config.output_dir = out_dir;
    if (jobs_opt->count() > 0) config.jobs = jobs;

    if (sim->parsed()) {
      if (sc_opt->count() > 0) config.scenario = scenario_from_string(scenario_name);
      if (eps_opt->count() > 0) config.eps = eps;
      if (eps0_opt->count() > 0) {
        if (eps0 < 0) throw usage_error("eps0 must be nonnegative");
        config.eps0 = eps0;
      }
      if (dist_opt->count() > 0) config.disturbed = disturbed;
      if (undist_opt->count() > 0) config.disturbed = false;
      if (hor_opt->count() > 0) config.horizon = horizon;
      if (rad_opt->count() > 0) config.settle_radius = settle_radius;
      if (!ics.empty()) {
        config.initial_conditions.clear();
        for (const auto& s : ics) config.initial_conditions.push_back(parse_ic(s));
      }
      return run_simulate(config, std::cout);
    }
    if (cert->parsed()) {
      return run_certify(config, cov, std::cout);
    }
    if (comp->parsed()) {
      if (nu1_opt->count() > 0) mov.nu1 = nu1;
      if (nu2_opt->count() > 0) mov.nu2 = nu2;
      if (om1_opt->count() > 0) mov.omega1 = omega1;
      if (om2_opt->count() > 0) mov.omega2 = omega2;
      return run_composite(config, mov, std::cout);
    }
    if (lem->parsed()) {
      return run_lemmas(config, lemma_samples, std::cout);
    }
    std::cerr << "no subcommand\n";
    return kExitUsage;
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
