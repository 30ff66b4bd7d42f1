#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fxtiss/certify.hpp"
#include "fxtiss/ode.hpp"
#include "fxtiss/stylized.hpp"

namespace fxtiss {

/// Raised for malformed configuration / arguments; the CLI maps it to exit 2.
class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { stylized, feedopt, custom };

Scenario scenario_from_string(const std::string& s);  // throws usage_error
std::string to_string(Scenario s);

/// One reproducible run bundle: scenario, time-scale parameters, initial
/// conditions, solver options, seed and artifact directory. A config file is
/// a JSON object with these fields; command-line flags override it.
struct RunConfig {
  Scenario scenario = Scenario::stylized;
  double eps = 0.0;    // 0 -> scenario default (0.01 stylized, 0.05 feedopt)
  double eps0 = 0.0;
  bool disturbed = false;
  std::vector<Vec> initial_conditions;  // empty -> scenario default grid
  double horizon = 0.0;                 // 0 -> scenario default
  std::optional<SolverOptions> solver;  // unset -> scenario default
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "out";
  double settle_radius = 1e-2;
  unsigned jobs = 1;
  StylizedParams stylized_params;  // exponents for scenario=custom

  void validate() const;  // throws usage_error
  std::string to_json() const;
  static RunConfig from_json_file(const std::filesystem::path& path);
  static RunConfig from_json_text(const std::string& text);

  double effective_eps() const;
  double effective_horizon() const;
  std::vector<Vec> effective_initial_conditions() const;
  SolverOptions effective_solver() const;
  StylizedParams effective_stylized_params() const;
};

/// Exit codes shared by the CLI: 0 success, 1 runtime failure, 2 usage,
/// 3 check/construction failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCheckFailed = 3;

/// Simulates every initial condition of the configured scenario, writing
/// per-run trajectory CSVs, summary.json, an SVG overlay of state norms (or
/// tracking errors) and manifest.json under config.output_dir.
int run_simulate(const RunConfig& config, std::ostream& log);

struct CertifyOverrides {
  std::size_t samples = 10'000;
  double omega1_scale = 1.0;
  double omega2_scale = 1.0;
  // Half-widths of the sampling boxes; nonpositive values are usage errors.
  double cert_state_half = 10.0;
  double cert_input_half = 3.0;
  double bounds_state_half = 5.0;
  double bounds_input_half = 2.0;
};

/// Runs the bundled certificate checks (stylized reduced system, stylized
/// boundary layer, stylized interconnection bounds, feedopt reduced flow) and
/// writes certify_report.json. Exit 0 iff no check reports violations.
int run_certify(const RunConfig& config, const CertifyOverrides& overrides,
                std::ostream& log);

struct CompositeOverrides {
  std::optional<double> nu1, nu2, omega1, omega2;
  double zeta_grid_resolution = 1e-3;
  double eps_cap = 1.0;
};

/// Builds the composite certificate for the stylized example (validated
/// bounds unless overridden), prints zeta*, nu*, eps*, T and writes
/// composite.json. Exit 3 when construction fails.
int run_composite(const RunConfig& config, const CompositeOverrides& overrides,
                  std::ostream& log);

/// Runs the appendix inequality suites; prints one line per lemma and writes
/// lemmas.json. Exit 0 iff zero violations.
int run_lemmas(const RunConfig& config, std::size_t samples_per_lemma,
               std::ostream& log);

}  // namespace fxtiss
