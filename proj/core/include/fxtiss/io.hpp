#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fxtiss/certify.hpp"
#include "fxtiss/feedback_opt.hpp"
#include "fxtiss/nonsmooth.hpp"
#include "fxtiss/ode.hpp"

namespace fxtiss {

/// CSV with header `t,<state components...>,<input components...>`, one row
/// per recorded step, 17-significant-digit decimals.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// CSV `t,tau,xhat1,xhat2,z1,z2,opt1,opt2,track_err,plant_err`.
void write_tracking_csv(const std::filesystem::path& path, const TrackingRecord& rec);

std::string check_report_to_json(const CheckReport& report, const std::string& name);
std::string check_reports_to_json(const std::vector<std::pair<std::string, CheckReport>>& reports);
std::string composite_to_json(const CompositeCertificate& cert);
std::string lemma_suites_to_json(const std::vector<LemmaSuiteResult>& suites);

/// manifest.json with the config echo, seed and tool version.
void write_manifest(const std::filesystem::path& dir, const std::string& subcommand,
                    const std::string& config_json, std::uint64_t seed);

/// Minimal deterministic SVG line plot (polyline per series, optional log10
/// vertical scale). No external plotting dependency.
class SvgLinePlot {
 public:
  SvgLinePlot(std::string title, std::string x_label, std::string y_label,
              bool log_y = false);
  void add_series(std::string name, const std::vector<double>& x,
                  const std::vector<double>& y);
  void write(const std::filesystem::path& path) const;

 private:
  struct Series {
    std::string name;
    std::vector<double> x, y;
  };
  std::string title_, x_label_, y_label_;
  bool log_y_;
  std::vector<Series> series_;
};

}  // namespace fxtiss
