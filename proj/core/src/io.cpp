#include "fxtiss/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "fxtiss/version.hpp"

namespace fxtiss {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

}  // namespace

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  const std::size_t sdim = traj.states.empty() ? 0 : traj.states.front().size();
  const std::size_t udim = traj.inputs.empty() ? 0 : traj.inputs.front().size();
  out << "t";
  for (std::size_t i = 0; i < sdim; ++i) {
    out << ',' << (i < traj.state_names.size() ? traj.state_names[i]
                                               : "s" + std::to_string(i + 1));
  }
  for (std::size_t i = 0; i < udim; ++i) {
    out << ',' << (i < traj.input_names.size() ? traj.input_names[i]
                                               : "u" + std::to_string(i + 1));
  }
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << fmt17(traj.times[k]);
    for (double v : traj.states[k]) out << ',' << fmt17(v);
    for (double v : traj.inputs[k]) out << ',' << fmt17(v);
    out << '\n';
  }
}

void write_tracking_csv(const std::filesystem::path& path, const TrackingRecord& rec) {
  auto out = open_out(path);
  out << "t,tau,xhat1,xhat2,z1,z2,opt1,opt2,track_err,plant_err\n";
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    out << fmt17(rec.times[k]) << ',' << fmt17(rec.tau[k]) << ','
        << fmt17(rec.x_hat[k][0]) << ',' << fmt17(rec.x_hat[k][1]) << ','
        << fmt17(rec.z[k][0]) << ',' << fmt17(rec.z[k][1]) << ','
        << fmt17(rec.opt[k][0]) << ',' << fmt17(rec.opt[k][1]) << ','
        << fmt17(rec.tracking_error[k]) << ',' << fmt17(rec.plant_error[k]) << '\n';
  }
}

namespace {

nlohmann::json report_json(const CheckReport& report, const std::string& name) {
  nlohmann::json j;
  j["name"] = name;
  j["samples_tested"] = report.samples_tested;
  j["seed"] = report.seed;
  j["tight_count"] = report.tight_count;
  j["max_violation"] = std::isfinite(report.max_violation) ? report.max_violation : 0.0;
  j["violation_count"] = report.violations.size();
  nlohmann::json arr = nlohmann::json::array();
  // Cap the embedded list; the count above is always exact.
  const std::size_t cap = std::min<std::size_t>(report.violations.size(), 100);
  for (std::size_t i = 0; i < cap; ++i) {
    const Violation& v = report.violations[i];
    arr.push_back({{"sample_index", v.sample_index},
                   {"state", v.state},
                   {"input", v.input},
                   {"lhs", v.lhs},
                   {"rhs", v.rhs},
                   {"which", v.which}});
  }
  j["violations"] = std::move(arr);
  return j;
}

}  // namespace

std::string check_report_to_json(const CheckReport& report, const std::string& name) {
  return report_json(report, name).dump(2);
}

std::string check_reports_to_json(
    const std::vector<std::pair<std::string, CheckReport>>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [name, rep] : reports) arr.push_back(report_json(rep, name));
  return arr.dump(2);
}

std::string composite_to_json(const CompositeCertificate& cert) {
  nlohmann::json j;
  j["zeta_star"] = cert.zeta_star;
  j["nu_star"] = cert.nu_star;
  j["gamma1"] = cert.gamma1;
  j["gamma2"] = cert.gamma2;
  j["eps_star"] = cert.eps_star;
  j["eps_star_capped"] = cert.eps_star_capped;
  j["k1_eff"] = cert.k1_eff;
  j["k2_eff"] = cert.k2_eff;
  j["t_bound"] = cert.t_bound;
  return j.dump(2);
}

std::string lemma_suites_to_json(const std::vector<LemmaSuiteResult>& suites) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : suites) {
    arr.push_back({{"lemma", s.lemma},
                   {"seed", s.seed},
                   {"samples", s.samples},
                   {"violations", s.violations},
                   {"not_applicable", s.not_applicable},
                   {"min_rel_slack", s.min_rel_slack}});
  }
  return arr.dump(2);
}

void write_manifest(const std::filesystem::path& dir, const std::string& subcommand,
                    const std::string& config_json, std::uint64_t seed) {
  nlohmann::json j;
  j["tool"] = "fxtiss";
  j["version"] = kVersion;
  j["subcommand"] = subcommand;
  j["seed"] = seed;
  j["config"] = config_json.empty() ? nlohmann::json::object()
                                    : nlohmann::json::parse(config_json);
  auto out = open_out(dir / "manifest.json");
  out << j.dump(2) << '\n';
}

SvgLinePlot::SvgLinePlot(std::string title, std::string x_label, std::string y_label,
                         bool log_y)
    : title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)),
      log_y_(log_y) {}

void SvgLinePlot::add_series(std::string name, const std::vector<double>& x,
                             const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("SvgLinePlot: size mismatch");
  series_.push_back({std::move(name), x, y});
}

void SvgLinePlot::write(const std::filesystem::path& path) const {
  constexpr double W = 860, H = 520;
  constexpr double ML = 70, MR = 160, MT = 40, MB = 55;
  const double pw = W - ML - MR, ph = H - MT - MB;
  constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                     "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
                                     "#bcbd22", "#e377c2", "#aec7e8", "#98df8a"};

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto ty = [&](double v) { return log_y_ ? std::log10(std::max(v, 1e-300)) : v; };
  for (const auto& s : series_) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      const double yv = ty(s.y[i]);
      ymin = std::min(ymin, yv);
      ymax = std::max(ymax, yv);
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  if (log_y_) ymin = std::max(ymin, ymax - 16.0);  // clip deep underflow

  auto px = [&](double v) { return ML + pw * (v - xmin) / (xmax - xmin); };
  auto py = [&](double v) {
    return MT + ph * (1.0 - (std::clamp(ty(v), ymin, ymax) - ymin) / (ymax - ymin));
  };

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << ML << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
      << title_ << "</text>\n";
  out << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << pw << "\" height=\""
      << ph << "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double gx = px(fx);
    out << "<line x1=\"" << fmt6(gx) << "\" y1=\"" << MT + ph << "\" x2=\"" << fmt6(gx)
        << "\" y2=\"" << MT + ph + 5 << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << fmt6(gx) << "\" y=\"" << MT + ph + 20
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << fmt6(fx) << "</text>\n";
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    const double gy = MT + ph * (1.0 - static_cast<double>(i) / 5.0);
    out << "<line x1=\"" << ML - 5 << "\" y1=\"" << fmt6(gy) << "\" x2=\"" << ML
        << "\" y2=\"" << fmt6(gy) << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << ML - 8 << "\" y=\"" << fmt6(gy + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << (log_y_ ? "1e" + fmt6(fy) : fmt6(fy)) << "</text>\n";
  }
  out << "<text x=\"" << ML + pw / 2 << "\" y=\"" << H - 12
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
      << x_label_ << "</text>\n";
  out << "<text x=\"18\" y=\"" << MT + ph / 2
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 "
      << MT + ph / 2 << ")\">" << y_label_ << "</text>\n";

  for (std::size_t k = 0; k < series_.size(); ++k) {
    const auto& s = series_[k];
    const char* color = palette[k % std::size(palette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    // Thin long series to at most ~2000 points per polyline.
    const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 2000);
    for (std::size_t i = 0; i < s.x.size(); i += stride) {
      out << fmt6(px(s.x[i])) << ',' << fmt6(py(s.y[i])) << ' ';
    }
    if (!s.x.empty() && (s.x.size() - 1) % stride != 0) {
      out << fmt6(px(s.x.back())) << ',' << fmt6(py(s.y.back()));
    }
    out << "\"/>\n";
    const double ly = MT + 16 + 16 * static_cast<double>(k);
    if (ly < H - MB) {
      out << "<line x1=\"" << ML + pw + 10 << "\" y1=\"" << fmt6(ly - 4) << "\" x2=\""
          << ML + pw + 30 << "\" y2=\"" << fmt6(ly - 4) << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n";
      out << "<text x=\"" << ML + pw + 35 << "\" y=\"" << fmt6(ly)
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.name << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace fxtiss
