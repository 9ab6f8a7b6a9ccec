#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evanskit/evans.hpp"
#include "evanskit/profile.hpp"

namespace evanskit::cli {

struct ContourSpec {
  std::string shape = "circle";  // circle | semicircle | rectangle
  cplx center{1.5, 0.0};
  double radius = 1.4;
  double re_offset = 0.0;        // semicircle
  cplx lower{0.1, -1.0};         // rectangle corners
  cplx upper{2.0, 1.0};
  std::vector<double> xi;
};

struct LowFreqSpec {
  int angles = 8;
  double re_min = 0.3;
  std::vector<double> radii{1e-2, 3e-3, 1e-3};
};

struct ScanSpec {
  double shell_radius = 1e-2;
  int shell_samples = 16;
  double shell_re_min = 0.1;
  double contour_radius = 10.0;
  std::vector<double> xi_slices{0.0, 0.5, 1.0};
};

struct RunConfig {
  std::string task = "contour";  // profile | eval | contour | lowfreq | regime-scan | print-defaults
  std::string system = "burgers";
  std::map<std::string, double> params;
  std::optional<Vec> u_minus, u_plus;
  std::optional<double> speed;
  std::string variant = "integrated_1d";
  std::string scale = "r";  // sharp_md only: r | r2 | unit
  ProfileOptions profile;
  EvansOptions evans;
  WindingOptions winding;
  ContourSpec contour;
  std::vector<Frequency> frequencies{Frequency(1.0)};
  LowFreqSpec lowfreq;
  ScanSpec scan;
  int jobs = 1;
  std::string out = "evanskit_out";
};

/// Parses a JSON config; unknown keys and bad values raise ErrorKind::config
/// with the offending field path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// The full default config as JSON text.
std::string defaults_json();
std::string to_json(const RunConfig& cfg);

/// Runs the task, writes artifacts into cfg.out, returns the summary JSON.
std::string run(const RunConfig& cfg);

/// Maps an exception to an exit code (2 config, 3 numerical) and a JSON record.
int error_record(const std::exception& e, std::string& record);

}  // namespace evanskit::cli
