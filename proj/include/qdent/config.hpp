#pragma once

// Sectioned key = value configuration files:
//
//   [dot]
//   s_r_uev = 0.4   # trailing comments are allowed
//
// Sections: dot, emission, detector, grid, quadrature. The grid and quadrature
// sections are optional; everything else is required. Unknown sections or
// keys, duplicates and out-of-range values are rejected with the line number.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qdent/emission.hpp"

namespace qdent {

struct Config {
  // [dot]
  double s_r_uev = 0.0;
  double sigma_uev = 0.0;
  double gamma_x_per_ns = 0.0;
  double gamma_xx_per_ns = 0.0;
  double gamma_s_per_ns = 0.0;
  double p_per_ns = 0.0;
  // [emission]
  double k = 0.0;
  // [detector]
  double irf_fwhm_ns = 0.0;
  // [grid]
  double tau_min_ns = -5.0;
  double tau_max_ns = 5.0;
  double tau_step_ns = 0.01;
  // [quadrature]
  int nodes = 64;

  EmissionParams emission_params() const;
  std::vector<double> tau_grid() const;

  bool operator==(const Config&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string key, const std::string& message);

  int line() const { return line_; }  // 0 when not tied to a line
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

Config parse_config(std::string_view text);

// Canonical text; parse_config(write_config(c)) == c for every valid c.
std::string write_config(const Config& config);

inline constexpr std::string_view kReferenceProfileName = "salter2010_assumed";

// Text of the shipped reference profile (configs/salter2010_assumed.cfg).
std::string_view reference_config_text();

// A built-in profile name, or otherwise a path to a config file.
Config load_config(const std::string& name_or_path);

}  // namespace qdent
